use std::path::{Path, PathBuf};

use advmt::synth::{generate, SynthConfig};
use serde::{Deserialize, Serialize};

use super::{required, write_output};
use crate::args::SynthArgs;
use crate::manifest::Manifest;
use crate::settings::{resolve, CliResult, Failure};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSettings {
    pub seed: u64,
    pub out: Option<String>,
    pub corpus: SynthConfig,
}

fn check(c: &SynthConfig) -> CliResult<()> {
    if c.train == 0 || c.valid == 0 || c.test == 0 {
        return Err(Failure::usage("split sizes must be at least 1"));
    }
    if c.nouns == 0 || c.verbs == 0 || c.determiners == 0 {
        return Err(Failure::usage("need at least one noun, verb and determiner"));
    }
    for (name, p) in [
        ("name_rate", c.name_rate),
        ("adjective_rate", c.adjective_rate),
        ("pp_rate", c.pp_rate),
        ("adverb_rate", c.adverb_rate),
    ] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Failure::usage(format!("{name} must lie in [0, 1], got {p}")));
        }
    }
    if (c.adjective_rate > 0.0 && c.adjectives == 0)
        || (c.pp_rate > 0.0 && c.prepositions == 0)
        || (c.adverb_rate > 0.0 && c.adverbs == 0)
        || (c.name_rate > 0.0 && c.name_pool == 0)
    {
        return Err(Failure::usage("a word class with a non-zero rate has no words"));
    }
    Ok(())
}

pub fn run(config: Option<&Path>, args: &SynthArgs) -> CliResult<()> {
    let s: SynthSettings = resolve(&["synth"], config, args)?;
    let out = PathBuf::from(required(&s.out, "out")?);
    check(&s.corpus)?;
    let task = generate(&s.corpus, s.seed);
    let manifest = Manifest::new("synth", s.seed, &s);
    for (name, corpus) in [("train", &task.train), ("valid", &task.valid), ("test", &task.test)] {
        write_output(
            out.join(format!("{name}.tsv")),
            manifest.wrap(&corpus.to_tsv()).as_bytes(),
        )?;
    }
    eprintln!(
        "wrote {} / {} / {} pairs to {}",
        task.train.len(),
        task.valid.len(),
        task.test.len(),
        out.display()
    );
    Ok(())
}
