use std::path::Path;

use advmt::attack::{AttackConfig, Normalize, DEFAULT_BUDGET, DEFAULT_K, DEFAULT_MAX_SCRAMBLING};
use advmt::framework::records_to_jsonl;
use advmt::model::checkpoint;
use advmt::pipeline::attack_corpus;
use serde::{Deserialize, Serialize};

use super::train::constraint_named;
use super::{load_corpus, required, write_output};
use crate::args::AttackArgs;
use crate::manifest::Manifest;
use crate::settings::{resolve, CliResult, Failure};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackSettings {
    pub checkpoint: Option<String>,
    pub corpus: Option<String>,
    pub corpus_src: Option<String>,
    pub corpus_tgt: Option<String>,
    pub constraint: String,
    pub k: usize,
    pub max_scrambling: usize,
    pub budget: usize,
    pub normalize: Normalize,
    pub seed: u64,
    pub threads: usize,
    pub out: Option<String>,
}

impl Default for AttackSettings {
    fn default() -> Self {
        AttackSettings {
            checkpoint: None,
            corpus: None,
            corpus_src: None,
            corpus_tgt: None,
            constraint: "charswap".into(),
            k: DEFAULT_K,
            max_scrambling: DEFAULT_MAX_SCRAMBLING,
            budget: DEFAULT_BUDGET,
            normalize: Normalize::Sign,
            seed: 0,
            threads: 1,
            out: None,
        }
    }
}

pub fn run(config: Option<&Path>, args: &AttackArgs) -> CliResult<()> {
    let s: AttackSettings = resolve(&["attack"], config, args)?;
    let out = required(&s.out, "out")?;
    let constraint = constraint_named(&s.constraint, s.k, s.max_scrambling)?;
    if s.budget == 0 {
        return Err(Failure::usage("budget must be at least 1"));
    }
    if s.threads == 0 {
        return Err(Failure::usage("threads must be at least 1"));
    }
    let (model, _) = checkpoint::load(Path::new(required(&s.checkpoint, "checkpoint")?))?;
    let corpus = load_corpus(&s.corpus, &s.corpus_src, &s.corpus_tgt)?;
    let attack = AttackConfig {
        constraint,
        budget: s.budget,
        normalize: s.normalize,
    };
    let records = attack_corpus(&model, &corpus, attack, s.seed, s.threads)?;
    let manifest = Manifest::new("attack", s.seed, &s);
    write_output(out, manifest.wrap(&records_to_jsonl(&records)?).as_bytes())?;
    let swaps: usize = records.iter().map(|r| r.swaps.len()).sum();
    eprintln!("{} records, {swaps} swaps, constraint {constraint}", records.len());
    Ok(())
}
