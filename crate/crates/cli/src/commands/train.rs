use std::path::Path;
use std::str::FromStr;

use advmt::attack::{Constraint, DEFAULT_K, DEFAULT_MAX_SCRAMBLING};
use advmt::model::{checkpoint, train, AdamConfig, AdversarialObjective, ModelConfig, TrainConfig};
use advmt::pipeline::{heldout_chrf, init_model, DEFAULT_VOCAB_SIZE};
use advmt::ParallelCorpus;
use serde::{Deserialize, Serialize};

use super::{load_corpus, required, write_output};
use crate::args::TrainArgs;
use crate::manifest::Manifest;
use crate::settings::{resolve, CliResult, Failure};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub corpus: Option<String>,
    pub corpus_src: Option<String>,
    pub corpus_tgt: Option<String>,
    pub valid: Option<String>,
    pub seed: u64,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub label_smoothing: f64,
    pub d_emb: usize,
    pub d_hid: usize,
    pub max_positions: usize,
    pub vocab_size: usize,
    pub adv: String,
    pub alpha: f64,
    pub adv_swaps: usize,
    pub k: usize,
    pub max_scrambling: usize,
    pub out: Option<String>,
    pub loss_csv: Option<String>,
}

impl Default for TrainSettings {
    fn default() -> Self {
        let t = TrainConfig::default();
        let m = ModelConfig::default();
        TrainSettings {
            corpus: None,
            corpus_src: None,
            corpus_tgt: None,
            valid: None,
            seed: 0,
            epochs: t.epochs,
            batch_size: t.batch_size,
            lr: t.adam.lr,
            label_smoothing: t.label_smoothing,
            d_emb: m.d_emb,
            d_hid: m.d_hid,
            max_positions: m.max_positions,
            vocab_size: DEFAULT_VOCAB_SIZE,
            adv: "none".into(),
            alpha: 1.0,
            adv_swaps: t.adv_swaps,
            k: DEFAULT_K,
            max_scrambling: DEFAULT_MAX_SCRAMBLING,
            out: None,
            loss_csv: None,
        }
    }
}

/// Resolves a constraint name with the configured `k` and scrambling limit.
pub fn constraint_named(name: &str, k: usize, max_scrambling: usize) -> CliResult<Constraint> {
    let c = match Constraint::from_str(name)? {
        Constraint::Knn { .. } => Constraint::Knn { k },
        Constraint::CharSwap { .. } => Constraint::CharSwap { max_scrambling },
        other => other,
    };
    c.validate()?;
    Ok(c)
}

impl TrainSettings {
    fn model_config(&self) -> CliResult<ModelConfig> {
        if self.d_emb == 0 || self.d_hid == 0 || self.max_positions == 0 {
            return Err(Failure::usage("model dimensions must be at least 1"));
        }
        Ok(ModelConfig {
            d_emb: self.d_emb,
            d_hid: self.d_hid,
            max_positions: self.max_positions,
        })
    }

    fn train_config(&self) -> CliResult<TrainConfig> {
        let adversarial = match self.adv.to_ascii_lowercase().as_str() {
            "none" | "off" => None,
            name => Some(AdversarialObjective {
                constraint: constraint_named(name, self.k, self.max_scrambling)?,
                alpha: self.alpha,
            }),
        };
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Failure::usage(format!(
                "learning rate must be positive, got {}",
                self.lr
            )));
        }
        if adversarial.is_some() && self.adv_swaps == 0 {
            return Err(Failure::usage("adv_swaps must be at least 1"));
        }
        let config = TrainConfig {
            epochs: self.epochs,
            batch_size: self.batch_size,
            label_smoothing: self.label_smoothing,
            adam: AdamConfig {
                lr: self.lr,
                ..AdamConfig::default()
            },
            adversarial,
            adv_swaps: self.adv_swaps,
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

pub fn run(config: Option<&Path>, args: &TrainArgs) -> CliResult<()> {
    let s: TrainSettings = resolve(&["train"], config, args)?;
    let out = required(&s.out, "out")?.to_string();
    let model_config = s.model_config()?;
    let train_config = s.train_config()?;
    if s.vocab_size < 4 {
        return Err(Failure::usage("vocab_size must be at least 4"));
    }
    let corpus = load_corpus(&s.corpus, &s.corpus_src, &s.corpus_tgt)?;
    let valid = s
        .valid
        .as_deref()
        .map(|p| ParallelCorpus::read_tsv(Path::new(p)))
        .transpose()?;

    let model = init_model(&corpus, s.vocab_size, model_config, s.seed)?;
    let outcome = train(&model, &corpus, &train_config).map_err(|e| match e {
        advmt::Error::Divergence { .. } => Failure::runtime(format!("training failed: {e}")),
        other => other.into(),
    })?;

    let manifest = Manifest::new("train", s.seed, &s);
    write_output(&out, &checkpoint::to_bytes(&outcome.model, &manifest.line()))?;
    let loss_csv = s.loss_csv.clone().unwrap_or_else(|| format!("{out}.loss.csv"));
    write_output(&loss_csv, manifest.wrap(&outcome.curve_csv()).as_bytes())?;

    if let Some(last) = outcome.curve.last() {
        eprintln!("{} updates, final batch loss {:.4}", outcome.curve.len(), last.loss);
    }
    if let Some(valid) = valid {
        eprintln!("held-out chrF {:.2}", heldout_chrf(&outcome.model, &valid, 1)?);
    }
    Ok(())
}
