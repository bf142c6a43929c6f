//! Mini-batch Adam training, optionally with adversarial interpolation.

use serde::{Deserialize, Serialize};

use super::{ModelParams, Objective, ToyModel};
use crate::attack::{one_shot_perturbation, Constraint, Normalize};
use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::text::ParallelCorpus;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// First and second moment estimates.
#[derive(Debug, Clone)]
pub struct Adam {
    config: AdamConfig,
    m: ModelParams,
    v: ModelParams,
    t: i32,
}

impl Adam {
    pub fn new(config: AdamConfig, like: &ModelParams) -> Self {
        Adam {
            config,
            m: like.zeros_like(),
            v: like.zeros_like(),
            t: 0,
        }
    }

    pub fn step(&mut self, params: &mut ModelParams, grads: &ModelParams) {
        self.t += 1;
        let AdamConfig { lr, beta1, beta2, eps } = self.config;
        let c1 = 1.0 - beta1.powi(self.t);
        let c2 = 1.0 - beta2.powi(self.t);
        let tensors = params
            .tensors_mut()
            .into_iter()
            .zip(self.m.tensors_mut())
            .zip(self.v.tensors_mut())
            .zip(grads.tensors());
        for ((((_, p), (_, m)), (_, v)), (_, (_, g))) in tensors {
            for i in 0..p.len() {
                m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
                v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
                p[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
            }
        }
    }
}

/// `(1 - α)·NLL(x, y) + α·NLL(x̂, y)` with `x̂` from a one-shot attack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversarialObjective {
    pub constraint: Constraint,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub label_smoothing: f64,
    pub adam: AdamConfig,
    pub adversarial: Option<AdversarialObjective>,
    /// Substitutions per adversarial sample.
    pub adv_swaps: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 20,
            batch_size: 16,
            label_smoothing: 0.1,
            adam: AdamConfig::default(),
            adversarial: None,
            adv_swaps: 3,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.label_smoothing) {
            return Err(Error::InvalidArgument("label smoothing must lie in [0, 1)".into()));
        }
        if let Some(adv) = &self.adversarial {
            if !(0.0..=1.0).contains(&adv.alpha) {
                return Err(Error::OutOfRange {
                    what: "alpha",
                    value: adv.alpha,
                });
            }
            adv.constraint.validate()?;
        }
        Ok(())
    }
}

/// Batch-mean training loss after each update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossPoint {
    pub step: usize,
    pub epoch: usize,
    pub loss: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: ToyModel,
    pub curve: Vec<LossPoint>,
}

impl TrainOutcome {
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("step,epoch,loss\n");
        for p in &self.curve {
            out.push_str(&format!("{},{},{:.8}\n", p.step, p.epoch, p.loss));
        }
        out
    }
}

/// Loss and accumulated gradient of one batch, without updating.
pub fn batch_gradient(
    model: &ToyModel,
    batch: &[(Vec<u32>, Vec<u32>)],
    config: &TrainConfig,
    grads: &mut ModelParams,
) -> Result<f64> {
    let nll = Objective::Nll {
        smoothing: config.label_smoothing,
    };
    let (clean_w, adv) = match config.adversarial {
        Some(a) if a.alpha > 0.0 => (1.0 - a.alpha, Some(a)),
        _ => (1.0, None),
    };
    let mut total = 0.0;
    for (x, y) in batch {
        if clean_w > 0.0 {
            let mut g = grads.zeros_like();
            let vectors = model.word_vectors(x);
            let (l, _) = model.loss_and_grads(x, vectors.view(), y, nll, Some(&mut g));
            total += clean_w * l;
            grads.add_scaled(&g, clean_w);
        }
        if let Some(a) = adv {
            let x_adv = one_shot_perturbation(model, x, y, a.constraint, config.adv_swaps, Normalize::Sign)?;
            let mut g = grads.zeros_like();
            let vectors = model.word_vectors(&x_adv);
            let (l, _) = model.loss_and_grads(&x_adv, vectors.view(), y, nll, Some(&mut g));
            total += a.alpha * l;
            grads.add_scaled(&g, a.alpha);
        }
    }
    let n = batch.len() as f64;
    grads.scale(1.0 / n);
    Ok(total / n)
}

/// Trains `model` in place of a copy and returns it with its loss curve.
pub fn train(model: &ToyModel, corpus: &ParallelCorpus, config: &TrainConfig) -> Result<TrainOutcome> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let data: Vec<(Vec<u32>, Vec<u32>)> = corpus
        .pairs()
        .iter()
        .map(|(x, y)| (model.source_ids(x), model.target_ids(y)))
        .collect();
    let mut model = model.clone();
    let mut adam = Adam::new(config.adam, &model.params);
    let mut rng = RngState::new(config.seed).fork(1);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut curve = Vec::new();
    let mut step = 0;
    for epoch in 0..config.epochs {
        rng.shuffle(&mut order);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<(Vec<u32>, Vec<u32>)> = chunk.iter().map(|&i| data[i].clone()).collect();
            let mut grads = model.params.zeros_like();
            let loss = batch_gradient(&model, &batch, config, &mut grads)?;
            if !loss.is_finite() || !grads.all_finite() {
                return Err(Error::Divergence { step });
            }
            adam.step(&mut model.params, &grads);
            if !model.params.all_finite() {
                return Err(Error::Divergence { step });
            }
            curve.push(LossPoint { step, epoch, loss });
            step += 1;
        }
    }
    Ok(TrainOutcome { model, curve })
}
