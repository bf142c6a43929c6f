//! Word-level encoder-decoder with dot-product attention.
//!
//! Small enough to differentiate by hand: every gradient is derived
//! analytically in [`forward::backward`] and checked against finite
//! differences in the test suite.

pub mod checkpoint;
pub mod forward;
pub mod loss;
mod params;
pub mod train;

pub use params::{ModelConfig, ModelParams, TENSOR_NAMES};
pub use train::{train, AdamConfig, AdversarialObjective, TrainConfig, TrainOutcome};

use ndarray::{Array1, Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::text::{SentenceTokens, Token, Vocabulary, BOS, EOS};

use forward::ForwardCache;

/// Output of greedy decoding.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub output: SentenceTokens,
    /// Output ids before UNK replacement, without the end symbol.
    pub ids: Vec<u32>,
    /// One row per decoding step (including a final end-symbol step), each a
    /// distribution over source positions.
    pub attention: Array2<f64>,
    /// Per-step log-distributions over the target vocabulary.
    pub logprobs: Array2<f64>,
}

/// `∂L/∂w_i` for every source position, `n × d_emb`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientWrtInput(pub Array2<f64>);

impl GradientWrtInput {
    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }

    pub fn row(&self, i: usize) -> ndarray::ArrayView1<'_, f64> {
        self.0.row(i)
    }
}

/// Parameters together with the vocabularies that index them.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyModel {
    pub src_vocab: Vocabulary,
    pub tgt_vocab: Vocabulary,
    pub params: ModelParams,
}

/// Which objective a loss evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Objective {
    /// Mean label-smoothed cross-entropy.
    Nll { smoothing: f64 },
    /// `Σ_t log(1 - p(y_t | x, y_<t))`.
    Adversarial,
}

impl ToyModel {
    pub fn new(src_vocab: Vocabulary, tgt_vocab: Vocabulary, config: ModelConfig, rng: &mut RngState) -> Result<Self> {
        if tgt_vocab.id_of(BOS).is_none() || tgt_vocab.id_of(EOS).is_none() {
            return Err(Error::InvalidArgument(
                "target vocabulary lacks sentence markers".into(),
            ));
        }
        let params = ModelParams::init(config, src_vocab.len(), tgt_vocab.len(), rng);
        Ok(ToyModel {
            src_vocab,
            tgt_vocab,
            params,
        })
    }

    pub fn from_parts(src_vocab: Vocabulary, tgt_vocab: Vocabulary, params: ModelParams) -> Result<Self> {
        params.check_shapes().map_err(Error::Dimension)?;
        if params.src_vocab_size() != src_vocab.len() || params.tgt_vocab_size() != tgt_vocab.len() {
            return Err(Error::Dimension(format!(
                "embedding tables {}x{} do not match vocabularies {}x{}",
                params.src_vocab_size(),
                params.tgt_vocab_size(),
                src_vocab.len(),
                tgt_vocab.len()
            )));
        }
        if tgt_vocab.id_of(BOS).is_none() || tgt_vocab.id_of(EOS).is_none() {
            return Err(Error::InvalidArgument(
                "target vocabulary lacks sentence markers".into(),
            ));
        }
        Ok(ToyModel {
            src_vocab,
            tgt_vocab,
            params,
        })
    }

    pub fn bos_id(&self) -> u32 {
        self.tgt_vocab.id_of(BOS).expect("checked at construction")
    }

    pub fn eos_id(&self) -> u32 {
        self.tgt_vocab.id_of(EOS).expect("checked at construction")
    }

    pub fn source_ids(&self, x: &SentenceTokens) -> Vec<u32> {
        self.src_vocab.encode(x)
    }

    pub fn target_ids(&self, y: &SentenceTokens) -> Vec<u32> {
        self.tgt_vocab.encode(y)
    }

    /// Source embedding rows for `ids`.
    pub fn word_vectors(&self, ids: &[u32]) -> Array2<f64> {
        let idx: Vec<usize> = ids.iter().map(|&i| i as usize).collect();
        self.params.src_emb.select(Axis(0), &idx)
    }

    /// Decoder inputs (`BOS y_1 .. y_T`) and gold outputs (`y_1 .. y_T EOS`).
    pub fn teacher_forcing_pair(&self, y_ids: &[u32]) -> (Vec<u32>, Vec<u32>) {
        let mut inputs = Vec::with_capacity(y_ids.len() + 1);
        inputs.push(self.bos_id());
        inputs.extend_from_slice(y_ids);
        let mut gold = y_ids.to_vec();
        gold.push(self.eos_id());
        (inputs, gold)
    }

    fn check_ids(&self, x_ids: &[u32], y_ids: &[u32]) -> Result<()> {
        if x_ids.is_empty() || y_ids.is_empty() {
            return Err(Error::EmptyInput);
        }
        if x_ids.iter().any(|&i| i as usize >= self.params.src_vocab_size())
            || y_ids.iter().any(|&i| i as usize >= self.params.tgt_vocab_size())
        {
            return Err(Error::Dimension("token id outside embedding table".into()));
        }
        Ok(())
    }

    /// Teacher-forced forward pass on explicit source word vectors.
    pub fn forward_vectors(&self, vectors: ArrayView2<f64>, y_ids: &[u32]) -> (ForwardCache, Vec<u32>) {
        let (inputs, gold) = self.teacher_forcing_pair(y_ids);
        (forward::forward(&self.params, vectors, &inputs), gold)
    }

    /// One row per target step plus the end-of-sentence step; each row is a
    /// log-distribution over the target vocabulary.
    pub fn teacher_forced_logprobs(&self, x: &SentenceTokens, y: &SentenceTokens) -> Result<Array2<f64>> {
        let (x_ids, y_ids) = (self.source_ids(x), self.target_ids(y));
        self.check_ids(&x_ids, &y_ids)?;
        let (cache, _) = self.forward_vectors(self.word_vectors(&x_ids).view(), &y_ids);
        Ok(cache.logp)
    }

    /// Loss of `objective` evaluated at explicit source vectors.
    pub fn loss_at(&self, vectors: ArrayView2<f64>, y_ids: &[u32], objective: Objective) -> f64 {
        let (cache, gold) = self.forward_vectors(vectors, y_ids);
        match objective {
            Objective::Nll { smoothing } => loss::nll_with_grad(&cache.logp, &gold, smoothing).0,
            Objective::Adversarial => loss::adv_with_grad(&cache.logp, &gold).0,
        }
    }

    /// Loss, parameter gradients and source-vector gradients. Source-embedding
    /// gradients are routed to the rows named by `x_ids`.
    pub fn loss_and_grads(
        &self,
        x_ids: &[u32],
        vectors: ArrayView2<f64>,
        y_ids: &[u32],
        objective: Objective,
        grads: Option<&mut ModelParams>,
    ) -> (f64, Array2<f64>) {
        let (cache, gold) = self.forward_vectors(vectors, y_ids);
        let (value, dlogits) = match objective {
            Objective::Nll { smoothing } => loss::nll_with_grad(&cache.logp, &gold, smoothing),
            Objective::Adversarial => loss::adv_with_grad(&cache.logp, &gold),
        };
        let d_inputs = forward::backward(&self.params, &cache, &dlogits, grads.map(|g| (g, x_ids)));
        (value, d_inputs)
    }

    pub fn nll_loss(&self, x: &SentenceTokens, y: &SentenceTokens, label_smoothing: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&label_smoothing) {
            return Err(Error::InvalidArgument(format!(
                "label smoothing {label_smoothing} outside [0, 1)"
            )));
        }
        let (x_ids, y_ids) = (self.source_ids(x), self.target_ids(y));
        self.check_ids(&x_ids, &y_ids)?;
        Ok(self.loss_at(
            self.word_vectors(&x_ids).view(),
            &y_ids,
            Objective::Nll {
                smoothing: label_smoothing,
            },
        ))
    }

    pub fn adv_loss(&self, x_adv: &SentenceTokens, y: &SentenceTokens) -> Result<f64> {
        let (x_ids, y_ids) = (self.source_ids(x_adv), self.target_ids(y));
        self.check_ids(&x_ids, &y_ids)?;
        Ok(self.loss_at(self.word_vectors(&x_ids).view(), &y_ids, Objective::Adversarial))
    }

    pub fn grad_adv_wrt_input(&self, x_adv: &SentenceTokens, y: &SentenceTokens) -> Result<GradientWrtInput> {
        let (x_ids, y_ids) = (self.source_ids(x_adv), self.target_ids(y));
        self.check_ids(&x_ids, &y_ids)?;
        let (_, g) = self.loss_and_grads(
            &x_ids,
            self.word_vectors(&x_ids).view(),
            &y_ids,
            Objective::Adversarial,
            None,
        );
        Ok(GradientWrtInput(g))
    }

    /// Default decoding budget for a source of length `n`.
    pub fn default_max_len(n: usize) -> usize {
        2 * n + 5
    }

    /// Argmax decoding. An emitted UNK is replaced by the source token that
    /// receives the most attention at that step.
    pub fn greedy_decode(&self, x: &SentenceTokens, max_len: usize) -> Result<DecodeResult> {
        if x.is_empty() {
            return Err(Error::EmptyInput);
        }
        if max_len == 0 {
            return Err(Error::InvalidArgument("max_len must be at least 1".into()));
        }
        let x_ids = self.source_ids(x);
        let vectors = self.word_vectors(&x_ids);
        let enc = forward::encode(&self.params, vectors.view());
        let (bos, eos, unk) = (self.bos_id(), self.eos_id(), self.tgt_vocab.unk_id());
        let h = self.params.enc_w.ncols();

        let mut state = Array1::<f64>::zeros(h);
        let mut token = bos;
        let mut ids = Vec::new();
        let mut output = Vec::new();
        let mut attention_rows = Vec::new();
        let mut logp_rows = Vec::new();
        for t in 0..max_len {
            let v = forward::decoder_input(&self.params, token, t);
            state = forward::recur(&self.params, state.view(), v.view());
            let block = state.view().insert_axis(Axis(0));
            let (alpha, _, logp) = forward::readout(&self.params, &enc, block);
            let (alpha, logp) = (alpha.row(0).to_owned(), logp.row(0).to_owned());
            let best = argmax_excluding(logp.view(), bos);
            attention_rows.push(alpha.clone());
            logp_rows.push(logp);
            if best == eos {
                break;
            }
            ids.push(best);
            let surface: Token = if best == unk {
                x.tokens()[argmax_excluding(alpha.view(), u32::MAX) as usize].clone()
            } else {
                self.tgt_vocab.token(best).clone()
            };
            output.push(surface);
            token = best;
        }
        Ok(DecodeResult {
            output: SentenceTokens::new(output),
            ids,
            attention: stack_rows(&attention_rows),
            logprobs: stack_rows(&logp_rows),
        })
    }
}

fn argmax_excluding(row: ndarray::ArrayView1<f64>, skip: u32) -> u32 {
    let mut best = (usize::MAX, f64::NEG_INFINITY);
    for (j, &v) in row.iter().enumerate() {
        if j as u32 != skip && (best.0 == usize::MAX || v > best.1) {
            best = (j, v);
        }
    }
    best.0 as u32
}

fn stack_rows(rows: &[Array1<f64>]) -> Array2<f64> {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut out = Array2::zeros((rows.len(), cols));
    for (i, r) in rows.iter().enumerate() {
        out.row_mut(i).assign(r);
    }
    out
}

/// Loss of `model` on each pair, averaged; a quick diagnostic.
pub fn mean_nll(model: &ToyModel, pairs: &[(SentenceTokens, SentenceTokens)], smoothing: f64) -> Result<f64> {
    let mut total = 0.0;
    for (x, y) in pairs {
        total += model.nll_loss(x, y, smoothing)?;
    }
    Ok(total / pairs.len().max(1) as f64)
}
