use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::rng::RngState;

/// Model dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub d_emb: usize,
    pub d_hid: usize,
    /// Rows of the learned position tables; later positions share the last row.
    pub max_positions: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            d_emb: 16,
            d_hid: 32,
            max_positions: 16,
        }
    }
}

/// All trainable weights.
///
/// Row-vector convention: a hidden state is `x · W + b` with `W` shaped
/// `(inputs, outputs)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub src_emb: Array2<f64>,
    pub tgt_emb: Array2<f64>,
    pub src_pos: Array2<f64>,
    pub tgt_pos: Array2<f64>,
    pub enc_w: Array2<f64>,
    pub enc_b: Array1<f64>,
    pub dec_wh: Array2<f64>,
    pub dec_wi: Array2<f64>,
    pub dec_b: Array1<f64>,
    pub out_w: Array2<f64>,
    pub out_b: Array1<f64>,
}

/// Shape and row-major data of one tensor.
pub type TensorView<'a> = (Vec<usize>, &'a [f64]);

pub const TENSOR_NAMES: [&str; 11] = [
    "src_emb", "tgt_emb", "src_pos", "tgt_pos", "enc_w", "enc_b", "dec_wh", "dec_wi", "dec_b", "out_w", "out_b",
];

fn gaussian(rng: &mut RngState, rows: usize, cols: usize, std: f64) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || std * rng.normal())
}

impl ModelParams {
    pub fn zeros(config: ModelConfig, src_vocab: usize, tgt_vocab: usize) -> Self {
        let (e, h, p) = (config.d_emb, config.d_hid, config.max_positions);
        ModelParams {
            src_emb: Array2::zeros((src_vocab, e)),
            tgt_emb: Array2::zeros((tgt_vocab, e)),
            src_pos: Array2::zeros((p, e)),
            tgt_pos: Array2::zeros((p, e)),
            enc_w: Array2::zeros((e, h)),
            enc_b: Array1::zeros(h),
            dec_wh: Array2::zeros((h, h)),
            dec_wi: Array2::zeros((e, h)),
            dec_b: Array1::zeros(h),
            out_w: Array2::zeros((2 * h, tgt_vocab)),
            out_b: Array1::zeros(tgt_vocab),
        }
    }

    /// Gaussian initialization scaled by fan-in; biases start at zero.
    pub fn init(config: ModelConfig, src_vocab: usize, tgt_vocab: usize, rng: &mut RngState) -> Self {
        let (e, h, p) = (config.d_emb, config.d_hid, config.max_positions);
        let emb_std = 0.1;
        ModelParams {
            src_emb: gaussian(rng, src_vocab, e, emb_std),
            tgt_emb: gaussian(rng, tgt_vocab, e, emb_std),
            src_pos: gaussian(rng, p, e, emb_std),
            tgt_pos: gaussian(rng, p, e, emb_std),
            enc_w: gaussian(rng, e, h, 1.0 / (e as f64).sqrt()),
            enc_b: Array1::zeros(h),
            dec_wh: gaussian(rng, h, h, 1.0 / (h as f64).sqrt()),
            dec_wi: gaussian(rng, e, h, 1.0 / (e as f64).sqrt()),
            dec_b: Array1::zeros(h),
            out_w: gaussian(rng, 2 * h, tgt_vocab, 1.0 / (2.0 * h as f64).sqrt()),
            out_b: Array1::zeros(tgt_vocab),
        }
    }

    pub fn config(&self) -> ModelConfig {
        ModelConfig {
            d_emb: self.src_emb.ncols(),
            d_hid: self.enc_w.ncols(),
            max_positions: self.src_pos.nrows(),
        }
    }

    pub fn src_vocab_size(&self) -> usize {
        self.src_emb.nrows()
    }

    pub fn tgt_vocab_size(&self) -> usize {
        self.tgt_emb.nrows()
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.config(), self.src_vocab_size(), self.tgt_vocab_size())
    }

    /// Checks that every tensor agrees with the embedding-table dimensions.
    pub fn check_shapes(&self) -> Result<(), String> {
        let expected = Self::zeros(self.config(), self.src_vocab_size(), self.tgt_vocab_size());
        for ((name, a), (_, b)) in self.tensors().into_iter().zip(expected.tensors()) {
            if a.0 != b.0 {
                return Err(format!("{name}: shape {:?}, expected {:?}", a.0, b.0));
            }
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|(_, (_, data))| data.iter().all(|v| v.is_finite()))
    }

    /// `(name, (shape, data))` for every tensor in a fixed order.
    pub fn tensors(&self) -> Vec<(&'static str, TensorView<'_>)> {
        fn two(a: &Array2<f64>) -> (Vec<usize>, &[f64]) {
            (a.shape().to_vec(), a.as_slice().expect("standard layout"))
        }
        fn one(a: &Array1<f64>) -> (Vec<usize>, &[f64]) {
            (a.shape().to_vec(), a.as_slice().expect("standard layout"))
        }
        vec![
            ("src_emb", two(&self.src_emb)),
            ("tgt_emb", two(&self.tgt_emb)),
            ("src_pos", two(&self.src_pos)),
            ("tgt_pos", two(&self.tgt_pos)),
            ("enc_w", two(&self.enc_w)),
            ("enc_b", one(&self.enc_b)),
            ("dec_wh", two(&self.dec_wh)),
            ("dec_wi", two(&self.dec_wi)),
            ("dec_b", one(&self.dec_b)),
            ("out_w", two(&self.out_w)),
            ("out_b", one(&self.out_b)),
        ]
    }

    pub fn tensors_mut(&mut self) -> Vec<(&'static str, &mut [f64])> {
        vec![
            ("src_emb", self.src_emb.as_slice_mut().expect("standard layout")),
            ("tgt_emb", self.tgt_emb.as_slice_mut().expect("standard layout")),
            ("src_pos", self.src_pos.as_slice_mut().expect("standard layout")),
            ("tgt_pos", self.tgt_pos.as_slice_mut().expect("standard layout")),
            ("enc_w", self.enc_w.as_slice_mut().expect("standard layout")),
            ("enc_b", self.enc_b.as_slice_mut().expect("standard layout")),
            ("dec_wh", self.dec_wh.as_slice_mut().expect("standard layout")),
            ("dec_wi", self.dec_wi.as_slice_mut().expect("standard layout")),
            ("dec_b", self.dec_b.as_slice_mut().expect("standard layout")),
            ("out_w", self.out_w.as_slice_mut().expect("standard layout")),
            ("out_b", self.out_b.as_slice_mut().expect("standard layout")),
        ]
    }

    /// `self += scale * other`, tensor by tensor.
    pub fn add_scaled(&mut self, other: &ModelParams, scale: f64) {
        for ((_, dst), (_, (_, src))) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += scale * s;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for (_, t) in self.tensors_mut() {
            t.iter_mut().for_each(|v| *v *= factor);
        }
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|(_, (_, d))| d.len()).sum()
    }
}
