//! Forward and reverse passes of the encoder-decoder.
//!
//! Encoder: `h_i = tanh((e_i + p_i) · W_enc + b_enc)`, position by position.
//! Decoder: `s_t = tanh(s_{t-1} · W_h + (u_t + q_t) · W_in + b_dec)` with
//! `s_0 = 0`, where `u_t` embeds the previous target token and `q_t` its
//! position. Attention weights are `softmax_i(s_t · h_i)`, the context is
//! `c_t = Σ_i α_ti h_i`, and logits are `[s_t; c_t] · W_out + b_out`.
//!
//! The recurrence does not consume the context vector, so under teacher
//! forcing all attention and output computations batch over time steps.

use ndarray::{concatenate, s, Array1, Array2, ArrayView1, ArrayView2, Axis};

use super::params::ModelParams;

pub(crate) fn tanh_in_place(a: &mut Array2<f64>) {
    a.mapv_inplace(f64::tanh);
}

/// Row-wise log-softmax.
pub(crate) fn log_softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut out = logits.clone();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let lse = max + row.fold(0.0, |acc, &v| acc + (v - max).exp()).ln();
        row.mapv_inplace(|v| v - lse);
    }
    out
}

/// Row-wise softmax.
pub(crate) fn softmax_rows(scores: &Array2<f64>) -> Array2<f64> {
    let mut out = scores.clone();
    for mut row in out.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let z = row.sum();
        row.mapv_inplace(|v| v / z);
    }
    out
}

fn position(params: &ModelParams, i: usize) -> usize {
    i.min(params.src_pos.nrows() - 1)
}

/// Encoder activations.
#[derive(Debug, Clone)]
pub struct Encoded {
    /// Word vectors plus position vectors, `n × d_emb`.
    pub inputs: Array2<f64>,
    /// Encoder states, `n × d_hid`.
    pub states: Array2<f64>,
}

pub fn encode(params: &ModelParams, word_vectors: ArrayView2<f64>) -> Encoded {
    let n = word_vectors.nrows();
    let mut inputs = word_vectors.to_owned();
    for i in 0..n {
        let p = position(params, i);
        let mut row = inputs.row_mut(i);
        row += &params.src_pos.row(p);
    }
    let mut states = inputs.dot(&params.enc_w);
    states += &params.enc_b;
    tanh_in_place(&mut states);
    Encoded { inputs, states }
}

/// Decoder input vector (token embedding plus position) for step `t`.
pub(crate) fn decoder_input(params: &ModelParams, token: u32, t: usize) -> Array1<f64> {
    let p = t.min(params.tgt_pos.nrows() - 1);
    &params.tgt_emb.row(token as usize) + &params.tgt_pos.row(p)
}

pub(crate) fn recur(params: &ModelParams, prev: ArrayView1<f64>, input: ArrayView1<f64>) -> Array1<f64> {
    let mut z = prev.dot(&params.dec_wh);
    z += &input.dot(&params.dec_wi);
    z += &params.dec_b;
    z.mapv_inplace(f64::tanh);
    z
}

/// Attention, context and output log-probabilities for a block of decoder
/// states (`T × d_hid`).
pub(crate) fn readout(
    params: &ModelParams,
    enc: &Encoded,
    states: ArrayView2<f64>,
) -> (Array2<f64>, Array2<f64>, Array2<f64>) {
    let scores = states.dot(&enc.states.t());
    let alpha = softmax_rows(&scores);
    let context = alpha.dot(&enc.states);
    let joined = concatenate(Axis(1), &[states, context.view()]).expect("same row count");
    let mut logits = joined.dot(&params.out_w);
    logits += &params.out_b;
    (alpha, context, log_softmax_rows(&logits))
}

/// Everything the reverse pass needs from a teacher-forced forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub enc: Encoded,
    /// Decoder input token ids (`BOS, y_1 .. y_{T-1}`).
    pub inputs: Vec<u32>,
    /// Decoder input vectors, `T × d_emb`.
    pub dec_inputs: Array2<f64>,
    /// Decoder states `s_0 .. s_T`, `(T + 1) × d_hid`, `s_0 = 0`.
    pub states: Array2<f64>,
    pub alpha: Array2<f64>,
    pub context: Array2<f64>,
    /// Per-step log-distributions, `T × |V_tgt|`.
    pub logp: Array2<f64>,
}

/// Teacher-forced forward pass from explicit source word vectors.
pub fn forward(params: &ModelParams, word_vectors: ArrayView2<f64>, inputs: &[u32]) -> ForwardCache {
    let enc = encode(params, word_vectors);
    let t_len = inputs.len();
    let (e, h) = (params.src_emb.ncols(), params.enc_w.ncols());
    let mut dec_inputs = Array2::zeros((t_len, e));
    let mut states = Array2::zeros((t_len + 1, h));
    for (t, &tok) in inputs.iter().enumerate() {
        let v = decoder_input(params, tok, t);
        let s_next = recur(params, states.row(t), v.view());
        dec_inputs.row_mut(t).assign(&v);
        states.row_mut(t + 1).assign(&s_next);
    }
    let (alpha, context, logp) = readout(params, &enc, states.slice(s![1.., ..]));
    ForwardCache {
        enc,
        inputs: inputs.to_vec(),
        dec_inputs,
        states,
        alpha,
        context,
        logp,
    }
}

/// Reverse pass. `dlogits` is the loss gradient with respect to the output
/// logits (`T × |V_tgt|`). Parameter gradients are accumulated into `grads`
/// when given, with source-embedding rows addressed by `src_ids`. Returns the
/// gradient with respect to the source word vectors (`n × d_emb`).
pub fn backward(
    params: &ModelParams,
    cache: &ForwardCache,
    dlogits: &Array2<f64>,
    grads: Option<(&mut ModelParams, &[u32])>,
) -> Array2<f64> {
    let h_dim = params.enc_w.ncols();
    let t_len = cache.inputs.len();
    let states = cache.states.slice(s![1.., ..]);
    let prev_states = cache.states.slice(s![..t_len, ..]);
    let enc_states = &cache.enc.states;

    // Output projection.
    let d_joined = dlogits.dot(&params.out_w.t());
    let ds_out = d_joined.slice(s![.., ..h_dim]);
    let dc = d_joined.slice(s![.., h_dim..]);

    // Attention.
    let dalpha = dc.dot(&enc_states.t());
    let mut dscore = dalpha.clone();
    for (mut row, a) in dscore.rows_mut().into_iter().zip(cache.alpha.rows()) {
        let inner = row.dot(&a);
        row.zip_mut_with(&a, |d, &w| *d = w * (*d - inner));
    }
    let mut d_enc = cache.alpha.t().dot(&dc);
    d_enc += &dscore.t().dot(&states);
    let ds_direct = &ds_out + &dscore.dot(enc_states);

    // Recurrence, newest step first.
    let mut dz = Array2::<f64>::zeros((t_len, h_dim));
    let mut carry = Array1::<f64>::zeros(h_dim);
    for t in (0..t_len).rev() {
        let s_t = states.row(t);
        let mut d = &ds_direct.row(t) + &carry;
        d.zip_mut_with(&s_t, |g, &sv| *g *= 1.0 - sv * sv);
        carry = params.dec_wh.dot(&d);
        dz.row_mut(t).assign(&d);
    }

    // Encoder.
    let mut d_pre = d_enc;
    d_pre.zip_mut_with(enc_states, |g, &hv| *g *= 1.0 - hv * hv);
    let d_inputs = d_pre.dot(&params.enc_w.t());

    if let Some((g, src_ids)) = grads {
        let joined = concatenate(Axis(1), &[states, cache.context.view()]).expect("same row count");
        g.out_w += &joined.t().dot(dlogits);
        g.out_b += &dlogits.sum_axis(Axis(0));

        g.dec_wh += &prev_states.t().dot(&dz);
        g.dec_wi += &cache.dec_inputs.t().dot(&dz);
        g.dec_b += &dz.sum_axis(Axis(0));
        let d_dec_inputs = dz.dot(&params.dec_wi.t());
        let last = params.tgt_pos.nrows() - 1;
        for (t, &tok) in cache.inputs.iter().enumerate() {
            let row = d_dec_inputs.row(t);
            let mut e = g.tgt_emb.row_mut(tok as usize);
            e += &row;
            let mut p = g.tgt_pos.row_mut(t.min(last));
            p += &row;
        }

        g.enc_w += &cache.enc.inputs.t().dot(&d_pre);
        g.enc_b += &d_pre.sum_axis(Axis(0));
        for (i, &id) in src_ids.iter().enumerate() {
            let row = d_inputs.row(i);
            let mut e = g.src_emb.row_mut(id as usize);
            e += &row;
            let mut p = g.src_pos.row_mut(position(params, i));
            p += &row;
        }
    }
    d_inputs
}
