//! Losses over per-step log-distributions and their logit gradients.

use ndarray::{Array2, ArrayView1};

/// `1 - p` is clamped here before taking its log.
pub const ADV_CLAMP: f64 = 1e-12;

/// Cross-entropy against `(1 - ε)·onehot(gold) + ε/|V|` for one step.
pub fn smoothed_cross_entropy(logp: ArrayView1<f64>, gold: u32, smoothing: f64) -> f64 {
    let hit = -(1.0 - smoothing) * logp[gold as usize];
    if smoothing == 0.0 {
        return hit;
    }
    hit - smoothing * logp.sum() / logp.len() as f64
}

/// Mean smoothed cross-entropy over steps, with its gradient wrt logits.
pub fn nll_with_grad(logp: &Array2<f64>, gold: &[u32], smoothing: f64) -> (f64, Array2<f64>) {
    let t_len = gold.len() as f64;
    let v = logp.ncols() as f64;
    let mut loss = 0.0;
    let mut grad = logp.mapv(f64::exp);
    for (t, (&g, mut row)) in gold.iter().zip(grad.rows_mut()).enumerate() {
        loss += smoothed_cross_entropy(logp.row(t), g, smoothing);
        row.mapv_inplace(|p| (p - smoothing / v) / t_len);
        row[g as usize] -= (1.0 - smoothing) / t_len;
    }
    (loss / t_len, grad)
}

/// `Σ_t log(1 - p(gold_t))` with its gradient wrt logits. Steps where
/// `1 - p` falls below [`ADV_CLAMP`] contribute `ln(ADV_CLAMP)` and no
/// gradient.
pub fn adv_with_grad(logp: &Array2<f64>, gold: &[u32]) -> (f64, Array2<f64>) {
    let mut loss = 0.0;
    let mut grad = Array2::zeros(logp.raw_dim());
    for (t, &g) in gold.iter().enumerate() {
        let lp = logp[[t, g as usize]];
        let p_gold = lp.exp();
        let miss = -lp.exp_m1();
        if miss < ADV_CLAMP {
            loss += ADV_CLAMP.ln();
            continue;
        }
        loss += miss.ln();
        // d log(1 - p_g) / d o_j = -p_g (δ_jg - p_j) / (1 - p_g)
        let factor = p_gold / miss;
        let mut row = grad.row_mut(t);
        for (j, r) in row.iter_mut().enumerate() {
            *r = factor * logp[[t, j]].exp();
        }
        row[g as usize] -= factor;
    }
    (loss, grad)
}
