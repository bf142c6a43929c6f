use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngState;

/// Pearson product-moment correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "correlation needs at least 3 points, got {}",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateSample);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn pearson_at(xs: &[f64], ys: &[f64], idx: &[usize]) -> Result<f64> {
    let a: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
    let b: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
    pearson(&a, &b)
}

/// Outcome of comparing two metrics' correlations with human scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub p_value: f64,
    /// Whether metric A correlates more strongly on the full sample.
    pub a_better: bool,
    pub r_a: f64,
    pub r_b: f64,
}

impl BootstrapResult {
    pub fn significant(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

pub const DEFAULT_RESAMPLES: usize = 1000;
pub const SIGNIFICANCE: f64 = 0.01;
const MAX_REDRAWS: usize = 100;

/// Paired bootstrap test on `r(human, a)` versus `r(human, b)`.
///
/// Every resample draws indices with replacement from its own RNG stream.
/// The p-value is the fraction of resamples in which the full-sample winner
/// does not come out strictly ahead. Resamples with zero variance are
/// redrawn, up to a fixed number of times.
pub fn paired_bootstrap_correlation_test(
    human: &[f64],
    metric_a: &[f64],
    metric_b: &[f64],
    resamples: usize,
    rng: &RngState,
) -> Result<BootstrapResult> {
    let n = human.len();
    if metric_a.len() != n || metric_b.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: if metric_a.len() != n {
                metric_a.len()
            } else {
                metric_b.len()
            },
        });
    }
    if n < 10 {
        return Err(Error::InvalidArgument(format!(
            "bootstrap needs at least 10 points, got {n}"
        )));
    }
    if resamples == 0 {
        return Err(Error::InvalidArgument("resamples must be at least 1".into()));
    }
    let r_a = pearson(human, metric_a)?;
    let r_b = pearson(human, metric_b)?;
    let a_better = r_a > r_b;

    let mut losses = 0usize;
    let mut idx = vec![0usize; n];
    for r in 0..resamples {
        let mut stream = rng.fork(r as u64);
        let mut tries = 0;
        let (ra, rb) = loop {
            for slot in idx.iter_mut() {
                *slot = stream.below(n);
            }
            match (pearson_at(human, metric_a, &idx), pearson_at(human, metric_b, &idx)) {
                (Ok(a), Ok(b)) => break (a, b),
                (Err(Error::DegenerateSample), _) | (_, Err(Error::DegenerateSample)) => {
                    tries += 1;
                    if tries >= MAX_REDRAWS {
                        return Err(Error::DegenerateSample);
                    }
                }
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        };
        let winner_wins = if a_better { ra > rb } else { rb > ra };
        if !winner_wins {
            losses += 1;
        }
    }
    Ok(BootstrapResult {
        p_value: losses as f64 / resamples as f64,
        a_better,
        r_a,
        r_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_lines() {
        let xs = [1.0, 2.0, 4.0, 7.0];
        let up: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        let down: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert!((pearson(&xs, &up).unwrap() - 1.0).abs() < 1e-12);
        assert!((pearson(&xs, &down).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_and_short() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateSample)
        ));
        assert!(pearson(&[1.0, 2.0], &[1.0, 2.0]).is_err());
        assert!(pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn single_resample_is_zero_or_one() {
        let h: Vec<f64> = (0..12).map(|i| (i % 6) as f64).collect();
        let a: Vec<f64> = h.iter().map(|v| v * 3.0).collect();
        let b: Vec<f64> = (0..12).map(|i| ((i * 7) % 5) as f64).collect();
        let r = paired_bootstrap_correlation_test(&h, &a, &b, 1, &RngState::new(3)).unwrap();
        assert!(r.p_value == 0.0 || r.p_value == 1.0);
    }

    #[test]
    fn identical_metrics_never_significant() {
        let h: Vec<f64> = (0..20).map(|i| (i % 6) as f64).collect();
        let a: Vec<f64> = (0..20).map(|i| ((i * 3) % 7) as f64 + 0.5 * (i % 6) as f64).collect();
        let r = paired_bootstrap_correlation_test(&h, &a, &a, 200, &RngState::new(1)).unwrap();
        assert!(r.p_value > 0.1);
    }
}
