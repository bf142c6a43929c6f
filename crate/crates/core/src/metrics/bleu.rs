use super::{check_lengths, Level, MetricKind, MetricScore, NGramProfile};
use crate::error::{Error, Result};
use crate::text::{SentenceTokens, Token};

/// Word n-gram statistics for BLEU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BleuStats {
    pub matched: Vec<u64>,
    pub total: Vec<u64>,
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    fn zeros(max_order: usize) -> Self {
        BleuStats {
            matched: vec![0; max_order],
            total: vec![0; max_order],
            hyp_len: 0,
            ref_len: 0,
        }
    }

    pub fn compute(hypothesis: &SentenceTokens, reference: &SentenceTokens, max_order: usize) -> Result<Self> {
        if reference.is_empty() {
            return Err(Error::EmptyReference);
        }
        if max_order == 0 {
            return Err(Error::InvalidArgument("max_order must be positive".into()));
        }
        let h = NGramProfile::<Token>::new(hypothesis.tokens(), max_order);
        let r = NGramProfile::<Token>::new(reference.tokens(), max_order);
        let mut stats = Self::zeros(max_order);
        for n in 1..=max_order {
            stats.total[n - 1] = h.total(n);
            stats.matched[n - 1] = h.matches(&r, n);
        }
        stats.hyp_len = hypothesis.len() as u64;
        stats.ref_len = reference.len() as u64;
        Ok(stats)
    }

    fn add(&mut self, other: &BleuStats) {
        for n in 0..self.total.len() {
            self.matched[n] += other.matched[n];
            self.total[n] += other.total[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// BLEU over the orders the hypothesis reaches. With `smooth`, an order
    /// with no matches gets precision `1 / (2^k * total)`, `k` counting the
    /// zero-match orders seen so far.
    pub fn score(&self, smooth: bool) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        let mut effective = 0usize;
        let mut smoothing = 1.0;
        for n in 0..self.total.len() {
            if self.total[n] == 0 {
                break;
            }
            effective += 1;
            let p = if self.matched[n] > 0 {
                self.matched[n] as f64 / self.total[n] as f64
            } else if smooth {
                smoothing *= 2.0;
                1.0 / (smoothing * self.total[n] as f64)
            } else {
                return 0.0;
            };
            log_sum += p.ln();
        }
        let bp = if self.hyp_len < self.ref_len {
            (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp()
        } else {
            1.0
        };
        100.0 * bp * (log_sum / effective as f64).exp()
    }
}

/// BLEU of a single pair. Sentence level is smoothed; corpus level over a
/// single pair is not.
pub fn bleu(
    hypothesis: &SentenceTokens,
    reference: &SentenceTokens,
    max_order: usize,
    level: Level,
) -> Result<MetricScore> {
    let stats = BleuStats::compute(hypothesis, reference, max_order)?;
    let value = stats.score(level == Level::Sentence);
    Ok(MetricScore::new(value, MetricKind::Bleu, level))
}

/// Unsmoothed corpus BLEU from counts aggregated over all pairs.
pub fn corpus_bleu(
    hypotheses: &[SentenceTokens],
    references: &[SentenceTokens],
    max_order: usize,
) -> Result<MetricScore> {
    check_lengths(hypotheses.len(), references.len())?;
    let mut total = BleuStats::zeros(max_order);
    for (h, r) in hypotheses.iter().zip(references) {
        total.add(&BleuStats::compute(h, r, max_order)?);
    }
    Ok(MetricScore::new(total.score(false), MetricKind::Bleu, Level::Corpus))
}
