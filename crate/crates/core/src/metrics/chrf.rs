use super::{check_lengths, Level, MetricKind, MetricScore, NGramProfile};
use crate::error::{Error, Result};
use crate::text::SentenceTokens;

pub const CHRF_ORDER: usize = 6;
pub const CHRF_BETA: f64 = 2.0;

/// Per-order character n-gram counts: hypothesis total, reference total and
/// clipped matches. Corpus scores sum these before computing F.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChrfStats {
    pub hyp: Vec<u64>,
    pub reference: Vec<u64>,
    pub matched: Vec<u64>,
}

impl ChrfStats {
    fn zeros(max_order: usize) -> Self {
        ChrfStats {
            hyp: vec![0; max_order],
            reference: vec![0; max_order],
            matched: vec![0; max_order],
        }
    }

    fn add(&mut self, other: &ChrfStats) {
        for n in 0..self.hyp.len() {
            self.hyp[n] += other.hyp[n];
            self.reference[n] += other.reference[n];
            self.matched[n] += other.matched[n];
        }
    }

    /// Mean per-order F-beta over the orders that both sides reach, times 100.
    pub fn score(&self, beta: f64) -> f64 {
        let b2 = beta * beta;
        let mut sum = 0.0;
        let mut effective = 0usize;
        for n in 0..self.hyp.len() {
            if self.hyp[n] == 0 || self.reference[n] == 0 {
                continue;
            }
            effective += 1;
            let p = self.matched[n] as f64 / self.hyp[n] as f64;
            let r = self.matched[n] as f64 / self.reference[n] as f64;
            if p + r > 0.0 {
                sum += (1.0 + b2) * p * r / (b2 * p + r);
            }
        }
        if effective == 0 {
            0.0
        } else {
            100.0 * sum / effective as f64
        }
    }
}

fn chars(sentence: &SentenceTokens) -> Vec<char> {
    sentence.iter().flat_map(|t| t.as_str().chars()).collect()
}

pub fn chrf_stats(hypothesis: &SentenceTokens, reference: &SentenceTokens, max_order: usize) -> Result<ChrfStats> {
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    if max_order == 0 {
        return Err(Error::InvalidArgument("max_order must be positive".into()));
    }
    let h = NGramProfile::new(&chars(hypothesis), max_order);
    let r = NGramProfile::new(&chars(reference), max_order);
    let mut stats = ChrfStats::zeros(max_order);
    for n in 1..=max_order {
        stats.hyp[n - 1] = h.total(n);
        stats.reference[n - 1] = r.total(n);
        stats.matched[n - 1] = h.matches(&r, n);
    }
    Ok(stats)
}

/// Sentence-level chrF. Token boundaries are ignored: characters of all
/// tokens are concatenated before n-gram extraction.
pub fn chrf(
    hypothesis: &SentenceTokens,
    reference: &SentenceTokens,
    max_order: usize,
    beta: f64,
) -> Result<MetricScore> {
    let stats = chrf_stats(hypothesis, reference, max_order)?;
    Ok(MetricScore::new(stats.score(beta), MetricKind::Chrf, Level::Sentence))
}

/// Corpus chrF from n-gram statistics summed over all pairs.
pub fn corpus_chrf(
    hypotheses: &[SentenceTokens],
    references: &[SentenceTokens],
    max_order: usize,
    beta: f64,
) -> Result<MetricScore> {
    check_lengths(hypotheses.len(), references.len())?;
    let mut total = ChrfStats::zeros(max_order);
    for (h, r) in hypotheses.iter().zip(references) {
        total.add(&chrf_stats(h, r, max_order)?);
    }
    Ok(MetricScore::new(total.score(beta), MetricKind::Chrf, Level::Corpus))
}
