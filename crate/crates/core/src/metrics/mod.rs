//! Sentence- and corpus-level similarity metrics.
//!
//! Scores are reported on a 0..=100 scale. The evaluation framework divides
//! by 100 before doing any arithmetic with them.

mod bleu;
mod chrf;
mod ngram;

pub use bleu::{bleu, corpus_bleu, BleuStats};
pub use chrf::{chrf, chrf_stats, corpus_chrf, ChrfStats, CHRF_BETA, CHRF_ORDER};
pub use ngram::NGramProfile;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::SentenceTokens;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Chrf,
    Bleu,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Chrf => "chrf",
            MetricKind::Bleu => "bleu",
        }
    }
}

impl std::str::FromStr for MetricKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chrf" => Ok(MetricKind::Chrf),
            "bleu" => Ok(MetricKind::Bleu),
            other => Err(Error::InvalidArgument(format!("unknown metric {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Sentence,
    Corpus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricScore {
    pub value: f64,
    pub kind: MetricKind,
    pub level: Level,
}

impl MetricScore {
    pub(crate) fn new(value: f64, kind: MetricKind, level: Level) -> Self {
        debug_assert!((0.0..=100.0 + 1e-9).contains(&value), "score {value}");
        MetricScore {
            value: value.clamp(0.0, 100.0),
            kind,
            level,
        }
    }

    /// The score on a 0..=1 scale.
    pub fn unit(&self) -> f64 {
        self.value / 100.0
    }
}

/// A sentence similarity measure usable as source or target similarity.
///
/// Implementations return scores on a 0..=100 scale. Third-party metrics
/// (METEOR, embedding similarity, ...) plug in through this trait.
pub trait SimilarityMetric: Send + Sync {
    fn name(&self) -> &str;

    fn sentence_score(&self, hypothesis: &SentenceTokens, reference: &SentenceTokens) -> Result<f64>;

    fn corpus_score(&self, hypotheses: &[SentenceTokens], references: &[SentenceTokens]) -> Result<f64>;
}

/// chrF with configurable order and beta.
#[derive(Debug, Clone, Copy)]
pub struct Chrf {
    pub max_order: usize,
    pub beta: f64,
}

impl Default for Chrf {
    fn default() -> Self {
        Chrf {
            max_order: CHRF_ORDER,
            beta: CHRF_BETA,
        }
    }
}

impl SimilarityMetric for Chrf {
    fn name(&self) -> &str {
        "chrf"
    }

    fn sentence_score(&self, hypothesis: &SentenceTokens, reference: &SentenceTokens) -> Result<f64> {
        Ok(chrf(hypothesis, reference, self.max_order, self.beta)?.value)
    }

    fn corpus_score(&self, hypotheses: &[SentenceTokens], references: &[SentenceTokens]) -> Result<f64> {
        Ok(corpus_chrf(hypotheses, references, self.max_order, self.beta)?.value)
    }
}

/// Word BLEU, smoothed at sentence level.
#[derive(Debug, Clone, Copy)]
pub struct Bleu {
    pub max_order: usize,
}

impl Default for Bleu {
    fn default() -> Self {
        Bleu { max_order: 4 }
    }
}

impl SimilarityMetric for Bleu {
    fn name(&self) -> &str {
        "bleu"
    }

    fn sentence_score(&self, hypothesis: &SentenceTokens, reference: &SentenceTokens) -> Result<f64> {
        Ok(bleu(hypothesis, reference, self.max_order, Level::Sentence)?.value)
    }

    fn corpus_score(&self, hypotheses: &[SentenceTokens], references: &[SentenceTokens]) -> Result<f64> {
        Ok(corpus_bleu(hypotheses, references, self.max_order)?.value)
    }
}

/// Boxed metric for a metric kind with default parameters.
pub fn metric_for(kind: MetricKind) -> Box<dyn SimilarityMetric> {
    match kind {
        MetricKind::Chrf => Box::new(Chrf::default()),
        MetricKind::Bleu => Box::new(Bleu::default()),
    }
}

pub(crate) fn check_lengths(h: usize, r: usize) -> Result<()> {
    if h != r {
        return Err(Error::LengthMismatch { left: h, right: r });
    }
    if h == 0 {
        return Err(Error::EmptyCorpus);
    }
    Ok(())
}
