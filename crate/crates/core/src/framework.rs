//! Source similarity, target relative score decrease and attack success.
//!
//! An attack is judged on two axes: how much of the source meaning survives
//! the perturbation (`s_src`) and how much of the target quality it destroys
//! relative to the unperturbed translation (`d_tgt`). Their sum is the
//! success value; an attack succeeds when it is strictly greater than 1, that
//! is when the target lost more than the source did.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::SimilarityMetric;
use crate::text::{SentenceTokens, Token};

/// One substitution applied by an attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Swap {
    pub position: usize,
    pub original: Token,
    pub replacement: Token,
    #[serde(default)]
    pub score: f64,
    #[serde(default)]
    pub loss_before: f64,
    #[serde(default)]
    pub loss_after: f64,
}

/// Inputs and outputs of one attacked sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackRecord {
    #[serde(rename = "src")]
    pub x: SentenceTokens,
    #[serde(rename = "adv_src")]
    pub x_adv: SentenceTokens,
    #[serde(rename = "ref")]
    pub y: SentenceTokens,
    #[serde(rename = "base_out")]
    pub y_base: SentenceTokens,
    #[serde(rename = "adv_out")]
    pub y_adv: SentenceTokens,
    #[serde(default)]
    pub swaps: Vec<Swap>,
}

impl AttackRecord {
    pub fn validate(&self) -> Result<()> {
        if self.x.is_empty() || self.x_adv.is_empty() || self.y.is_empty() {
            return Err(Error::InvalidArgument("src, adv_src and ref must be non-empty".into()));
        }
        if self.x.len() != self.x_adv.len() {
            return Err(Error::LengthMismatch {
                left: self.x.len(),
                right: self.x_adv.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredRecord {
    pub s_src: f64,
    pub s_tgt_base: f64,
    pub s_tgt_adv: f64,
    pub d_tgt: f64,
    pub success_value: f64,
    pub is_success: bool,
}

fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::OutOfRange { what, value });
    }
    Ok(())
}

/// Relative drop of the target similarity, clipped at zero. A base score of
/// zero cannot be degraded further and yields zero.
pub fn target_relative_decrease(s_tgt_base: f64, s_tgt_adv: f64) -> Result<f64> {
    check_unit("s_tgt_base", s_tgt_base)?;
    check_unit("s_tgt_adv", s_tgt_adv)?;
    if s_tgt_adv >= s_tgt_base || s_tgt_base == 0.0 {
        return Ok(0.0);
    }
    Ok(((s_tgt_base - s_tgt_adv) / s_tgt_base).clamp(0.0, 1.0))
}

/// `(s_src + d_tgt, s_src + d_tgt > 1)`.
pub fn attack_success(s_src: f64, d_tgt: f64) -> Result<(f64, bool)> {
    check_unit("s_src", s_src)?;
    check_unit("d_tgt", d_tgt)?;
    // d > 1 - s and s + d > 1 can disagree by one ulp; the former is the
    // definition.
    Ok((s_src + d_tgt, d_tgt > 1.0 - s_src))
}

fn similarity(metric: &dyn SimilarityMetric, hyp: &SentenceTokens, reference: &SentenceTokens) -> Result<f64> {
    if hyp.is_empty() {
        return Ok(0.0);
    }
    Ok((metric.sentence_score(hyp, reference)? / 100.0).clamp(0.0, 1.0))
}

pub fn score_record(record: &AttackRecord, metric: &dyn SimilarityMetric) -> Result<ScoredRecord> {
    record.validate()?;
    let s_src = similarity(metric, &record.x_adv, &record.x)?;
    let s_tgt_base = similarity(metric, &record.y_base, &record.y)?;
    let s_tgt_adv = similarity(metric, &record.y_adv, &record.y)?;
    let d_tgt = target_relative_decrease(s_tgt_base, s_tgt_adv)?;
    let (success_value, is_success) = attack_success(s_src, d_tgt)?;
    Ok(ScoredRecord {
        s_src,
        s_tgt_base,
        s_tgt_adv,
        d_tgt,
        success_value,
        is_success,
    })
}

/// Corpus-level aggregates, all on a 0..=100 scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportAggregates {
    /// Corpus score of the unperturbed translations.
    pub original_corpus: f64,
    /// Corpus score of the adversarial translations.
    pub adversarial_corpus: f64,
    /// Mean sentence-level source similarity.
    pub mean_source: f64,
    /// Corpus-level source similarity.
    pub corpus_source: f64,
    /// Mean target relative decrease.
    pub mean_relative_decrease: f64,
    pub mean_success_value: f64,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub metric: String,
    pub rows: Vec<ScoredRecord>,
    pub aggregates: ReportAggregates,
}

impl EvaluationReport {
    /// Recomputes the aggregates that are plain means of per-record rows.
    pub fn recompute_means(rows: &[ScoredRecord]) -> (f64, f64, f64, f64) {
        let n = rows.len() as f64;
        let mean = |f: fn(&ScoredRecord) -> f64| 100.0 * rows.iter().map(f).sum::<f64>() / n;
        (
            mean(|r| r.s_src),
            mean(|r| r.d_tgt),
            rows.iter().map(|r| r.success_value).sum::<f64>() / n,
            mean(|r| if r.is_success { 1.0 } else { 0.0 }),
        )
    }

    /// Aligned-column summary.
    pub fn to_text(&self, label: &str) -> String {
        let a = &self.aggregates;
        let metric = &self.metric;
        let mut out = String::new();
        let _ = writeln!(out, "{:<28}{:>12}", "configuration", label);
        let _ = writeln!(out, "{:<28}{:>12}", "sentences", self.rows.len());
        let _ = writeln!(
            out,
            "{:<28}{:>12.2}",
            format!("original {metric} (corpus)"),
            a.original_corpus
        );
        let _ = writeln!(
            out,
            "{:<28}{:>12.2}",
            format!("adversarial {metric} (corpus)"),
            a.adversarial_corpus
        );
        let _ = writeln!(
            out,
            "{:<28}{:>12.2}",
            format!("target RD{metric}"),
            a.mean_relative_decrease
        );
        let _ = writeln!(out, "{:<28}{:>12.2}", format!("source {metric} (mean)"), a.mean_source);
        let _ = writeln!(
            out,
            "{:<28}{:>12.2}",
            format!("source {metric} (corpus)"),
            a.corpus_source
        );
        let _ = writeln!(out, "{:<28}{:>12.4}", "mean success S", a.mean_success_value);
        let _ = writeln!(out, "{:<28}{:>11.2}%", "success rate", a.success_rate);
        out
    }

    /// One row per record: source similarity and target relative decrease on
    /// a 0..=100 scale, tagged with the configuration label.
    pub fn to_csv(&self, label: &str) -> String {
        let mut out = String::from("config,index,s_src,d_tgt,s_tgt_base,s_tgt_adv,success_value,is_success\n");
        for (i, r) in self.rows.iter().enumerate() {
            let _ = writeln!(
                out,
                "{label},{i},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
                100.0 * r.s_src,
                100.0 * r.d_tgt,
                100.0 * r.s_tgt_base,
                100.0 * r.s_tgt_adv,
                r.success_value,
                r.is_success
            );
        }
        out
    }
}

pub fn build_report(records: &[AttackRecord], metric: &dyn SimilarityMetric) -> Result<EvaluationReport> {
    if records.is_empty() {
        return Err(Error::InvalidArgument("no records to evaluate".into()));
    }
    let rows = records
        .iter()
        .map(|r| score_record(r, metric))
        .collect::<Result<Vec<_>>>()?;
    let (mean_source, mean_relative_decrease, mean_success_value, success_rate) =
        EvaluationReport::recompute_means(&rows);

    let refs: Vec<_> = records.iter().map(|r| r.y.clone()).collect();
    let base: Vec<_> = records.iter().map(|r| r.y_base.clone()).collect();
    let adv: Vec<_> = records.iter().map(|r| r.y_adv.clone()).collect();
    let srcs: Vec<_> = records.iter().map(|r| r.x.clone()).collect();
    let adv_srcs: Vec<_> = records.iter().map(|r| r.x_adv.clone()).collect();

    let aggregates = ReportAggregates {
        original_corpus: metric.corpus_score(&base, &refs)?,
        adversarial_corpus: metric.corpus_score(&adv, &refs)?,
        mean_source,
        corpus_source: metric.corpus_score(&adv_srcs, &srcs)?,
        mean_relative_decrease,
        mean_success_value,
        success_rate,
    };
    Ok(EvaluationReport {
        metric: metric.name().to_string(),
        rows,
        aggregates,
    })
}

/// Serializes records one JSON object per line.
pub fn records_to_jsonl(records: &[AttackRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

/// Parses JSON-lines records. Lines starting with `#` are headers and are
/// skipped. Errors carry 1-based line numbers.
pub fn records_from_jsonl(text: &str, source_name: &str) -> Result<Vec<AttackRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let record: AttackRecord =
            serde_json::from_str(line).map_err(|e| Error::parse(source_name, i + 1, e.to_string()))?;
        record
            .validate()
            .map_err(|e| Error::parse(source_name, i + 1, e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}
