//! Human-judgment study: ratings, adjudication, and how well automatic
//! metrics agree with the final ratings.

mod annotation;
mod stats;

pub use annotation::{
    adjudicate, final_ratings, items_from_tsv, items_to_tsv, ratings_from_tsv, ratings_to_tsv, sample_annotation_batch,
    AdjudicatedRating, AnnotationItem, AttackOutput, ItemConstraint, Provenance, Rating, RatingRow, AUDITOR,
    ITEMS_HEADER, RATINGS_HEADER, RUBRIC, RUBRIC_QUESTION,
};
pub use stats::{paired_bootstrap_correlation_test, pearson, BootstrapResult, DEFAULT_RESAMPLES, SIGNIFICANCE};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngState;
use crate::text::Side;

/// Strata smaller than this are not correlated.
pub const MIN_STRATUM: usize = 3;

/// Strata smaller than this get coefficients but no significance test.
pub const MIN_BOOTSTRAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Cell {
    /// `better` is set when the coefficient beats the next-ranked metric's
    /// at the significance threshold.
    Value {
        r: f64,
        better: bool,
    },
    Insufficient,
    Degenerate,
}

impl Cell {
    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Value { r, .. } => Some(*r),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Value { r, better } => format!("{r:.3}{}", if *better { "*" } else { "" }),
            Cell::Insufficient => "insufficient data".into(),
            Cell::Degenerate => "degenerate".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumRow {
    pub label: String,
    pub n: usize,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub metrics: Vec<String>,
    pub rows: Vec<StratumRow>,
}

impl CorrelationReport {
    pub fn to_text(&self) -> String {
        let mut header = vec!["stratum".to_string(), "n".to_string()];
        header.extend(self.metrics.iter().cloned());
        let mut table = vec![header];
        for row in &self.rows {
            let mut line = vec![row.label.clone(), row.n.to_string()];
            line.extend(row.cells.iter().map(Cell::render));
            table.push(line);
        }
        let widths: Vec<usize> = (0..table[0].len())
            .map(|c| table.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for line in &table {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(c, (v, w))| if c == 0 { format!("{v:<w$}") } else { format!("{v:>w$}") })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "* significantly above the next-ranked metric (paired bootstrap, p < {SIGNIFICANCE})"
        );
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("stratum,n,metric,r,better,status\n");
        for row in &self.rows {
            for (m, cell) in self.metrics.iter().zip(&row.cells) {
                let (r, better, status) = match cell {
                    Cell::Value { r, better } => (format!("{r:.6}"), better.to_string(), "ok"),
                    Cell::Insufficient => (String::new(), String::new(), "insufficient data"),
                    Cell::Degenerate => (String::new(), String::new(), "degenerate"),
                };
                let _ = writeln!(out, "{},{},{},{},{},{}", row.label, row.n, m, r, better, status);
            }
        }
        out
    }
}

fn side_label(side: Side) -> &'static str {
    match side {
        Side::Source => "source",
        Side::Target => "target",
    }
}

/// Pearson correlation of each metric with the final ratings, overall and
/// per edit count and constraint, separately for each side.
///
/// `scores` holds one `(metric name, per-item sentence scores)` column per
/// metric, aligned with `items`.
pub fn correlation_report(
    items: &[(AnnotationItem, Rating)],
    scores: &[(String, Vec<f64>)],
    resamples: usize,
    rng: &RngState,
) -> Result<CorrelationReport> {
    if items.is_empty() {
        return Err(Error::EmptyInput);
    }
    if scores.is_empty() {
        return Err(Error::InvalidArgument("no metric scores".into()));
    }
    for (name, col) in scores {
        if col.len() != items.len() {
            return Err(Error::InvalidArgument(format!(
                "metric {name}: {} scores for {} items",
                col.len(),
                items.len()
            )));
        }
    }

    let mut strata: Vec<(String, Vec<usize>)> = Vec::new();
    for side in [Side::Source, Side::Target] {
        let on_side: Vec<usize> = (0..items.len())
            .filter(|&i| items[i].0.provenance.side == side)
            .collect();
        if on_side.is_empty() {
            continue;
        }
        let name = side_label(side);
        strata.push((format!("{name}:all"), on_side.clone()));
        for e in 0..=3u8 {
            let idx: Vec<usize> = on_side
                .iter()
                .copied()
                .filter(|&i| items[i].0.provenance.n_edits == e)
                .collect();
            if !idx.is_empty() {
                strata.push((format!("{name}:edits={e}"), idx));
            }
        }
        for c in [
            ItemConstraint::Unconstrained,
            ItemConstraint::Knn,
            ItemConstraint::Charswap,
            ItemConstraint::None,
        ] {
            let idx: Vec<usize> = on_side
                .iter()
                .copied()
                .filter(|&i| items[i].0.provenance.constraint == c)
                .collect();
            if !idx.is_empty() {
                strata.push((format!("{name}:{}", c.name()), idx));
            }
        }
    }

    let mut rows = Vec::with_capacity(strata.len());
    for (s, (label, idx)) in strata.into_iter().enumerate() {
        let human: Vec<f64> = idx.iter().map(|&i| items[i].1.value() as f64).collect();
        let columns: Vec<Vec<f64>> = scores
            .iter()
            .map(|(_, col)| idx.iter().map(|&i| col[i]).collect())
            .collect();
        let mut cells: Vec<Cell> = columns
            .iter()
            .map(|col| {
                if idx.len() < MIN_STRATUM {
                    return Ok(Cell::Insufficient);
                }
                match pearson(&human, col) {
                    Ok(r) => Ok(Cell::Value { r, better: false }),
                    Err(Error::DegenerateSample) => Ok(Cell::Degenerate),
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<_>>()?;

        let mut ranked: Vec<(usize, f64)> = cells
            .iter()
            .enumerate()
            .filter_map(|(m, c)| c.value().map(|r| (m, r)))
            .collect();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        if idx.len() >= MIN_BOOTSTRAP {
            for (p, pair) in ranked.windows(2).enumerate() {
                let (hi, lo) = (pair[0].0, pair[1].0);
                let stream = rng.fork(((s as u64) << 16) | p as u64);
                let test =
                    match paired_bootstrap_correlation_test(&human, &columns[hi], &columns[lo], resamples, &stream) {
                        Ok(t) => t,
                        Err(Error::DegenerateSample) => continue,
                        Err(e) => return Err(e),
                    };
                if test.a_better && test.significant(SIGNIFICANCE) {
                    if let Cell::Value { better, .. } = &mut cells[hi] {
                        *better = true;
                    }
                }
            }
        }
        rows.push(StratumRow {
            label,
            n: idx.len(),
            cells,
        });
    }
    Ok(CorrelationReport {
        metrics: scores.iter().map(|(n, _)| n.clone()).collect(),
        rows,
    })
}
