use std::path::Path;

use advmt::metrics::{metric_for, MetricKind};
use advmt::study::{correlation_report, final_ratings, items_from_tsv, ratings_from_tsv, DEFAULT_RESAMPLES};
use advmt::RngState;
use serde::{Deserialize, Serialize};

use super::{csv_path, emit, read_input, required, write_output};
use crate::args::CorrelateArgs;
use crate::manifest::Manifest;
use crate::settings::{resolve, CliResult, Failure};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrelateSettings {
    pub items: Option<String>,
    pub ratings: Vec<String>,
    pub metrics: Vec<MetricKind>,
    pub resamples: usize,
    pub seed: u64,
    pub out: Option<String>,
    pub csv: Option<String>,
}

impl Default for CorrelateSettings {
    fn default() -> Self {
        CorrelateSettings {
            items: None,
            ratings: Vec::new(),
            metrics: vec![MetricKind::Bleu, MetricKind::Chrf],
            resamples: DEFAULT_RESAMPLES,
            seed: 0,
            out: None,
            csv: None,
        }
    }
}

pub fn run(config: Option<&Path>, args: &CorrelateArgs) -> CliResult<()> {
    let s: CorrelateSettings = resolve(&["correlate"], config, args)?;
    let path = required(&s.items, "items")?;
    if s.ratings.is_empty() {
        return Err(Failure::usage("missing required setting --ratings"));
    }
    if s.metrics.is_empty() {
        return Err(Failure::usage("no metrics selected"));
    }
    if s.resamples == 0 {
        return Err(Failure::usage("resamples must be at least 1"));
    }
    let items = items_from_tsv(&read_input(path)?, path)?;
    let mut rows = Vec::new();
    for p in &s.ratings {
        rows.extend(ratings_from_tsv(&read_input(p)?, p)?);
    }
    let mut finals = final_ratings(&rows)?;

    let mut rated = Vec::with_capacity(items.len());
    let mut missing = Vec::new();
    for item in items {
        match finals.remove(&item.id) {
            Some(r) => rated.push((item, r.final_rating)),
            None => missing.push(item.id),
        }
    }
    if !missing.is_empty() {
        return Err(Failure::usage(format!(
            "{} item(s) have no rating, first {}",
            missing.len(),
            missing[0]
        )));
    }
    if let Some(id) = finals.keys().next() {
        return Err(Failure::usage(format!(
            "{} rated item(s) are not in {path}, first {id}",
            finals.len()
        )));
    }

    let mut scores = Vec::new();
    for kind in &s.metrics {
        let metric = metric_for(*kind);
        let col = rated
            .iter()
            .map(|(it, _)| {
                if it.sentence_b.is_empty() {
                    Ok(0.0)
                } else {
                    metric.sentence_score(&it.sentence_b, &it.sentence_a)
                }
            })
            .collect::<advmt::Result<Vec<f64>>>()?;
        scores.push((kind.name().to_string(), col));
    }
    let report = correlation_report(&rated, &scores, s.resamples, &RngState::new(s.seed))?;

    let manifest = Manifest::new("correlate", s.seed, &s);
    emit(s.out.as_deref(), &manifest.wrap(&report.to_text()))?;
    if let Some(csv) = csv_path(s.out.as_deref(), s.csv.as_deref())? {
        write_output(csv, manifest.wrap(&report.to_csv()).as_bytes())?;
    }
    Ok(())
}
