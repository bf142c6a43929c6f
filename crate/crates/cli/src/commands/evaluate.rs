use std::path::Path;

use advmt::framework::{build_report, records_from_jsonl};
use advmt::metrics::{metric_for, MetricKind};
use serde::{Deserialize, Serialize};

use super::{csv_path, emit, read_input, required, write_output};
use crate::args::EvaluateArgs;
use crate::manifest::Manifest;
use crate::settings::{resolve, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateSettings {
    pub records: Option<String>,
    pub metric: MetricKind,
    pub label: Option<String>,
    pub out: Option<String>,
    pub csv: Option<String>,
}

impl Default for EvaluateSettings {
    fn default() -> Self {
        EvaluateSettings {
            records: None,
            metric: MetricKind::Chrf,
            label: None,
            out: None,
            csv: None,
        }
    }
}

/// The constraint an attack file was produced with, from its manifest.
pub fn recorded_constraint(text: &str) -> Option<String> {
    let m = Manifest::parse(text)?;
    (m.command == "attack").then_some(())?;
    m.settings.get("constraint")?.as_str().map(str::to_string)
}

pub fn run(config: Option<&Path>, args: &EvaluateArgs) -> CliResult<()> {
    let s: EvaluateSettings = resolve(&["evaluate"], config, args)?;
    let path = required(&s.records, "records")?;
    let text = read_input(path)?;
    let records = records_from_jsonl(&text, path)?;
    let label = s
        .label
        .clone()
        .or_else(|| recorded_constraint(&text))
        .unwrap_or_else(|| {
            Path::new(path)
                .file_stem()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
    let report = build_report(&records, metric_for(s.metric).as_ref())?;

    let manifest = Manifest::new("evaluate", 0, &s);
    emit(s.out.as_deref(), &manifest.wrap(&report.to_text(&label)))?;
    if let Some(csv) = csv_path(s.out.as_deref(), s.csv.as_deref())? {
        write_output(csv, manifest.wrap(&report.to_csv(&label)).as_bytes())?;
    }
    Ok(())
}
