pub mod annotate;
pub mod attack;
pub mod correlate;
pub mod evaluate;
pub mod synth;
pub mod train;

use std::io::Write;
use std::path::{Path, PathBuf};

use advmt::ParallelCorpus;

use crate::settings::{CliResult, Failure};

pub fn required<'a>(value: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    value
        .as_deref()
        .ok_or_else(|| Failure::usage(format!("missing required setting --{flag}")))
}

pub fn read_input(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{path}: {e}")))
}

pub fn write_output(path: impl AsRef<Path>, content: &[u8]) -> CliResult<()> {
    let path = path.as_ref();
    let fail = |e: std::io::Error| Failure::runtime(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(fail)?;
    }
    std::fs::write(path, content).map_err(fail)
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&str>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => write_output(p, content.as_bytes()),
        None => std::io::stdout()
            .write_all(content.as_bytes())
            .map_err(|e| Failure::runtime(format!("stdout: {e}"))),
    }
}

/// The CSV companion of a text report: `csv` if given, else `out` with a
/// `.csv` extension.
pub fn csv_path(out: Option<&str>, csv: Option<&str>) -> CliResult<Option<PathBuf>> {
    if let Some(c) = csv {
        return Ok(Some(PathBuf::from(c)));
    }
    let Some(out) = out else { return Ok(None) };
    let path = Path::new(out).with_extension("csv");
    if path == Path::new(out) {
        return Err(Failure::usage(format!(
            "{out}: report path already ends in .csv; pass --csv"
        )));
    }
    Ok(Some(path))
}

pub fn load_corpus(tsv: &Option<String>, src: &Option<String>, tgt: &Option<String>) -> CliResult<ParallelCorpus> {
    let corpus = match (tsv, src, tgt) {
        (Some(path), None, None) => ParallelCorpus::read_tsv(Path::new(path))?,
        (None, Some(s), Some(t)) => ParallelCorpus::read_aligned(Path::new(s), Path::new(t))?,
        (None, None, None) => {
            return Err(Failure::usage(
                "no corpus given: pass --corpus or --corpus-src and --corpus-tgt",
            ))
        }
        _ => {
            return Err(Failure::usage(
                "pass either --corpus or both --corpus-src and --corpus-tgt",
            ))
        }
    };
    if corpus.is_empty() {
        return Err(Failure::usage("corpus is empty"));
    }
    Ok(corpus)
}
