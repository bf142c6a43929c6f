//! Helpers for driving the `advmt` binary from tests.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

pub const BIN: &str = env!("CARGO_BIN_EXE_advmt");

/// Runs the binary in `dir`, feeding `stdin`.
pub fn advmt(dir: &Path, args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .current_dir(dir)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn advmt");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .expect("write stdin");
    child.wait_with_output().expect("wait for advmt")
}

/// Like [`advmt`] but fails with the command's stderr unless it succeeds.
pub fn ok(dir: &Path, args: &[&str], stdin: &str) -> Result<Output, String> {
    let out = advmt(dir, args, stdin);
    if out.status.success() {
        Ok(out)
    } else {
        Err(format!(
            "advmt {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

pub const CONFIG: &str = "\
[synth.corpus]
train = 800
valid = 45

[train]
epochs = 8

[attack]
seed = 11

[annotate.export]
per_constraint = 3
seed = 5
";

/// Ratings for `n` items, one per line. Raters disagree on every fourth item.
pub fn scripted_ratings(n: usize, rater: usize) -> String {
    (0..n)
        .map(|i| {
            let base = (i * 7 + i / 3) % 6;
            let v = if rater == 2 && i % 4 == 0 { (base + 1) % 6 } else { base };
            format!("{v}\n")
        })
        .collect()
}

/// Runs every command once in `dir` with relative paths and returns every
/// file written, by relative path, plus captured stdout per reporting step.
pub fn run_pipeline(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    std::fs::write(dir.join("exp.toml"), CONFIG).map_err(|e| e.to_string())?;
    let cfg = ["--config", "exp.toml"];
    let with = |args: &[&str]| -> Vec<String> { cfg.iter().chain(args).map(|s| s.to_string()).collect() };
    let run = |args: &[&str], stdin: &str| -> Result<Output, String> {
        let owned = with(args);
        let refs: Vec<&str> = owned.iter().map(String::as_str).collect();
        ok(dir, &refs, stdin)
    };

    run(&["synth", "--seed", "3", "--out", "data"], "")?;
    run(
        &[
            "train",
            "--corpus",
            "data/train.tsv",
            "--seed",
            "3",
            "--out",
            "model.ckpt",
        ],
        "",
    )?;
    run(
        &[
            "train",
            "--corpus",
            "data/train.tsv",
            "--seed",
            "3",
            "--adv",
            "charswap",
            "--alpha",
            "1.0",
            "--out",
            "adv.ckpt",
        ],
        "",
    )?;
    let mut records = Vec::new();
    for c in ["none", "knn", "charswap"] {
        for b in ["1", "2", "3"] {
            let out = format!("attacks/{c}-{b}.jsonl");
            run(
                &[
                    "attack",
                    "--checkpoint",
                    "model.ckpt",
                    "--corpus",
                    "data/valid.tsv",
                    "--constraint",
                    c,
                    "--budget",
                    b,
                    "--out",
                    &out,
                ],
                "",
            )?;
            records.push(out);
        }
    }
    let mut outputs = BTreeMap::new();
    let eval = run(
        &["evaluate", "--records", "attacks/charswap-3.jsonl", "--metric", "bleu"],
        "",
    )?;
    outputs.insert("<stdout evaluate>".to_string(), eval.stdout);
    run(
        &[
            "evaluate",
            "--records",
            "attacks/knn-3.jsonl",
            "--out",
            "reports/knn.txt",
        ],
        "",
    )?;

    let mut export = vec!["annotate", "export", "--out", "study/items.tsv"];
    for r in &records {
        export.extend(["--records", r.as_str()]);
    }
    run(&export, "")?;
    let items = std::fs::read_to_string(dir.join("study/items.tsv")).map_err(|e| e.to_string())?;
    let n = items
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("id\t"))
        .count();
    for r in [1, 2] {
        let out = format!("study/r{r}.tsv");
        let rater = format!("r{r}");
        run(
            &[
                "annotate",
                "rate",
                "--items",
                "study/items.tsv",
                "--rater",
                &rater,
                "--out",
                &out,
            ],
            &scripted_ratings(n, r),
        )?;
    }
    let disputed = (0..n).filter(|i| i % 4 == 0).count();
    run(
        &[
            "annotate",
            "rate",
            "--items",
            "study/items.tsv",
            "--rater",
            "auditor",
            "--disputed",
            "study/r1.tsv",
            "--disputed",
            "study/r2.tsv",
            "--out",
            "study/auditor.tsv",
        ],
        &"2\n".repeat(disputed),
    )?;
    run(
        &[
            "correlate",
            "--items",
            "study/items.tsv",
            "--ratings",
            "study/r1.tsv",
            "--ratings",
            "study/r2.tsv",
            "--ratings",
            "study/auditor.tsv",
            "--resamples",
            "200",
            "--out",
            "study/correlation.txt",
        ],
        "",
    )?;

    for path in files_under(dir) {
        let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
        outputs.insert(rel, std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    Ok(outputs)
}

fn files_under(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}
