use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use std::path::Path;

use advmt::framework::records_from_jsonl;
use advmt::study::{
    items_from_tsv, items_to_tsv, ratings_from_tsv, ratings_to_tsv, sample_annotation_batch, AnnotationItem,
    AttackOutput, ItemConstraint, Rating, RatingRow, AUDITOR, RUBRIC, RUBRIC_QUESTION,
};
use advmt::RngState;
use serde::{Deserialize, Serialize};

use super::evaluate::recorded_constraint;
use super::{read_input, required, write_output};
use crate::args::{ExportArgs, RateArgs};
use crate::manifest::Manifest;
use crate::settings::{resolve, CliResult, Failure};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExportSettings {
    pub records: Vec<String>,
    pub per_constraint: usize,
    pub edit_mix: [usize; 3],
    pub seed: u64,
    pub out: Option<String>,
}

impl Default for ExportSettings {
    fn default() -> Self {
        ExportSettings {
            records: Vec::new(),
            per_constraint: 300,
            edit_mix: [1, 1, 1],
            seed: 0,
            out: None,
        }
    }
}

/// Splits `CONSTRAINT=FILE`; a plain path yields no constraint.
fn split_records_arg(arg: &str) -> (Option<ItemConstraint>, &str) {
    if let Some((name, path)) = arg.split_once('=') {
        if let Ok(c) = name.parse::<advmt::attack::Constraint>() {
            return (Some(c.into()), path);
        }
    }
    (None, arg)
}

pub fn export(config: Option<&Path>, args: &ExportArgs) -> CliResult<()> {
    let s: ExportSettings = resolve(&["annotate", "export"], config, args)?;
    let out = required(&s.out, "out")?;
    if s.records.is_empty() {
        return Err(Failure::usage("missing required setting --records"));
    }
    let mut outputs = Vec::new();
    for arg in &s.records {
        let (given, path) = split_records_arg(arg);
        let text = read_input(path)?;
        let constraint = match given {
            Some(c) => c,
            None => {
                let name = recorded_constraint(&text).ok_or_else(|| {
                    Failure::usage(format!("{path}: no attack manifest; pass it as CONSTRAINT={path}"))
                })?;
                let c: advmt::attack::Constraint = name.parse()?;
                c.into()
            }
        };
        for record in records_from_jsonl(&text, path)? {
            outputs.push(AttackOutput { constraint, record });
        }
    }
    let items = sample_annotation_batch(&outputs, s.per_constraint, s.edit_mix, &mut RngState::new(s.seed))?;
    let manifest = Manifest::new("annotate export", s.seed, &s);
    write_output(out, manifest.wrap(&items_to_tsv(&items)).as_bytes())?;
    eprintln!("{} items from {} attack records", items.len(), outputs.len());
    Ok(())
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateSettings {
    pub items: Option<String>,
    pub rater: Option<String>,
    pub disputed: Vec<String>,
    pub out: Option<String>,
}

/// Ids of items on which two raters disagree and no auditor has ruled.
fn disputed_ids(rows: &[RatingRow]) -> BTreeSet<String> {
    let mut by_item: BTreeMap<&str, (Vec<Rating>, bool)> = BTreeMap::new();
    for r in rows {
        let entry = by_item.entry(&r.item_id).or_default();
        if r.rater_id == AUDITOR {
            entry.1 = true;
        } else {
            entry.0.push(r.rating);
        }
    }
    by_item
        .into_iter()
        .filter(|(_, (rs, audited))| !audited && rs.len() == 2 && rs[0] != rs[1])
        .map(|(id, _)| id.to_string())
        .collect()
}

fn show_rubric(prompt: &mut impl Write) -> std::io::Result<()> {
    writeln!(prompt, "{RUBRIC_QUESTION}")?;
    for (i, line) in RUBRIC.iter().enumerate() {
        writeln!(prompt, "  {i}  {line}")?;
    }
    Ok(())
}

/// Prompts for a rating of each item on `prompt` and reads answers from
/// `input`. `q` or end of input stops early; the ratings given so far are
/// returned.
pub fn rate_loop(
    items: &[AnnotationItem],
    rater: &str,
    input: &mut impl BufRead,
    prompt: &mut impl Write,
) -> std::io::Result<Vec<RatingRow>> {
    let mut rows = Vec::new();
    let mut line = String::new();
    'items: for (n, item) in items.iter().enumerate() {
        writeln!(prompt, "\n[{}/{}] {}", n + 1, items.len(), item.id)?;
        writeln!(prompt, "  A: {}", item.sentence_a)?;
        writeln!(prompt, "  B: {}", item.sentence_b)?;
        show_rubric(prompt)?;
        loop {
            write!(prompt, "rating (0-5, ? for the scale, q to stop): ")?;
            prompt.flush()?;
            line.clear();
            if input.read_line(&mut line)? == 0 {
                writeln!(prompt)?;
                break 'items;
            }
            match line.trim() {
                "q" | "quit" => break 'items,
                "?" => show_rubric(prompt)?,
                answer => match answer.parse::<i64>().ok().and_then(|v| Rating::new(v).ok()) {
                    Some(rating) => {
                        rows.push(RatingRow {
                            item_id: item.id.clone(),
                            rater_id: rater.to_string(),
                            rating,
                        });
                        break;
                    }
                    None => writeln!(prompt, "enter a whole number from 0 to 5")?,
                },
            }
        }
    }
    Ok(rows)
}

pub fn rate(config: Option<&Path>, args: &RateArgs) -> CliResult<()> {
    let s: RateSettings = resolve(&["annotate", "rate"], config, args)?;
    let out = required(&s.out, "out")?;
    let rater = required(&s.rater, "rater")?;
    if rater.is_empty() || rater.contains(char::is_whitespace) {
        return Err(Failure::usage("rater id must be non-empty and contain no whitespace"));
    }
    let path = required(&s.items, "items")?;
    let mut items = items_from_tsv(&read_input(path)?, path)?;
    if !s.disputed.is_empty() {
        let mut rows = Vec::new();
        for p in &s.disputed {
            rows.extend(ratings_from_tsv(&read_input(p)?, p)?);
        }
        let ids = disputed_ids(&rows);
        items.retain(|it| ids.contains(&it.id));
    }
    let stdin = std::io::stdin();
    let rows = rate_loop(&items, rater, &mut stdin.lock(), &mut std::io::stderr())
        .map_err(|e| Failure::runtime(format!("terminal: {e}")))?;
    let manifest = Manifest::new("annotate rate", 0, &s);
    write_output(out, manifest.wrap(&ratings_to_tsv(&rows)).as_bytes())?;
    eprintln!("{} of {} items rated", rows.len(), items.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use advmt::study::Provenance;
    use advmt::{tokenize, Side};

    fn items(n: usize) -> Vec<AnnotationItem> {
        (0..n)
            .map(|i| AnnotationItem {
                id: format!("src-{i:05}"),
                sentence_a: tokenize("le chat dort"),
                sentence_b: tokenize("le chta dort"),
                provenance: Provenance {
                    constraint: ItemConstraint::Charswap,
                    n_edits: 1,
                    side: Side::Source,
                },
            })
            .collect()
    }

    #[test]
    fn scripted_session() {
        let mut input = "4\n?\n7\nabc\n2\n".as_bytes();
        let mut prompt = Vec::new();
        let rows = rate_loop(&items(3), "r1", &mut input, &mut prompt).unwrap();
        let got: Vec<u8> = rows.iter().map(|r| r.rating.value()).collect();
        assert_eq!(got, vec![4, 2]);
        let shown = String::from_utf8(prompt).unwrap();
        assert!(shown.contains(RUBRIC[5]));
        assert!(shown.contains("A: le chat dort"));
        assert!(!shown.contains("charswap"));
    }

    #[test]
    fn quit_stops_early() {
        let mut input = "5\nq\n3\n".as_bytes();
        let rows = rate_loop(&items(3), "r1", &mut input, &mut Vec::new()).unwrap();
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn only_disagreements_without_auditor_are_disputed() {
        let row = |item: &str, rater: &str, v: i64| RatingRow {
            item_id: item.into(),
            rater_id: rater.into(),
            rating: Rating::new(v).unwrap(),
        };
        let rows = vec![
            row("a", "r1", 3),
            row("a", "r2", 3),
            row("b", "r1", 1),
            row("b", "r2", 4),
            row("c", "r1", 0),
            row("c", "r2", 5),
            row("c", AUDITOR, 2),
        ];
        assert_eq!(disputed_ids(&rows), BTreeSet::from(["b".to_string()]));
    }

    #[test]
    fn records_argument_forms() {
        assert_eq!(
            split_records_arg("knn=out/a.jsonl"),
            (Some(ItemConstraint::Knn), "out/a.jsonl")
        );
        assert_eq!(split_records_arg("none=a"), (Some(ItemConstraint::Unconstrained), "a"));
        assert_eq!(split_records_arg("runs/x=1.jsonl"), (None, "runs/x=1.jsonl"));
    }
}
