use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::AttackRecord;
use crate::rng::RngState;
use crate::text::{SentenceTokens, Side};

/// The six-level meaning-similarity scale, one line per level.
pub const RUBRIC: [&str; 6] = [
    "The meaning is completely different or one of the sentences is meaningless",
    "The topic is the same but the meaning is different",
    "Some key information is different",
    "The key information is the same but the details differ",
    "Meaning is essentially equal but some expressions are unnatural",
    "Meaning is essentially equal and the two sentences are well-formed English (or the language of interest)",
];

pub const RUBRIC_QUESTION: &str = "How would you rate the similarity between the meaning of these two sentences?";

/// A human similarity judgment in `0..=5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Rating(u8);

impl Rating {
    pub fn new(value: i64) -> Result<Self> {
        if (0..=5).contains(&value) {
            Ok(Rating(value as u8))
        } else {
            Err(Error::InvalidRating(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn describe(self) -> &'static str {
        RUBRIC[self.0 as usize]
    }
}

impl TryFrom<i64> for Rating {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        Rating::new(v)
    }
}

impl From<Rating> for i64 {
    fn from(r: Rating) -> i64 {
        r.0 as i64
    }
}

impl fmt::Display for Rating {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Both raters' scores, the auditor's when they disagree, and the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjudicatedRating {
    pub rater1: Rating,
    pub rater2: Rating,
    pub auditor: Option<Rating>,
    #[serde(rename = "final")]
    pub final_rating: Rating,
}

/// Agreement stands; a disagreement is settled by the auditor.
pub fn adjudicate(r1: Rating, r2: Rating, auditor: Option<Rating>) -> Result<Rating> {
    match (r1 == r2, auditor) {
        (true, None) => Ok(r1),
        (true, Some(a)) => Err(Error::SpuriousAuditor(a.value())),
        (false, Some(a)) => Ok(a),
        (false, None) => Err(Error::MissingAuditor(r1.value(), r2.value())),
    }
}

impl AdjudicatedRating {
    pub fn new(rater1: Rating, rater2: Rating, auditor: Option<Rating>) -> Result<Self> {
        Ok(AdjudicatedRating {
            rater1,
            rater2,
            auditor,
            final_rating: adjudicate(rater1, rater2, auditor)?,
        })
    }
}

/// Which attack produced the second sentence of an item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ItemConstraint {
    Unconstrained,
    Knn,
    Charswap,
    None,
}

impl ItemConstraint {
    pub const ATTACKS: [ItemConstraint; 3] = [
        ItemConstraint::Unconstrained,
        ItemConstraint::Knn,
        ItemConstraint::Charswap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ItemConstraint::Unconstrained => "unconstrained",
            ItemConstraint::Knn => "knn",
            ItemConstraint::Charswap => "charswap",
            ItemConstraint::None => "none",
        }
    }
}

impl FromStr for ItemConstraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unconstrained" => Ok(ItemConstraint::Unconstrained),
            "knn" => Ok(ItemConstraint::Knn),
            "charswap" => Ok(ItemConstraint::Charswap),
            "none" => Ok(ItemConstraint::None),
            other => Err(Error::InvalidArgument(format!("unknown constraint {other:?}"))),
        }
    }
}

impl From<crate::attack::Constraint> for ItemConstraint {
    fn from(c: crate::attack::Constraint) -> Self {
        match c {
            crate::attack::Constraint::Unconstrained => ItemConstraint::Unconstrained,
            crate::attack::Constraint::Knn { .. } => ItemConstraint::Knn,
            crate::attack::Constraint::CharSwap { .. } => ItemConstraint::Charswap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub constraint: ItemConstraint,
    pub n_edits: u8,
    pub side: Side,
}

impl Provenance {
    pub fn validate(&self) -> Result<()> {
        let baseline = self.constraint == ItemConstraint::None;
        if self.n_edits > 3 || baseline != (self.n_edits == 0) || (baseline && self.side != Side::Target) {
            return Err(Error::InvalidArgument(format!(
                "inconsistent provenance: {} edits, constraint {}, {:?} side",
                self.n_edits,
                self.constraint.name(),
                self.side
            )));
        }
        Ok(())
    }
}

/// A sentence pair to be rated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationItem {
    pub id: String,
    pub sentence_a: SentenceTokens,
    pub sentence_b: SentenceTokens,
    pub provenance: Provenance,
}

/// An attack run tagged with the constraint that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackOutput {
    pub constraint: ItemConstraint,
    pub record: AttackRecord,
}

impl AttackOutput {
    /// Positions whose surface actually changed.
    pub fn n_edits(&self) -> usize {
        self.record
            .x
            .iter()
            .zip(self.record.x_adv.iter())
            .filter(|(a, b)| a != b)
            .count()
    }
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Source => "source",
        Side::Target => "target",
    }
}

/// Stratified sample for a human study.
///
/// For every attack constraint, `per_constraint` source-side items split over
/// 1, 2 and 3 edits in the proportions of `edit_mix`. Each sampled attack
/// also yields a target-side item comparing the reference with the
/// translation of the perturbed input, and `per_constraint` further
/// target-side items compare references with clean translations.
pub fn sample_annotation_batch(
    outputs: &[AttackOutput],
    per_constraint: usize,
    edit_mix: [usize; 3],
    rng: &mut RngState,
) -> Result<Vec<AnnotationItem>> {
    if outputs.is_empty() {
        return Err(Error::InsufficientStratum("no attack outputs".into()));
    }
    let total: usize = edit_mix.iter().sum();
    if total == 0 || !per_constraint.is_multiple_of(total) {
        return Err(Error::InvalidArgument(format!(
            "per_constraint {per_constraint} is not a multiple of the edit mix total {total}"
        )));
    }
    let unit = per_constraint / total;

    let mut shortfalls = Vec::new();
    let mut chosen: Vec<(ItemConstraint, u8, usize)> = Vec::new();
    for c in ItemConstraint::ATTACKS {
        for (k, &share) in edit_mix.iter().enumerate() {
            let edits = k + 1;
            let want = share * unit;
            let mut pool: Vec<usize> = outputs
                .iter()
                .enumerate()
                .filter(|(_, o)| o.constraint == c && o.n_edits() == edits)
                .map(|(i, _)| i)
                .collect();
            if pool.len() < want {
                shortfalls.push(format!(
                    "{}/{} edits: need {want}, have {}",
                    c.name(),
                    edits,
                    pool.len()
                ));
                continue;
            }
            rng.shuffle(&mut pool);
            pool.truncate(want);
            pool.sort_unstable();
            chosen.extend(pool.into_iter().map(|i| (c, edits as u8, i)));
        }
    }
    if !shortfalls.is_empty() {
        return Err(Error::InsufficientStratum(shortfalls.join("; ")));
    }

    let mut items = Vec::new();
    for (n, &(c, edits, i)) in chosen.iter().enumerate() {
        let r = &outputs[i].record;
        items.push(AnnotationItem {
            id: format!("src-{n:05}"),
            sentence_a: r.x.clone(),
            sentence_b: r.x_adv.clone(),
            provenance: Provenance {
                constraint: c,
                n_edits: edits,
                side: Side::Source,
            },
        });
    }
    for (n, &(c, edits, i)) in chosen.iter().enumerate() {
        let r = &outputs[i].record;
        items.push(AnnotationItem {
            id: format!("tgt-{n:05}"),
            sentence_a: r.y.clone(),
            sentence_b: r.y_adv.clone(),
            provenance: Provenance {
                constraint: c,
                n_edits: edits,
                side: Side::Target,
            },
        });
    }
    // Clean translations, one per distinct source sentence.
    let mut seen = std::collections::HashSet::new();
    let mut clean: Vec<usize> = (0..outputs.len())
        .filter(|&i| seen.insert(outputs[i].record.x.to_string()))
        .collect();
    if clean.len() < per_constraint {
        return Err(Error::InsufficientStratum(format!(
            "clean translations: need {per_constraint}, have {}",
            clean.len()
        )));
    }
    rng.shuffle(&mut clean);
    clean.truncate(per_constraint);
    clean.sort_unstable();
    for (n, i) in clean.into_iter().enumerate() {
        let r = &outputs[i].record;
        items.push(AnnotationItem {
            id: format!("base-{n:05}"),
            sentence_a: r.y.clone(),
            sentence_b: r.y_base.clone(),
            provenance: Provenance {
                constraint: ItemConstraint::None,
                n_edits: 0,
                side: Side::Target,
            },
        });
    }
    Ok(items)
}

pub const ITEMS_HEADER: &str = "id\tsentence_a\tsentence_b\tconstraint\tn_edits\tside";

pub fn items_to_tsv(items: &[AnnotationItem]) -> String {
    let mut out = String::from(ITEMS_HEADER);
    out.push('\n');
    for it in items {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            it.id,
            it.sentence_a,
            it.sentence_b,
            it.provenance.constraint.name(),
            it.provenance.n_edits,
            side_name(it.provenance.side)
        ));
    }
    out
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

pub fn items_from_tsv(text: &str, source_name: &str) -> Result<Vec<AnnotationItem>> {
    let mut items = Vec::new();
    for (line, l) in data_lines(text) {
        if l == ITEMS_HEADER {
            continue;
        }
        let f: Vec<&str> = l.split('\t').collect();
        if f.len() != 6 {
            return Err(Error::parse(
                source_name,
                line,
                format!("expected 6 fields, found {}", f.len()),
            ));
        }
        let parse_err = |m: String| Error::parse(source_name, line, m);
        let side = match f[5] {
            "source" => Side::Source,
            "target" => Side::Target,
            other => return Err(parse_err(format!("unknown side {other:?}"))),
        };
        let provenance = Provenance {
            constraint: f[3].parse().map_err(|e: Error| parse_err(e.to_string()))?,
            n_edits: f[4]
                .parse()
                .map_err(|_| parse_err(format!("bad edit count {:?}", f[4])))?,
            side,
        };
        provenance.validate().map_err(|e| parse_err(e.to_string()))?;
        items.push(AnnotationItem {
            id: f[0].to_string(),
            sentence_a: SentenceTokens::from_tokenized(f[1]),
            sentence_b: SentenceTokens::from_tokenized(f[2]),
            provenance,
        });
    }
    Ok(items)
}

/// One row of a ratings file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingRow {
    pub item_id: String,
    pub rater_id: String,
    pub rating: Rating,
}

pub const RATINGS_HEADER: &str = "item_id\trater_id\trating";

/// Rater id reserved for the adjudicating auditor.
pub const AUDITOR: &str = "auditor";

pub fn ratings_to_tsv(rows: &[RatingRow]) -> String {
    let mut out = String::from(RATINGS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{}\t{}\t{}\n", r.item_id, r.rater_id, r.rating));
    }
    out
}

pub fn ratings_from_tsv(text: &str, source_name: &str) -> Result<Vec<RatingRow>> {
    let mut rows = Vec::new();
    for (line, l) in data_lines(text) {
        if l == RATINGS_HEADER {
            continue;
        }
        let f: Vec<&str> = l.split('\t').collect();
        if f.len() != 3 {
            return Err(Error::parse(
                source_name,
                line,
                format!("expected 3 fields, found {}", f.len()),
            ));
        }
        let value: i64 = f[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(source_name, line, format!("bad rating {:?}", f[2])))?;
        let rating = Rating::new(value).map_err(|e| Error::parse(source_name, line, e.to_string()))?;
        rows.push(RatingRow {
            item_id: f[0].to_string(),
            rater_id: f[1].to_string(),
            rating,
        });
    }
    Ok(rows)
}

/// Final rating per item. An item rated by a single rater takes that rating;
/// two raters (in file order) are adjudicated, consulting the auditor row
/// when they disagree.
pub fn final_ratings(rows: &[RatingRow]) -> Result<BTreeMap<String, AdjudicatedRating>> {
    let mut by_item: BTreeMap<&str, (Vec<Rating>, Option<Rating>)> = BTreeMap::new();
    for r in rows {
        let entry = by_item.entry(&r.item_id).or_default();
        if r.rater_id == AUDITOR {
            if entry.1.replace(r.rating).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "item {}: two auditor ratings",
                    r.item_id
                )));
            }
        } else {
            entry.0.push(r.rating);
        }
    }
    let mut out = BTreeMap::new();
    for (id, (raters, auditor)) in by_item {
        let adjudicated = match raters.as_slice() {
            [one] if auditor.is_none() => AdjudicatedRating::new(*one, *one, None),
            [a, b] => AdjudicatedRating::new(*a, *b, auditor),
            other => Err(Error::InvalidArgument(format!("{} rater(s)", other.len()))),
        }
        .map_err(|e| Error::InvalidArgument(format!("item {id}: {e}")))?;
        out.insert(id.to_string(), adjudicated);
    }
    Ok(out)
}
