use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GradientWrtInput;

/// How gradient rows are normalized before scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalize {
    #[default]
    Sign,
    None,
}

/// Replacement candidates for one position, in ascending id order.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionCandidates {
    pub ids: Vec<u32>,
    /// One row per candidate: the vector the model will consume.
    pub vectors: Array2<f64>,
}

impl PositionCandidates {
    pub fn empty(dim: usize) -> Self {
        PositionCandidates {
            ids: Vec::new(),
            vectors: Array2::zeros((0, dim)),
        }
    }

    pub fn from_rows(embeddings: ArrayView2<f64>, mut ids: Vec<u32>) -> Self {
        ids.sort_unstable();
        let idx: Vec<usize> = ids.iter().map(|&i| i as usize).collect();
        PositionCandidates {
            vectors: embeddings.select(ndarray::Axis(0), &idx),
            ids,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Candidates for every source position; frozen positions have none.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    pub positions: Vec<PositionCandidates>,
}

/// Winner of the linearized objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestSwap {
    pub position: usize,
    /// Index into that position's candidate list.
    pub candidate: usize,
    pub id: u32,
    pub score: f64,
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn direction(g: ArrayView1<f64>, normalize: Normalize) -> Vec<f64> {
    match normalize {
        Normalize::Sign => g.iter().map(|&v| sign(v)).collect(),
        Normalize::None => g.to_vec(),
    }
}

/// `[ŵ - w]ᵀ g`, summed in index order.
pub fn linearized_score(candidate: ArrayView1<f64>, original: ArrayView1<f64>, g: &[f64]) -> f64 {
    let mut total = 0.0;
    for ((c, w), d) in candidate.iter().zip(original.iter()).zip(g) {
        total += (c - w) * d;
    }
    total
}

/// Best candidate at each position (`None` where there are no candidates).
pub fn best_per_position(
    grad: &GradientWrtInput,
    inputs: ArrayView2<f64>,
    candidates: &CandidateSet,
    normalize: Normalize,
) -> Result<Vec<Option<BestSwap>>> {
    let n = inputs.nrows();
    if grad.len() != n || candidates.positions.len() != n || grad.0.ncols() != inputs.ncols() {
        return Err(Error::Dimension(format!(
            "gradient {:?}, inputs {:?}, {} candidate lists",
            grad.0.shape(),
            inputs.shape(),
            candidates.positions.len()
        )));
    }
    let mut out = Vec::with_capacity(n);
    for (i, cands) in candidates.positions.iter().enumerate() {
        let g = direction(grad.row(i), normalize);
        let w = inputs.row(i);
        let mut best: Option<BestSwap> = None;
        for (c, (&id, row)) in cands.ids.iter().zip(cands.vectors.rows()).enumerate() {
            let score = linearized_score(row, w, &g);
            if best.is_none_or(|b| score > b.score) {
                best = Some(BestSwap {
                    position: i,
                    candidate: c,
                    id,
                    score,
                });
            }
        }
        out.push(best);
    }
    Ok(out)
}

/// Argmax of `[ŵ - w_i]ᵀ g_i` over every position and candidate. Ties go to
/// the lower position, then the lower candidate id.
pub fn linearized_best_swap(
    grad: &GradientWrtInput,
    inputs: ArrayView2<f64>,
    candidates: &CandidateSet,
    normalize: Normalize,
) -> Result<BestSwap> {
    let mut best: Option<BestSwap> = None;
    for b in best_per_position(grad, inputs, candidates, normalize)?
        .into_iter()
        .flatten()
    {
        if best.is_none_or(|cur| b.score > cur.score) {
            best = Some(b);
        }
    }
    best.ok_or(Error::NoCandidates)
}

/// The `count` positions with the highest per-position best score, each
/// used once, in descending score order.
pub fn top_positions(
    grad: &GradientWrtInput,
    inputs: ArrayView2<f64>,
    candidates: &CandidateSet,
    normalize: Normalize,
    count: usize,
) -> Result<Vec<BestSwap>> {
    let mut all: Vec<BestSwap> = best_per_position(grad, inputs, candidates, normalize)?
        .into_iter()
        .flatten()
        .collect();
    all.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.position.cmp(&b.position)));
    all.truncate(count);
    Ok(all)
}
