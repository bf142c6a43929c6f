//! Gradient-guided word substitution attacks.
//!
//! Each swap maximizes the first-order estimate `[ŵ - w_i]ᵀ ∇_{w_i} L_adv` of
//! the change in the adversarial loss, over the replacements a constraint
//! allows. Greedy search applies one swap at a time and recomputes the
//! gradient after each.

mod knn;
mod linear;
mod oov;

pub use knn::{cosine, knn_candidates};
pub use linear::{
    best_per_position, linearized_best_swap, linearized_score, top_positions, BestSwap, CandidateSet, Normalize,
    PositionCandidates,
};
pub use oov::{make_oov, make_oov_with};

use std::fmt;
use std::str::FromStr;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::{AttackRecord, Swap};
use crate::model::{Objective, ToyModel};
use crate::rng::RngState;
use crate::text::{SentenceTokens, Vocabulary};

pub const DEFAULT_K: usize = 10;
pub const DEFAULT_MAX_SCRAMBLING: usize = 3;
pub const DEFAULT_BUDGET: usize = 3;

/// Which replacements an attack may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Constraint {
    /// Any other in-vocabulary word.
    Unconstrained,
    /// One of the `k` nearest neighbours in embedding space.
    Knn { k: usize },
    /// A character-scrambled, out-of-vocabulary spelling of the same word.
    CharSwap { max_scrambling: usize },
}

impl Constraint {
    pub fn knn() -> Self {
        Constraint::Knn { k: DEFAULT_K }
    }

    pub fn charswap() -> Self {
        Constraint::CharSwap {
            max_scrambling: DEFAULT_MAX_SCRAMBLING,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Constraint::Unconstrained => "unconstrained",
            Constraint::Knn { .. } => "knn",
            Constraint::CharSwap { .. } => "charswap",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Constraint::Knn { k: 0 } => Err(Error::InvalidArgument("k must be at least 1".into())),
            Constraint::CharSwap { max_scrambling: 0 } => {
                Err(Error::InvalidArgument("max_scrambling must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Unconstrained => write!(f, "unconstrained"),
            Constraint::Knn { k } => write!(f, "knn(k={k})"),
            Constraint::CharSwap { max_scrambling } => write!(f, "charswap(max_scrambling={max_scrambling})"),
        }
    }
}

/// Parses `none`/`unconstrained`, `knn` and `charswap` with default settings.
impl FromStr for Constraint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "unconstrained" => Ok(Constraint::Unconstrained),
            "knn" => Ok(Constraint::knn()),
            "charswap" => Ok(Constraint::charswap()),
            other => Err(Error::InvalidArgument(format!("unknown constraint {other:?}"))),
        }
    }
}

/// Candidates for the positions of `ids` whose `frozen` flag is unset.
/// `original` holds the unperturbed ids that kNN neighbourhoods are taken
/// around.
pub fn build_candidates(
    constraint: Constraint,
    embeddings: ArrayView2<f64>,
    original: &[u32],
    frozen: &[bool],
    unk_id: u32,
) -> Result<CandidateSet> {
    constraint.validate()?;
    let dim = embeddings.ncols();
    let mut positions = Vec::with_capacity(original.len());
    for (&w, &skip) in original.iter().zip(frozen) {
        if skip {
            positions.push(PositionCandidates::empty(dim));
            continue;
        }
        let ids = match constraint {
            Constraint::Unconstrained => (0..embeddings.nrows() as u32)
                .filter(|&j| j != w && j != unk_id)
                .collect(),
            Constraint::Knn { k } => knn_candidates(embeddings, w, k, unk_id)?,
            Constraint::CharSwap { .. } => vec![unk_id],
        };
        positions.push(PositionCandidates::from_rows(embeddings, ids));
    }
    Ok(CandidateSet { positions })
}

/// Swaps applied by one attack, in order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SwapTrace(pub Vec<Swap>);

impl SwapTrace {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn positions(&self) -> Vec<usize> {
        self.0.iter().map(|s| s.position).collect()
    }
}

/// Attack settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub constraint: Constraint,
    pub budget: usize,
    pub normalize: Normalize,
}

impl AttackConfig {
    pub fn new(constraint: Constraint, budget: usize) -> Self {
        AttackConfig {
            constraint,
            budget,
            normalize: Normalize::Sign,
        }
    }
}

fn surface_for(
    constraint: Constraint,
    vocab: &Vocabulary,
    original: &crate::text::Token,
    id: u32,
    rng: &mut RngState,
) -> crate::text::Token {
    match constraint {
        Constraint::CharSwap { max_scrambling } => make_oov(original, vocab, max_scrambling, rng),
        _ => vocab.token(id).clone(),
    }
}

/// Greedy search: `min(budget, |x|)` rounds, each recomputing the
/// adversarial gradient at the current input and applying the best swap at
/// a position not yet touched.
pub fn greedy_attack(
    model: &ToyModel,
    x: &SentenceTokens,
    y: &SentenceTokens,
    config: AttackConfig,
    rng: &mut RngState,
) -> Result<(SentenceTokens, SwapTrace)> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput);
    }
    if config.budget == 0 {
        return Err(Error::InvalidArgument("budget must be at least 1".into()));
    }
    let original = model.source_ids(x);
    let y_ids = model.target_ids(y);
    let unk = model.src_vocab.unk_id();
    let emb = model.params.src_emb.view();

    let mut ids = original.clone();
    let mut x_adv = x.clone();
    let mut frozen = vec![false; x.len()];
    let mut trace = Vec::new();
    let mut vectors = model.word_vectors(&ids);
    let (mut loss, mut grad) = model.loss_and_grads(&ids, vectors.view(), &y_ids, Objective::Adversarial, None);
    for _ in 0..config.budget.min(x.len()) {
        let candidates = build_candidates(config.constraint, emb, &original, &frozen, unk)?;
        let best = linearized_best_swap(
            &crate::model::GradientWrtInput(grad),
            vectors.view(),
            &candidates,
            config.normalize,
        )?;
        let i = best.position;
        let from = x.tokens()[i].clone();
        let to = surface_for(config.constraint, &model.src_vocab, &from, best.id, rng);
        ids[i] = best.id;
        frozen[i] = true;
        x_adv = x_adv.with_replacement(i, to.clone());
        vectors = model.word_vectors(&ids);
        let (after, next_grad) = model.loss_and_grads(&ids, vectors.view(), &y_ids, Objective::Adversarial, None);
        trace.push(Swap {
            position: i,
            original: from,
            replacement: to,
            score: best.score,
            loss_before: loss,
            loss_after: after,
        });
        loss = after;
        grad = next_grad;
    }
    Ok((x_adv, SwapTrace(trace)))
}

/// One-shot perturbation used during adversarial training: a single
/// gradient evaluation, then the best replacement at each of the top
/// `count` distinct positions. Works on ids; CharSwap replacements become
/// the unknown-word id.
pub fn one_shot_perturbation(
    model: &ToyModel,
    x_ids: &[u32],
    y_ids: &[u32],
    constraint: Constraint,
    count: usize,
    normalize: Normalize,
) -> Result<Vec<u32>> {
    let vectors = model.word_vectors(x_ids);
    let (_, grad) = model.loss_and_grads(x_ids, vectors.view(), y_ids, Objective::Adversarial, None);
    let frozen = vec![false; x_ids.len()];
    let candidates = build_candidates(
        constraint,
        model.params.src_emb.view(),
        x_ids,
        &frozen,
        model.src_vocab.unk_id(),
    )?;
    let top = top_positions(
        &crate::model::GradientWrtInput(grad),
        vectors.view(),
        &candidates,
        normalize,
        count,
    )?;
    let mut out = x_ids.to_vec();
    for b in top {
        out[b.position] = b.id;
    }
    Ok(out)
}

/// Attacks one pair and decodes both the clean and the perturbed source.
pub fn attack_pair(
    model: &ToyModel,
    x: &SentenceTokens,
    y: &SentenceTokens,
    config: AttackConfig,
    rng: &mut RngState,
) -> Result<AttackRecord> {
    let (x_adv, trace) = greedy_attack(model, x, y, config, rng)?;
    let y_base = model.greedy_decode(x, ToyModel::default_max_len(x.len()))?.output;
    let y_adv = model
        .greedy_decode(&x_adv, ToyModel::default_max_len(x_adv.len()))?
        .output;
    Ok(AttackRecord {
        x: x.clone(),
        x_adv,
        y: y.clone(),
        y_base,
        y_adv,
        swaps: trace.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelConfig;
    use crate::text::{build_vocabulary, tokenize, ParallelCorpus, Side};

    fn model() -> ToyModel {
        let corpus = ParallelCorpus::new(vec![
            (
                tokenize("the quick brown fox jumps"),
                tokenize("le renard brun rapide saute"),
            ),
            (
                tokenize("a lazy dog sleeps here"),
                tokenize("un chien paresseux dort ici"),
            ),
        ])
        .unwrap();
        let sv = build_vocabulary(&corpus, Side::Source, 100).unwrap();
        let tv = build_vocabulary(&corpus, Side::Target, 100).unwrap();
        ToyModel::new(
            sv,
            tv,
            ModelConfig {
                d_emb: 6,
                d_hid: 8,
                max_positions: 16,
            },
            &mut RngState::new(3),
        )
        .unwrap()
    }

    #[test]
    fn constraint_parsing() {
        assert_eq!("none".parse::<Constraint>().unwrap(), Constraint::Unconstrained);
        assert_eq!("knn".parse::<Constraint>().unwrap(), Constraint::Knn { k: 10 });
        assert_eq!(
            "CharSwap".parse::<Constraint>().unwrap(),
            Constraint::CharSwap { max_scrambling: 3 }
        );
        assert!("other".parse::<Constraint>().is_err());
    }

    #[test]
    fn single_round_matches_linearized_search() {
        let m = model();
        let (x, y) = (
            tokenize("the quick brown fox jumps"),
            tokenize("le renard brun rapide saute"),
        );
        let grad = m.grad_adv_wrt_input(&x, &y).unwrap();
        let ids = m.source_ids(&x);
        let vectors = m.word_vectors(&ids);
        let set = build_candidates(
            Constraint::Unconstrained,
            m.params.src_emb.view(),
            &ids,
            &[false; 5],
            m.src_vocab.unk_id(),
        )
        .unwrap();
        let best = linearized_best_swap(&grad, vectors.view(), &set, Normalize::Sign).unwrap();
        let cfg = AttackConfig::new(Constraint::Unconstrained, 1);
        let (x_adv, trace) = greedy_attack(&m, &x, &y, cfg, &mut RngState::new(0)).unwrap();
        assert_eq!(trace.len(), 1);
        assert_eq!(trace.0[0].position, best.position);
        assert_eq!(x_adv.tokens()[best.position], *m.src_vocab.token(best.id));
    }

    #[test]
    fn budget_is_capped_and_positions_distinct() {
        let m = model();
        let (x, y) = (tokenize("the fox"), tokenize("le renard"));
        for c in [
            Constraint::Unconstrained,
            Constraint::Knn { k: 3 },
            Constraint::charswap(),
        ] {
            let (x_adv, trace) = greedy_attack(&m, &x, &y, AttackConfig::new(c, 3), &mut RngState::new(1)).unwrap();
            assert_eq!(trace.len(), 2);
            assert_ne!(trace.0[0].position, trace.0[1].position);
            assert_eq!(x_adv.len(), x.len());
        }
        assert!(greedy_attack(
            &m,
            &x,
            &y,
            AttackConfig::new(Constraint::Unconstrained, 0),
            &mut RngState::new(1)
        )
        .is_err());
    }

    #[test]
    fn charswap_surfaces_are_oov() {
        let m = model();
        let (x, y) = (
            tokenize("the quick brown fox jumps"),
            tokenize("le renard brun rapide saute"),
        );
        let (_, trace) = greedy_attack(
            &m,
            &x,
            &y,
            AttackConfig::new(Constraint::charswap(), 3),
            &mut RngState::new(2),
        )
        .unwrap();
        for s in &trace.0 {
            assert!(!m.src_vocab.contains(s.replacement.as_str()));
        }
    }

    #[test]
    fn one_shot_changes_at_most_count_positions() {
        let m = model();
        let x = m.source_ids(&tokenize("the quick brown fox jumps"));
        let y = m.target_ids(&tokenize("le renard brun rapide saute"));
        let out = one_shot_perturbation(&m, &x, &y, Constraint::Unconstrained, 3, Normalize::Sign).unwrap();
        assert_eq!(out.iter().zip(&x).filter(|(a, b)| a != b).count(), 3);
        let unk = m.src_vocab.unk_id();
        let cs = one_shot_perturbation(&m, &x, &y, Constraint::charswap(), 3, Normalize::Sign).unwrap();
        assert_eq!(cs.iter().filter(|&&i| i == unk).count(), 3);
    }
}
