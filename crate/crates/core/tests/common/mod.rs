//! Brute-force reference implementations used by the integration tests.
//!
//! Everything here works from raw strings and linear scans so it shares no
//! counting code with the library.

#![allow(dead_code)]

use advmt::attack::Normalize;
use advmt::RngState;
use ndarray::Array2;

fn windows(items: &[String], n: usize) -> Vec<Vec<String>> {
    if items.len() < n {
        return Vec::new();
    }
    (0..=items.len() - n).map(|i| items[i..i + n].to_vec()).collect()
}

fn occurrences(gram: &[String], all: &[Vec<String>]) -> u64 {
    all.iter().filter(|g| g.as_slice() == gram).count() as u64
}

/// `(hyp total, ref total, clipped matches)` for one order.
fn order_counts(hyp: &[String], reference: &[String], n: usize) -> (u64, u64, u64) {
    let h = windows(hyp, n);
    let r = windows(reference, n);
    let mut seen: Vec<Vec<String>> = Vec::new();
    let mut matched = 0;
    for g in &h {
        if seen.contains(g) {
            continue;
        }
        seen.push(g.clone());
        matched += occurrences(g, &h).min(occurrences(g, &r));
    }
    (h.len() as u64, r.len() as u64, matched)
}

fn characters(text: &str) -> Vec<String> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| c.to_string())
        .collect()
}

fn words(text: &str) -> Vec<String> {
    text.split_whitespace().map(str::to_string).collect()
}

fn chrf_from_counts(counts: &[(u64, u64, u64)], beta: f64) -> f64 {
    let mut total = 0.0;
    let mut orders = 0;
    for &(h, r, m) in counts {
        if h == 0 || r == 0 {
            continue;
        }
        orders += 1;
        let p = m as f64 / h as f64;
        let rec = m as f64 / r as f64;
        if p > 0.0 || rec > 0.0 {
            total += (1.0 + beta * beta) * p * rec / (beta * beta * p + rec);
        }
    }
    if orders == 0 {
        0.0
    } else {
        100.0 * total / orders as f64
    }
}

/// Sentence chrF on raw text.
pub fn chrf(hyp: &str, reference: &str, max_order: usize, beta: f64) -> f64 {
    corpus_chrf(&[(hyp, reference)], max_order, beta)
}

/// Corpus chrF: per-order counts summed over pairs.
pub fn corpus_chrf(pairs: &[(&str, &str)], max_order: usize, beta: f64) -> f64 {
    let mut counts = vec![(0, 0, 0); max_order];
    for (h, r) in pairs {
        let (h, r) = (characters(h), characters(r));
        for n in 1..=max_order {
            let (a, b, c) = order_counts(&h, &r, n);
            counts[n - 1].0 += a;
            counts[n - 1].1 += b;
            counts[n - 1].2 += c;
        }
    }
    chrf_from_counts(&counts, beta)
}

fn bleu_from_counts(counts: &[(u64, u64)], hyp_len: u64, ref_len: u64, smooth: bool) -> f64 {
    if hyp_len == 0 {
        return 0.0;
    }
    let mut logs = Vec::new();
    let mut zeros = 0;
    for &(total, matched) in counts {
        if total == 0 {
            break;
        }
        if matched > 0 {
            logs.push((matched as f64 / total as f64).ln());
        } else if smooth {
            zeros += 1;
            logs.push((1.0 / (2f64.powi(zeros) * total as f64)).ln());
        } else {
            return 0.0;
        }
    }
    let bp = if hyp_len >= ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    100.0 * bp * (logs.iter().sum::<f64>() / logs.len() as f64).exp()
}

/// Smoothed sentence BLEU on whitespace-tokenized text.
pub fn sentence_bleu(hyp: &str, reference: &str, max_order: usize) -> f64 {
    bleu_pairs(&[(hyp, reference)], max_order, true)
}

/// Unsmoothed corpus BLEU on whitespace-tokenized text.
pub fn corpus_bleu(pairs: &[(&str, &str)], max_order: usize) -> f64 {
    bleu_pairs(pairs, max_order, false)
}

fn bleu_pairs(pairs: &[(&str, &str)], max_order: usize, smooth: bool) -> f64 {
    let mut counts = vec![(0, 0); max_order];
    let (mut hl, mut rl) = (0, 0);
    for (h, r) in pairs {
        let (h, r) = (words(h), words(r));
        hl += h.len() as u64;
        rl += r.len() as u64;
        for n in 1..=max_order {
            let (total, _, matched) = order_counts(&h, &r, n);
            counts[n - 1].0 += total;
            counts[n - 1].1 += matched;
        }
    }
    bleu_from_counts(&counts, hl, rl, smooth)
}

/// Pearson correlation straight from the textbook formula.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let syy: f64 = ys.iter().map(|y| y * y).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

/// Random whitespace-separated text over a small alphabet so that n-gram
/// overlap between two draws is common.
pub fn random_text(rng: &mut RngState, max_words: usize) -> String {
    const ALPHABET: &[char] = &['a', 'b', 'c', 'd', 'e', 'é'];
    let n = rng.int_inclusive(1, max_words);
    (0..n)
        .map(|_| {
            let len = rng.int_inclusive(1, 4);
            (0..len).map(|_| *rng.choose(ALPHABET)).collect::<String>()
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// A model over synthetic vocabularies `w0..` and `t0..` whose parameters
/// are all drawn from `N(0, std²)`.
pub fn random_model(
    rng: &mut RngState,
    src_words: usize,
    tgt_words: usize,
    config: advmt::model::ModelConfig,
    std: f64,
) -> advmt::model::ToyModel {
    use advmt::text::{Token, Vocabulary, BOS, EOS, UNK};
    let tok = |s: String| Token::new(s).unwrap();
    let mut src = vec![tok(UNK.into())];
    src.extend((0..src_words).map(|i| tok(format!("w{i}"))));
    let mut tgt = vec![tok(UNK.into()), tok(BOS.into()), tok(EOS.into())];
    tgt.extend((0..tgt_words).map(|i| tok(format!("t{i}"))));
    let mut model = advmt::model::ToyModel::new(
        Vocabulary::from_tokens(src).unwrap(),
        Vocabulary::from_tokens(tgt).unwrap(),
        config,
        rng,
    )
    .unwrap();
    for (_, t) in model.params.tensors_mut() {
        for v in t.iter_mut() {
            *v = std * rng.normal();
        }
    }
    model
}

/// Random id sequence avoiding the ids in `skip`.
pub fn random_ids(rng: &mut RngState, len: usize, vocab: usize, skip: &[u32]) -> Vec<u32> {
    (0..len)
        .map(|_| loop {
            let id = rng.below(vocab) as u32;
            if !skip.contains(&id) {
                break id;
            }
        })
        .collect()
}

/// Integer-valued entries produce ties; Gaussian entries do not.
pub fn random_matrix(rng: &mut RngState, rows: usize, cols: usize, integer: bool) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| {
        if integer {
            rng.int_inclusive(0, 4) as f64 - 2.0
        } else {
            rng.normal()
        }
    })
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

/// `(position, id, score)` of the best swap by exhaustive enumeration.
pub fn brute_force_swap(
    emb: &Array2<f64>,
    x: &[u32],
    grad: &Array2<f64>,
    allowed: &[Vec<u32>],
    normalize: Normalize,
) -> Option<(usize, u32, f64)> {
    let mut best: Option<(usize, u32, f64)> = None;
    for (i, &w) in x.iter().enumerate() {
        for cand in 0..emb.nrows() as u32 {
            if !allowed[i].contains(&cand) {
                continue;
            }
            let mut score = 0.0;
            for d in 0..emb.ncols() {
                let g = match normalize {
                    Normalize::Sign => sign(grad[[i, d]]),
                    Normalize::None => grad[[i, d]],
                };
                score += (emb[[cand as usize, d]] - emb[[w as usize, d]]) * g;
            }
            if best.is_none_or(|(_, _, s)| score > s) {
                best = Some((i, cand, score));
            }
        }
    }
    best
}

pub fn brute_force_knn(emb: &Array2<f64>, word: u32, k: usize, unk: u32) -> Vec<u32> {
    let cos = |a: usize, b: usize| {
        let mut dot = 0.0;
        let mut na = 0.0;
        let mut nb = 0.0;
        for d in 0..emb.ncols() {
            dot += emb[[a, d]] * emb[[b, d]];
            na += emb[[a, d]] * emb[[a, d]];
            nb += emb[[b, d]] * emb[[b, d]];
        }
        if na == 0.0 || nb == 0.0 {
            f64::NEG_INFINITY
        } else {
            dot / (na.sqrt() * nb.sqrt())
        }
    };
    let mut chosen: Vec<u32> = Vec::new();
    for _ in 0..k {
        let mut best: Option<(u32, f64)> = None;
        for j in 0..emb.nrows() as u32 {
            if j == word || j == unk || chosen.contains(&j) {
                continue;
            }
            let s = cos(word as usize, j as usize);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((j, s));
            }
        }
        chosen.push(best.unwrap().0);
    }
    chosen
}

pub fn random_word(rng: &mut RngState) -> String {
    const LETTERS: &[char] = &['a', 'b', 'c', 'é', 'e'];
    let len = rng.int_inclusive(1, 7);
    (0..len).map(|_| *rng.choose(LETTERS)).collect()
}

/// Same first and last character, same multiset of characters.
fn is_inner_anagram(a: &[char], b: &[char]) -> bool {
    if a.len() != b.len() || a.first() != b.first() || a.last() != b.last() {
        return false;
    }
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    x.sort_unstable();
    y.sort_unstable();
    x == y
}

/// Either a scramble of the inner characters, or a scramble (possibly the
/// identity) followed by one or more copies of the final character.
pub fn anagram_or_suffix(input: &str, output: &str) -> bool {
    let a: Vec<char> = input.chars().collect();
    let b: Vec<char> = output.chars().collect();
    if is_inner_anagram(&a, &b) {
        return true;
    }
    if b.len() <= a.len() {
        return false;
    }
    let last = *a.last().unwrap();
    b[a.len()..].iter().all(|&c| c == last) && is_inner_anagram(&a, &b[..a.len()])
}
