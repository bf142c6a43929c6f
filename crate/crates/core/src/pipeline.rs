//! Corpus-level helpers: translation, batch attacks and held-out scoring.
//!
//! Sentence `i` always gets RNG stream `i`, so results do not depend on the
//! number of worker threads.

use rayon::prelude::*;

use crate::attack::{attack_pair, AttackConfig};
use crate::error::Result;
use crate::framework::AttackRecord;
use crate::metrics::corpus_chrf;
use crate::model::{ModelConfig, ToyModel};
use crate::rng::RngState;
use crate::text::{build_vocabulary, ParallelCorpus, SentenceTokens, Side};

/// Vocabulary cap large enough that toy corpora keep every word.
pub const DEFAULT_VOCAB_SIZE: usize = 50_000;

/// A freshly initialized model whose vocabularies are the `max_vocab` most
/// frequent words of each side of `corpus`.
pub fn init_model(corpus: &ParallelCorpus, max_vocab: usize, config: ModelConfig, seed: u64) -> Result<ToyModel> {
    let src = build_vocabulary(corpus, Side::Source, max_vocab)?;
    let tgt = build_vocabulary(corpus, Side::Target, max_vocab)?;
    ToyModel::new(src, tgt, config, &mut RngState::new(seed))
}

/// Runs `f` over `0..n` on a pool of `threads` workers, keeping input order.
pub fn map_indexed<T: Send>(n: usize, threads: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    if threads <= 1 {
        return (0..n).map(f).collect();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(|| (0..n).into_par_iter().map(f).collect())
}

pub fn translate_all(model: &ToyModel, sources: &[SentenceTokens], threads: usize) -> Result<Vec<SentenceTokens>> {
    map_indexed(sources.len(), threads, |i| {
        let x = &sources[i];
        model
            .greedy_decode(x, ToyModel::default_max_len(x.len()))
            .map(|d| d.output)
    })
    .into_iter()
    .collect()
}

/// Corpus chrF (0-100) of greedy translations against the references.
pub fn heldout_chrf(model: &ToyModel, corpus: &ParallelCorpus, threads: usize) -> Result<f64> {
    let sources: Vec<SentenceTokens> = corpus.sources().cloned().collect();
    let refs: Vec<SentenceTokens> = corpus.targets().cloned().collect();
    let hyps = translate_all(model, &sources, threads)?;
    Ok(corpus_chrf(&hyps, &refs, 6, 2.0)?.value)
}

/// Attacks every pair of `corpus`.
pub fn attack_corpus(
    model: &ToyModel,
    corpus: &ParallelCorpus,
    config: AttackConfig,
    seed: u64,
    threads: usize,
) -> Result<Vec<AttackRecord>> {
    let root = RngState::new(seed);
    let pairs = corpus.pairs();
    map_indexed(pairs.len(), threads, |i| {
        let (x, y) = &pairs[i];
        attack_pair(model, x, y, config, &mut root.fork(i as u64))
    })
    .into_iter()
    .collect()
}
