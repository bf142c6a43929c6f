//! Meaning-preserving adversarial attacks on sequence-to-sequence models.
//!
//! The crate bundles the pieces needed to run and judge such attacks end to
//! end: similarity metrics, the source-similarity / target-degradation
//! evaluation, a small differentiable translation model, gradient-guided
//! substitution attacks with kNN and character-swap constraints, adversarial
//! training, and the statistics for correlating metrics with human ratings.

pub mod attack;
pub mod error;
pub mod framework;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod rng;
pub mod study;
pub mod synth;
pub mod text;

pub use error::{Error, Result};
pub use rng::RngState;
pub use text::{tokenize, ParallelCorpus, SentenceTokens, Side, Token, Vocabulary};
