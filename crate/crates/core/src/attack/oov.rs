use crate::rng::RngState;
use crate::text::{Token, Vocabulary};

/// Perturbs `word` into a token the vocabulary does not contain.
///
/// Words of four or more characters get up to `max_scrambling` swaps of two
/// adjacent inner characters (the first and last characters never move, and
/// swaps compound). The first out-of-vocabulary spelling is returned. Failing
/// that, or for short words, the final character is repeated until the result
/// is unknown.
pub fn make_oov(word: &Token, vocab: &Vocabulary, max_scrambling: usize, rng: &mut RngState) -> Token {
    make_oov_with(word, vocab, max_scrambling, |lo, hi| rng.int_inclusive(lo, hi))
}

/// [`make_oov`] with an explicit source of swap positions, drawn from the
/// inclusive range passed to `position`.
pub fn make_oov_with(
    word: &Token,
    vocab: &Vocabulary,
    max_scrambling: usize,
    mut position: impl FnMut(usize, usize) -> usize,
) -> Token {
    let mut chars: Vec<char> = word.as_str().chars().collect();
    let len = chars.len();
    if len > 3 {
        for _ in 0..max_scrambling {
            let pos = position(1, len - 3);
            chars.swap(pos, pos + 1);
            let candidate: String = chars.iter().collect();
            if !vocab.contains(&candidate) {
                return Token::new(candidate).expect("non-empty, no whitespace");
            }
        }
    }
    let last = *chars.last().expect("tokens are non-empty");
    let mut out: String = chars.into_iter().collect();
    while vocab.contains(&out) {
        out.push(last);
    }
    Token::new(out).expect("non-empty, no whitespace")
}
