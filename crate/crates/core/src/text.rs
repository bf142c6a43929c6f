//! Tokens, sentences, vocabularies and parallel corpora.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Characters split off into their own tokens.
pub const PUNCTUATION: &[char] = &['.', ',', '!', '?', ';', ':', '"', '\'', '(', ')', '«', '»'];

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

/// A single non-empty surface form without whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Token(String);

impl Token {
    pub fn new(surface: impl Into<String>) -> Result<Self> {
        let surface = surface.into();
        if surface.is_empty() {
            return Err(Error::InvalidArgument("empty token".into()));
        }
        if surface.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!("token {surface:?} contains whitespace")));
        }
        Ok(Token(surface))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Number of Unicode scalar values.
    pub fn char_len(&self) -> usize {
        self.0.chars().count()
    }
}

impl TryFrom<String> for Token {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Token::new(s)
    }
}

impl From<Token> for String {
    fn from(t: Token) -> String {
        t.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An ordered token sequence.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SentenceTokens(Vec<Token>);

impl SentenceTokens {
    pub fn new(tokens: Vec<Token>) -> Self {
        SentenceTokens(tokens)
    }

    /// Splits already-tokenized text on whitespace only.
    pub fn from_tokenized(text: &str) -> Self {
        SentenceTokens(text.split_whitespace().map(|t| Token(t.to_string())).collect())
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<Token> {
        self.0
    }

    /// Returns a copy with the token at `position` replaced.
    pub fn with_replacement(&self, position: usize, token: Token) -> Self {
        let mut out = self.0.clone();
        out[position] = token;
        SentenceTokens(out)
    }

    pub fn join(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SentenceTokens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(&t.0)?;
        }
        Ok(())
    }
}

impl From<Vec<Token>> for SentenceTokens {
    fn from(v: Vec<Token>) -> Self {
        SentenceTokens(v)
    }
}

impl<'a> IntoIterator for &'a SentenceTokens {
    type Item = &'a Token;
    type IntoIter = std::slice::Iter<'a, Token>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl Serialize for SentenceTokens {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SentenceTokens {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(SentenceTokens::from_tokenized(&s))
    }
}

/// Whitespace split followed by splitting every punctuation character into
/// its own token.
pub fn tokenize(text: &str) -> SentenceTokens {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let mut current = String::new();
        for ch in chunk.chars() {
            if PUNCTUATION.contains(&ch) {
                if !current.is_empty() {
                    out.push(Token(std::mem::take(&mut current)));
                }
                out.push(Token(ch.to_string()));
            } else {
                current.push(ch);
            }
        }
        if !current.is_empty() {
            out.push(Token(current));
        }
    }
    SentenceTokens(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Source,
    Target,
}

/// Frozen token/id bijection with a reserved unknown-word id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<Token>,
    index: HashMap<String, u32>,
    unk_id: u32,
}

impl Vocabulary {
    /// Builds a vocabulary from an explicit token list. The first entry is the
    /// unknown-word token.
    pub fn from_tokens(tokens: Vec<Token>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidArgument("vocabulary needs an UNK entry".into()));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.0.clone(), i as u32).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate token {t}")));
            }
        }
        Ok(Vocabulary {
            tokens,
            index,
            unk_id: 0,
        })
    }

    /// Frequency-ranked vocabulary. Reserved symbols come first, then tokens by
    /// descending count with lexicographic tie-breaking, truncated to
    /// `max_size` entries in total.
    pub fn from_counts<'a>(
        sentences: impl IntoIterator<Item = &'a SentenceTokens>,
        max_size: usize,
        reserved: &[&str],
    ) -> Result<Self> {
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for s in sentences {
            for t in s {
                *counts.entry(t.as_str()).or_default() += 1;
            }
        }
        if counts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut ranked: Vec<(&str, usize)> = counts
            .into_iter()
            .filter(|(t, _)| *t != UNK && !reserved.contains(t))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

        let mut tokens = vec![Token(UNK.to_string())];
        tokens.extend(reserved.iter().map(|r| Token(r.to_string())));
        let room = max_size.saturating_sub(tokens.len());
        tokens.extend(ranked.into_iter().take(room).map(|(t, _)| Token(t.to_string())));
        Self::from_tokens(tokens)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn unk_id(&self) -> u32 {
        self.unk_id
    }

    pub fn id_of(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Id of `token`, falling back to UNK.
    pub fn id_or_unk(&self, token: &str) -> u32 {
        self.id_of(token).unwrap_or(self.unk_id)
    }

    pub fn token(&self, id: u32) -> &Token {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn encode(&self, sentence: &SentenceTokens) -> Vec<u32> {
        sentence.iter().map(|t| self.id_or_unk(t.as_str())).collect()
    }
}

/// Aligned source/target sentence pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParallelCorpus {
    pairs: Vec<(SentenceTokens, SentenceTokens)>,
}

impl ParallelCorpus {
    pub fn new(pairs: Vec<(SentenceTokens, SentenceTokens)>) -> Result<Self> {
        if let Some(i) = pairs.iter().position(|(s, t)| s.is_empty() || t.is_empty()) {
            return Err(Error::InvalidArgument(format!("pair {i} has an empty side")));
        }
        Ok(ParallelCorpus { pairs })
    }

    pub fn from_sides(sources: Vec<SentenceTokens>, targets: Vec<SentenceTokens>) -> Result<Self> {
        if sources.len() != targets.len() {
            return Err(Error::LengthMismatch {
                left: sources.len(),
                right: targets.len(),
            });
        }
        Self::new(sources.into_iter().zip(targets).collect())
    }

    pub fn pairs(&self) -> &[(SentenceTokens, SentenceTokens)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn sources(&self) -> impl Iterator<Item = &SentenceTokens> {
        self.pairs.iter().map(|(s, _)| s)
    }

    pub fn targets(&self) -> impl Iterator<Item = &SentenceTokens> {
        self.pairs.iter().map(|(_, t)| t)
    }

    /// Reads two line-aligned UTF-8 files.
    pub fn read_aligned(src: &Path, tgt: &Path) -> Result<Self> {
        let src_text = std::fs::read_to_string(src).map_err(|e| Error::io(src, e))?;
        let tgt_text = std::fs::read_to_string(tgt).map_err(|e| Error::io(tgt, e))?;
        let sources: Vec<_> = src_text.lines().map(tokenize).collect();
        let targets: Vec<_> = tgt_text.lines().map(tokenize).collect();
        if sources.len() != targets.len() {
            return Err(Error::LengthMismatch {
                left: sources.len(),
                right: targets.len(),
            });
        }
        for (i, (s, t)) in sources.iter().zip(&targets).enumerate() {
            if s.is_empty() {
                return Err(Error::parse(src.display().to_string(), i + 1, "empty sentence"));
            }
            if t.is_empty() {
                return Err(Error::parse(tgt.display().to_string(), i + 1, "empty sentence"));
            }
        }
        Self::from_sides(sources, targets)
    }

    /// Reads `source<TAB>target` lines. Lines starting with `#` are headers.
    pub fn read_tsv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text, &path.display().to_string())
    }

    pub fn parse_tsv(text: &str, name: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (s, t) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(name, i + 1, "expected source<TAB>target"))?;
            let (s, t) = (tokenize(s), tokenize(t));
            if s.is_empty() || t.is_empty() {
                return Err(Error::parse(name, i + 1, "empty sentence"));
            }
            pairs.push((s, t));
        }
        Self::new(pairs)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (s, t) in &self.pairs {
            out.push_str(&s.to_string());
            out.push('\t');
            out.push_str(&t.to_string());
            out.push('\n');
        }
        out
    }
}

/// Frequency-ranked vocabulary for one side of a corpus. The target side also
/// reserves begin- and end-of-sentence symbols.
pub fn build_vocabulary(corpus: &ParallelCorpus, side: Side, max_size: usize) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if max_size < 2 {
        return Err(Error::InvalidArgument("max_size must be at least 2".into()));
    }
    match side {
        Side::Source => Vocabulary::from_counts(corpus.sources(), max_size, &[]),
        Side::Target => Vocabulary::from_counts(corpus.targets(), max_size, &[BOS, EOS]),
    }
}
