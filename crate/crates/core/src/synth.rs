//! A seeded synthetic translation task.
//!
//! Sentences follow `NP VERB NP [PREP NP] [ADV]` where a noun phrase is
//! either `DET [ADJ] NOUN` or a rare proper name. Each content word has two
//! source spellings that share a stem and translate to the same target word;
//! words of one class share a suffix. Verbs restrict their subjects and
//! objects, nouns their adjectives, so a missing word can often be guessed
//! from context. Translation is word for word, except that names are copied
//! and are rare enough to fall outside the vocabularies.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::rng::RngState;
use crate::text::{ParallelCorpus, SentenceTokens, Token};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub nouns: usize,
    pub adjectives: usize,
    pub verbs: usize,
    pub adverbs: usize,
    pub determiners: usize,
    pub prepositions: usize,
    /// Probability that a noun phrase is a proper name.
    pub name_rate: f64,
    pub adjective_rate: f64,
    pub pp_rate: f64,
    pub adverb_rate: f64,
    pub name_pool: usize,
    pub subjects_per_verb: usize,
    pub objects_per_verb: usize,
    pub adjectives_per_noun: usize,
    pub objects_per_preposition: usize,
    pub adverbs_per_verb: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            train: 3000,
            valid: 200,
            test: 200,
            nouns: 24,
            adjectives: 12,
            verbs: 12,
            adverbs: 6,
            determiners: 4,
            prepositions: 4,
            name_rate: 0.0,
            adjective_rate: 0.5,
            pp_rate: 0.5,
            adverb_rate: 0.4,
            name_pool: 5000,
            subjects_per_verb: 4,
            objects_per_verb: 3,
            adjectives_per_noun: 2,
            objects_per_preposition: 4,
            adverbs_per_verb: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Class {
    Noun,
    Adjective,
    Verb,
    Adverb,
    Determiner,
    Preposition,
}

impl Class {
    fn suffix(self) -> &'static str {
        match self {
            Class::Noun => "or",
            Class::Adjective => "ine",
            Class::Verb => "ast",
            Class::Adverb => "emu",
            Class::Determiner | Class::Preposition => "",
        }
    }

    fn has_synonyms(self) -> bool {
        !matches!(self, Class::Determiner | Class::Preposition)
    }
}

/// Source spellings and target word of one concept.
#[derive(Debug, Clone, PartialEq)]
struct Concept {
    sources: Vec<String>,
    target: String,
}

/// The generated lexicon and grammar preferences.
#[derive(Debug, Clone)]
pub struct Lexicon {
    nouns: Vec<Concept>,
    adjectives: Vec<Concept>,
    verbs: Vec<Concept>,
    adverbs: Vec<Concept>,
    determiners: Vec<Concept>,
    prepositions: Vec<Concept>,
    subjects: Vec<Vec<usize>>,
    objects: Vec<Vec<usize>>,
    modifiers: Vec<Vec<usize>>,
    pp_objects: Vec<Vec<usize>>,
    verb_adverbs: Vec<Vec<usize>>,
    names: Vec<String>,
}

const CONSONANTS: &[char] = &['b', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v', 'z'];
const VOWELS: &[char] = &['a', 'e', 'i', 'o', 'u'];

fn syllable(rng: &mut RngState) -> String {
    let mut s = String::new();
    s.push(*rng.choose(CONSONANTS));
    s.push(*rng.choose(VOWELS));
    s
}

fn fresh(rng: &mut RngState, used: &mut HashSet<String>, mut make: impl FnMut(&mut RngState) -> String) -> String {
    loop {
        let w = make(rng);
        if used.insert(w.clone()) {
            return w;
        }
    }
}

fn subset(rng: &mut RngState, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut all);
    all.truncate(k.min(n));
    all.sort_unstable();
    all
}

impl Lexicon {
    pub fn generate(config: &SynthConfig, rng: &mut RngState) -> Self {
        let mut src_used = HashSet::new();
        let mut tgt_used = HashSet::new();
        let mut concepts = |class: Class, count: usize, rng: &mut RngState| -> Vec<Concept> {
            (0..count)
                .map(|_| {
                    let sources = if class.has_synonyms() {
                        loop {
                            let head = syllable(rng);
                            let (a, b) = (syllable(rng), syllable(rng));
                            let first = format!("{head}{a}{}", class.suffix());
                            let second = format!("{head}{b}{}", class.suffix());
                            if a != b && !src_used.contains(&first) && !src_used.contains(&second) {
                                src_used.insert(first.clone());
                                src_used.insert(second.clone());
                                break vec![first, second];
                            }
                        }
                    } else {
                        vec![fresh(rng, &mut src_used, |r| {
                            let mut w = syllable(r);
                            w.push(*r.choose(CONSONANTS));
                            w
                        })]
                    };
                    let target = fresh(rng, &mut tgt_used, |r| {
                        let n = if class.has_synonyms() { 2 + r.below(2) } else { 1 };
                        let mut w: String = (0..n).map(|_| syllable(r)).collect();
                        if !class.has_synonyms() {
                            w.push('y');
                        }
                        w
                    });
                    Concept { sources, target }
                })
                .collect()
        };
        let nouns = concepts(Class::Noun, config.nouns, rng);
        let adjectives = concepts(Class::Adjective, config.adjectives, rng);
        let verbs = concepts(Class::Verb, config.verbs, rng);
        let adverbs = concepts(Class::Adverb, config.adverbs, rng);
        let determiners = concepts(Class::Determiner, config.determiners, rng);
        let prepositions = concepts(Class::Preposition, config.prepositions, rng);

        let n = nouns.len();
        let subjects = (0..verbs.len())
            .map(|_| subset(rng, n, config.subjects_per_verb))
            .collect();
        let objects = (0..verbs.len())
            .map(|_| subset(rng, n, config.objects_per_verb))
            .collect();
        let modifiers = (0..n)
            .map(|_| subset(rng, adjectives.len(), config.adjectives_per_noun))
            .collect();
        let pp_objects = (0..prepositions.len())
            .map(|_| subset(rng, n, config.objects_per_preposition))
            .collect();
        let verb_adverbs = (0..verbs.len())
            .map(|_| subset(rng, adverbs.len(), config.adverbs_per_verb))
            .collect();

        let mut name_used = HashSet::new();
        let names = (0..config.name_pool)
            .map(|_| {
                fresh(rng, &mut name_used, |r| {
                    let n = 2 + r.below(2);
                    let w: String = (0..n).map(|_| syllable(r)).collect();
                    let mut c = w.chars();
                    let first = c.next().expect("non-empty").to_ascii_uppercase();
                    std::iter::once(first).chain(c).collect()
                })
            })
            .collect();
        Lexicon {
            nouns,
            adjectives,
            verbs,
            adverbs,
            determiners,
            prepositions,
            subjects,
            objects,
            modifiers,
            pp_objects,
            verb_adverbs,
            names,
        }
    }

    /// Number of distinct in-lexicon source and target words.
    pub fn sizes(&self) -> (usize, usize) {
        let all = [
            &self.nouns,
            &self.adjectives,
            &self.verbs,
            &self.adverbs,
            &self.determiners,
            &self.prepositions,
        ];
        let src = all
            .iter()
            .map(|c| c.iter().map(|k| k.sources.len()).sum::<usize>())
            .sum();
        let tgt = all.iter().map(|c| c.len()).sum();
        (src, tgt)
    }

    fn emit(concept: &Concept, rng: &mut RngState, src: &mut Vec<String>, tgt: &mut Vec<String>) {
        src.push(rng.choose(&concept.sources).clone());
        tgt.push(concept.target.clone());
    }

    fn noun_phrase(
        &self,
        config: &SynthConfig,
        allowed: &[usize],
        rng: &mut RngState,
        src: &mut Vec<String>,
        tgt: &mut Vec<String>,
    ) {
        if rng.bernoulli(config.name_rate) {
            let name = rng.choose(&self.names).clone();
            src.push(name.clone());
            tgt.push(name);
            return;
        }
        let noun = *rng.choose(allowed);
        let det = rng.choose(&self.determiners);
        Self::emit(det, rng, src, tgt);
        if rng.bernoulli(config.adjective_rate) {
            let adj = *rng.choose(&self.modifiers[noun]);
            Self::emit(&self.adjectives[adj], rng, src, tgt);
        }
        Self::emit(&self.nouns[noun], rng, src, tgt);
    }

    pub fn sentence(&self, config: &SynthConfig, rng: &mut RngState) -> (SentenceTokens, SentenceTokens) {
        let (mut src, mut tgt) = (Vec::new(), Vec::new());
        let verb = rng.below(self.verbs.len());
        self.noun_phrase(config, &self.subjects[verb], rng, &mut src, &mut tgt);
        Self::emit(&self.verbs[verb], rng, &mut src, &mut tgt);
        self.noun_phrase(config, &self.objects[verb], rng, &mut src, &mut tgt);
        if rng.bernoulli(config.pp_rate) {
            let prep = rng.below(self.prepositions.len());
            Self::emit(&self.prepositions[prep], rng, &mut src, &mut tgt);
            self.noun_phrase(config, &self.pp_objects[prep], rng, &mut src, &mut tgt);
        }
        if rng.bernoulli(config.adverb_rate) {
            let adv = *rng.choose(&self.verb_adverbs[verb]);
            Self::emit(&self.adverbs[adv], rng, &mut src, &mut tgt);
        }
        let wrap =
            |ws: Vec<String>| SentenceTokens::new(ws.into_iter().map(|w| Token::new(w).expect("valid word")).collect());
        (wrap(src), wrap(tgt))
    }
}

/// Train, validation and test splits plus vocabulary sizes that cover the
/// lexicon (reserved symbols included) but not the names.
#[derive(Debug, Clone)]
pub struct SynthTask {
    pub train: ParallelCorpus,
    pub valid: ParallelCorpus,
    pub test: ParallelCorpus,
    pub src_vocab_size: usize,
    pub tgt_vocab_size: usize,
}

pub fn generate(config: &SynthConfig, seed: u64) -> SynthTask {
    let root = RngState::new(seed);
    let lexicon = Lexicon::generate(config, &mut root.fork(0));
    let split = |n: usize, stream: u64| {
        let mut rng = root.fork(stream);
        let pairs = (0..n).map(|_| lexicon.sentence(config, &mut rng)).collect();
        ParallelCorpus::new(pairs).expect("sentences are non-empty")
    };
    let (src, tgt) = lexicon.sizes();
    SynthTask {
        train: split(config.train, 1),
        valid: split(config.valid, 2),
        test: split(config.test, 3),
        src_vocab_size: src + 1,
        tgt_vocab_size: tgt + 3,
    }
}
