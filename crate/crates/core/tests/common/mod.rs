//! Fixtures, random instance generators and brute-force oracles shared by
//! the integration tests. The oracles deliberately avoid the library's
//! trie, bracketer and scorer.

#![allow(dead_code)]

use std::collections::BTreeMap;

use basenp::corpus::{read_bracketed, Corpus, Sentence, Span, Token};
use basenp::grammar::{Grammar, Rule};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const POWWOW: &str = include_str!("../data/powwow.txt");
pub const BOCA: &str = include_str!("../data/boca.txt");

pub fn powwow() -> Corpus {
    read_bracketed(POWWOW.as_bytes(), "powwow").unwrap()
}

pub fn boca() -> Corpus {
    read_bracketed(BOCA.as_bytes(), "boca").unwrap()
}

pub fn grammar(rules: &[&str]) -> Grammar {
    rules.iter().map(|r| Rule::parse(r).unwrap()).collect()
}

pub fn tag_alphabet(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("T{i}")).collect()
}

/// Up to `max_rules` distinct rules of length 1..=`max_len`.
pub fn random_rules(
    rng: &mut ChaCha8Rng,
    alphabet: &[String],
    max_rules: usize,
    max_len: usize,
) -> Vec<Vec<String>> {
    let n = rng.gen_range(0..=max_rules);
    let mut rules: Vec<Vec<String>> = Vec::new();
    for _ in 0..n {
        let len = rng.gen_range(1..=max_len);
        let r: Vec<String> = (0..len)
            .map(|_| alphabet.choose(rng).unwrap().clone())
            .collect();
        if !rules.contains(&r) {
            rules.push(r);
        }
    }
    rules
}

pub fn random_tags(rng: &mut ChaCha8Rng, alphabet: &[String], max_len: usize) -> Vec<String> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| alphabet.choose(rng).unwrap().clone())
        .collect()
}

/// Sorted, disjoint random spans over `len` tokens.
pub fn random_spans(rng: &mut ChaCha8Rng, len: usize, max_span: usize) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < len {
        if rng.gen_bool(0.4) {
            let l = rng.gen_range(1..=max_span.min(len - i));
            spans.push(Span {
                start: i,
                end: i + l,
            });
            i += l;
        } else {
            i += 1;
        }
    }
    spans
}

pub fn to_grammar(rules: &[Vec<String>]) -> Grammar {
    rules
        .iter()
        .map(|r| Rule::new(r.clone()).unwrap())
        .collect()
}

/// Longest-match scan that tries every rule at every position.
/// Returns `(start, end, rule index)` triples.
pub fn naive_bracket(tags: &[String], rules: &[Vec<String>]) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        let mut best: Option<(usize, usize)> = None;
        for (k, rule) in rules.iter().enumerate() {
            let fits = i + rule.len() <= tags.len() && tags[i..i + rule.len()] == rule[..];
            if fits && best.is_none_or(|(len, _)| rule.len() > len) {
                best = Some((rule.len(), k));
            }
        }
        match best {
            Some((len, k)) => {
                out.push((i, i + len, k));
                i += len;
            }
            None => i += 1,
        }
    }
    out
}

/// Per-rule `(correct, charged)` by explicit first-toucher bookkeeping:
/// for each reference NP find the earliest proposal overlapping it; a
/// wrong proposal is charged if it is that earliest proposal for some
/// reference NP, or overlaps none.
pub fn brute_force_scores(
    proposals: &[(usize, usize, usize)],
    reference: &[Span],
    n_rules: usize,
    charge_unanchored: bool,
) -> Vec<(u64, u64)> {
    let overlaps = |p: &(usize, usize, usize), r: &Span| p.0 < r.end && r.start < p.1;
    let first_toucher: Vec<Option<usize>> = reference
        .iter()
        .map(|r| proposals.iter().position(|p| overlaps(p, r)))
        .collect();
    let mut scores = vec![(0u64, 0u64); n_rules];
    for (idx, p) in proposals.iter().enumerate() {
        let exact = reference.iter().any(|r| r.start == p.0 && r.end == p.1);
        if exact {
            scores[p.2].0 += 1;
            continue;
        }
        let touched: Vec<usize> = (0..reference.len())
            .filter(|&j| overlaps(p, &reference[j]))
            .collect();
        let charge = if touched.is_empty() {
            charge_unanchored
        } else {
            touched.iter().any(|&j| first_toucher[j] == Some(idx))
        };
        if charge {
            scores[p.2].1 += 1;
        }
    }
    scores
}

/// Random corpus over `alphabet` with random reference spans.
pub fn random_corpus(
    rng: &mut ChaCha8Rng,
    alphabet: &[String],
    sentences: usize,
    max_len: usize,
    max_span: usize,
) -> Corpus {
    let sentences = (0..sentences)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            let tokens: Vec<Token> = (0..len)
                .map(|i| {
                    Token::new(format!("w{i}"), alphabet.choose(rng).unwrap().clone()).unwrap()
                })
                .collect();
            let spans = random_spans(rng, len, max_span);
            Sentence::new(tokens, spans).unwrap()
        })
        .collect();
    Corpus::new(sentences, "random")
}

const WORD_CHARS: &[char] = &['a', 'b', 'Z', '/', '[', ']', 'é', '-', '.', '$', '\'', '1'];
const TAG_CHARS: &[char] = &['a', 'b', 'Z', '[', ']', 'é', '-', '.', '$', '\'', '1'];

/// Random corpus with awkward but legal words and tags.
pub fn random_format_corpus(rng: &mut ChaCha8Rng) -> Corpus {
    let n = rng.gen_range(0..6);
    let sentences = (0..n)
        .map(|_| {
            let len = rng.gen_range(1..10);
            let tokens: Vec<Token> = (0..len)
                .map(|_| {
                    let wl = rng.gen_range(1..5);
                    let word: String = (0..wl).map(|_| *WORD_CHARS.choose(rng).unwrap()).collect();
                    let tl = rng.gen_range(1..4);
                    let tag: String = (0..tl).map(|_| *TAG_CHARS.choose(rng).unwrap()).collect();
                    Token::new(word, tag).unwrap()
                })
                .collect();
            let spans = random_spans(rng, len, 4);
            Sentence::new(tokens, spans).unwrap()
        })
        .collect();
    Corpus::new(sentences, "random")
}

/// Rule -> (correct, charged) from the library's table, for comparison.
pub fn table_pairs(table: &basenp::scorer::BenefitTable) -> BTreeMap<Rule, (u64, u64)> {
    table
        .scores
        .iter()
        .map(|(r, s)| (r.clone(), (s.correct, s.errors)))
        .collect()
}
