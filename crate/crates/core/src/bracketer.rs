//! Greedy longest-match bracketing.
//!
//! The scan walks the tag sequence left to right. At each position the
//! longest rule matching there is applied and the scan resumes right after
//! the new span; when nothing matches, the scan moves one token on. Spans
//! are never revisited, so the work per sentence is bounded by
//! `len * max_rule_len` trie steps regardless of grammar size.
//!
//! Two distinct rules cannot match the same tags at the same position and
//! length, so there are no ties to break.

use rayon::prelude::*;

use crate::corpus::{Corpus, Sentence, Span};
use crate::grammar::{Rule, RuleId, RuleTrie};

/// One proposed NP and the rule that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Match {
    pub span: Span,
    pub rule: RuleId,
}

/// Proposed NPs of one sentence, sorted by start and pairwise disjoint.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BracketedOutput {
    pub matches: Vec<Match>,
}

impl BracketedOutput {
    pub fn spans(&self) -> impl Iterator<Item = Span> + '_ {
        self.matches.iter().map(|m| m.span)
    }

    /// Rule that produced `span`, if `span` was proposed.
    pub fn rule_of<'t>(&self, span: Span, trie: &'t RuleTrie) -> Option<&'t Rule> {
        self.matches
            .iter()
            .find(|m| m.span == span)
            .map(|m| trie.rule(m.rule))
    }
}

/// Work counters for one or more scans.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScanStats {
    /// Scan positions examined.
    pub steps: u64,
    /// Trie nodes entered below the root.
    pub node_visits: u64,
}

pub fn bracket<S: AsRef<str>>(tags: &[S], trie: &RuleTrie) -> BracketedOutput {
    bracket_counted(tags, trie, &mut ScanStats::default())
}

/// [`bracket`], accumulating work counters into `stats`.
pub fn bracket_counted<S: AsRef<str>>(
    tags: &[S],
    trie: &RuleTrie,
    stats: &mut ScanStats,
) -> BracketedOutput {
    let mut matches = Vec::new();
    let mut i = 0;
    while i < tags.len() {
        stats.steps += 1;
        match trie.longest_prefix(&tags[i..], &mut stats.node_visits) {
            Some((len, rule)) => {
                matches.push(Match {
                    span: Span {
                        start: i,
                        end: i + len,
                    },
                    rule,
                });
                i += len;
            }
            None => i += 1,
        }
    }
    BracketedOutput { matches }
}

fn bracket_sentence(sentence: &Sentence, trie: &RuleTrie) -> Sentence {
    let out = bracket(&sentence.tags(), trie);
    sentence
        .with_nps(out.spans().collect())
        .expect("bracketer spans are disjoint and in bounds")
}

/// Replaces every sentence's spans with the bracketer's proposals.
pub fn bracket_corpus(corpus: &Corpus, trie: &RuleTrie) -> Corpus {
    Corpus::new(
        corpus
            .sentences
            .iter()
            .map(|s| bracket_sentence(s, trie))
            .collect(),
        corpus.source.clone(),
    )
}

/// [`bracket_corpus`] across the current rayon pool; output order matches
/// input order.
pub fn par_bracket_corpus(corpus: &Corpus, trie: &RuleTrie) -> Corpus {
    Corpus::new(
        corpus
            .sentences
            .par_iter()
            .map(|s| bracket_sentence(s, trie))
            .collect(),
        corpus.source.clone(),
    )
}
