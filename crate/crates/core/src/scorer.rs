//! Precision/recall evaluation and per-rule benefit scoring.
//!
//! A rule's benefit on a pruning corpus is the number of NPs it brackets
//! exactly, minus the precision errors it is responsible for. A wrong span
//! is charged to its rule when it is the first proposal to touch some
//! reference NP, or when it touches no reference NP at all. Wrong spans
//! that only touch reference NPs already broken by an earlier proposal go
//! unattributed.

use std::collections::BTreeMap;
use std::fmt;

use crate::bracketer::{bracket, Match};
use crate::corpus::{Corpus, Sentence, Span};
use crate::error::{Error, Result};
use crate::grammar::{Rule, RuleTrie};
use crate::num::{percent, Scalar};
use crate::{Fraction, Real};

/// Span counts over a corpus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EvalReport {
    pub proposed: u64,
    pub correct: u64,
    pub reference: u64,
}

impl EvalReport {
    /// Correct / proposed, zero when nothing was proposed.
    pub fn precision_as<T: Scalar>(&self) -> T {
        T::ratio(self.correct, self.proposed)
    }

    /// Correct / reference, zero when there are no reference NPs.
    pub fn recall_as<T: Scalar>(&self) -> T {
        T::ratio(self.correct, self.reference)
    }

    pub fn precision(&self) -> Real {
        self.precision_as()
    }

    pub fn recall(&self) -> Real {
        self.recall_as()
    }

    pub fn exact_precision(&self) -> Fraction {
        self.precision_as()
    }

    pub fn exact_recall(&self) -> Fraction {
        self.recall_as()
    }

    pub fn merge(&mut self, other: &EvalReport) {
        self.proposed += other.proposed;
        self.correct += other.correct;
        self.reference += other.reference;
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "proposed={} correct={} reference={} P={} R={}",
            self.proposed,
            self.correct,
            self.reference,
            percent(self.exact_precision()),
            percent(self.exact_recall()),
        )
    }
}

fn count_sentence(proposed: &[Span], reference: &[Span]) -> EvalReport {
    // Both lists are sorted and disjoint, so a merge walk finds exact matches.
    let (mut i, mut j, mut correct) = (0, 0, 0);
    while i < proposed.len() && j < reference.len() {
        match proposed[i].cmp(&reference[j]) {
            std::cmp::Ordering::Equal => {
                correct += 1;
                i += 1;
                j += 1;
            }
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    EvalReport {
        proposed: proposed.len() as u64,
        correct,
        reference: reference.len() as u64,
    }
}

fn check_aligned(a: &Sentence, b: &Sentence, index: usize) -> Result<()> {
    if a.tokens() != b.tokens() {
        return Err(Error::Misaligned(format!(
            "sentence {} differs between the corpora",
            index + 1
        )));
    }
    Ok(())
}

/// Compares proposed spans against reference spans. A proposal is correct
/// only if a reference span has the same start and end.
pub fn evaluate(proposed: &Corpus, reference: &Corpus) -> Result<EvalReport> {
    if proposed.len() != reference.len() {
        return Err(Error::Misaligned(format!(
            "{} proposed sentences vs {} reference sentences",
            proposed.len(),
            reference.len()
        )));
    }
    let mut report = EvalReport::default();
    for (i, (p, r)) in proposed
        .sentences
        .iter()
        .zip(&reference.sentences)
        .enumerate()
    {
        check_aligned(p, r, i)?;
        report.merge(&count_sentence(p.nps(), r.nps()));
    }
    Ok(report)
}

/// Whether a wrong span that overlaps no reference NP counts against its
/// rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ChargePolicy {
    #[default]
    ChargeUnanchored,
    IgnoreUnanchored,
}

/// Correct and charged-error counts for one rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleScore {
    pub correct: u64,
    pub errors: u64,
}

impl RuleScore {
    pub fn benefit(&self) -> i64 {
        self.correct as i64 - self.errors as i64
    }
}

/// Per-rule scores over a pruning corpus, plus the corpus-level counts of
/// the same bracketing run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BenefitTable {
    pub scores: BTreeMap<Rule, RuleScore>,
    /// Wrong spans not charged to any rule.
    pub unattributed: u64,
    pub report: EvalReport,
}

impl BenefitTable {
    pub fn benefit(&self, rule: &Rule) -> Option<i64> {
        self.scores.get(rule).map(RuleScore::benefit)
    }

    pub fn total_correct(&self) -> u64 {
        self.scores.values().map(|s| s.correct).sum()
    }

    pub fn total_errors(&self) -> u64 {
        self.scores.values().map(|s| s.errors).sum()
    }
}

/// What happened to one proposed span during scoring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Correct,
    Charged,
    Unattributed,
}

/// Classifies a sentence's proposals in scan order.
pub fn attribute(matches: &[Match], reference: &[Span], policy: ChargePolicy) -> Vec<Outcome> {
    let mut touched = vec![false; reference.len()];
    let mut first_ref = 0;
    let mut outcomes = Vec::with_capacity(matches.len());
    for m in matches {
        let span = m.span;
        while first_ref < reference.len() && reference[first_ref].end <= span.start {
            first_ref += 1;
        }
        let overlapping = reference[first_ref..]
            .iter()
            .take_while(|r| r.start < span.end)
            .count();
        let hits = first_ref..first_ref + overlapping;

        let outcome = if reference[hits.clone()].contains(&span) {
            Outcome::Correct
        } else if overlapping == 0 {
            match policy {
                ChargePolicy::ChargeUnanchored => Outcome::Charged,
                ChargePolicy::IgnoreUnanchored => Outcome::Unattributed,
            }
        } else if touched[hits.clone()].iter().any(|t| !t) {
            Outcome::Charged
        } else {
            Outcome::Unattributed
        };
        for t in &mut touched[hits] {
            *t = true;
        }
        outcomes.push(outcome);
    }
    outcomes
}

pub fn score_rules(pruning: &Corpus, trie: &RuleTrie) -> BenefitTable {
    score_rules_with(pruning, trie, ChargePolicy::default())
}

/// Brackets each pruning sentence with `trie` and scores every rule of the
/// trie. Rules that never fire score zero.
pub fn score_rules_with(pruning: &Corpus, trie: &RuleTrie, policy: ChargePolicy) -> BenefitTable {
    let mut counts = vec![RuleScore::default(); trie.rules().len()];
    let mut table = BenefitTable::default();
    for sentence in &pruning.sentences {
        let out = bracket(&sentence.tags(), trie);
        let proposed: Vec<Span> = out.spans().collect();
        table
            .report
            .merge(&count_sentence(&proposed, sentence.nps()));
        for (m, outcome) in out
            .matches
            .iter()
            .zip(attribute(&out.matches, sentence.nps(), policy))
        {
            match outcome {
                Outcome::Correct => counts[m.rule].correct += 1,
                Outcome::Charged => counts[m.rule].errors += 1,
                Outcome::Unattributed => table.unattributed += 1,
            }
        }
    }
    table.scores = trie.rules().iter().cloned().zip(counts).collect();
    table
}
