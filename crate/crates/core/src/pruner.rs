//! Grammar pruning: threshold, incremental and rule-class filtering.
//!
//! Both automatic methods repeat the same cycle on a held-out pruning
//! corpus: bracket with the current grammar, score every rule, discard the
//! worst. Scores are recomputed from scratch each round because removing a
//! rule changes what its neighbours bracket.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use log::debug;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::grammar::{Grammar, Rule, RuleTrie};
use crate::num::Scalar;
use crate::scorer::{score_rules, BenefitTable, EvalReport};
use crate::Fraction;

/// Grammar state after one round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PruneStep {
    pub iteration: usize,
    pub discarded: usize,
    pub remaining: usize,
    /// Pruning-corpus counts for the grammar of `remaining` rules.
    pub report: EvalReport,
}

impl PruneStep {
    pub fn precision(&self) -> Fraction {
        self.report.exact_precision()
    }

    pub fn recall(&self) -> Fraction {
        self.report.exact_recall()
    }
}

/// Row 0 is the input grammar; each later row follows one discard batch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PruneTrace {
    pub steps: Vec<PruneStep>,
}

impl PruneTrace {
    /// CSV with header `iter,discarded,remaining,precision,recall`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "iter,discarded,remaining,precision,recall")?;
        for s in &self.steps {
            writeln!(
                out,
                "{},{},{},{:.6},{:.6}",
                s.iteration,
                s.discarded,
                s.remaining,
                s.precision().to_f64(),
                s.recall().to_f64()
            )?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn max_precision(&self) -> Option<Fraction> {
        self.steps.iter().map(PruneStep::precision).max()
    }
}

#[derive(Clone, Debug)]
pub struct PruneOutcome {
    /// Selected grammar, carrying the benefits it scored when selected.
    pub grammar: Grammar,
    pub trace: PruneTrace,
    /// Index into `trace.steps` of the selected grammar.
    pub selected: usize,
    /// Number of scoring passes over the pruning corpus.
    pub passes: usize,
}

impl PruneOutcome {
    pub fn selected_step(&self) -> &PruneStep {
        &self.trace.steps[self.selected]
    }
}

struct Scored {
    grammar: Grammar,
    table: BenefitTable,
}

fn score(mut grammar: Grammar, pruning: &Corpus) -> Scored {
    let table = score_rules(pruning, &RuleTrie::compile(&grammar));
    for (rule, s) in &table.scores {
        grammar.set_benefit(rule, s.benefit());
    }
    Scored { grammar, table }
}

/// Repeatedly discards every rule whose benefit is below `threshold` until
/// none is left below it or the grammar is empty.
pub fn prune_threshold(grammar: &Grammar, pruning: &Corpus, threshold: i64) -> PruneOutcome {
    let mut current = score(grammar.clone(), pruning);
    let mut passes = 1;
    let mut trace = PruneTrace {
        steps: vec![PruneStep {
            iteration: 0,
            discarded: 0,
            remaining: current.grammar.len(),
            report: current.table.report,
        }],
    };
    loop {
        let doomed: Vec<Rule> = current
            .table
            .scores
            .iter()
            .filter(|(_, s)| s.benefit() < threshold)
            .map(|(r, _)| r.clone())
            .collect();
        if doomed.is_empty() {
            break;
        }
        let mut next = current.grammar;
        for rule in &doomed {
            next.remove(rule);
        }
        current = score(next, pruning);
        passes += 1;
        let step = PruneStep {
            iteration: trace.steps.len(),
            discarded: doomed.len(),
            remaining: current.grammar.len(),
            report: current.table.report,
        };
        debug!(
            "threshold pass {}: dropped {}, {} left, P={}",
            step.iteration,
            step.discarded,
            step.remaining,
            step.precision().to_f64()
        );
        trace.steps.push(step);
        if current.grammar.is_empty() {
            break;
        }
    }
    PruneOutcome {
        grammar: current.grammar,
        selected: trace.steps.len() - 1,
        trace,
        passes,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IncrementalConfig {
    /// Rules discarded per round.
    pub batch: usize,
    /// Rounds below the best precision tolerated before stopping.
    pub patience: usize,
}

impl Default for IncrementalConfig {
    fn default() -> Self {
        IncrementalConfig {
            batch: 10,
            patience: 0,
        }
    }
}

/// The `batch` worst rules: lowest benefit, then lowest frequency, then
/// lexicographic tag order.
fn worst_rules(scored: &Scored, batch: usize) -> Vec<Rule> {
    let mut ranked: Vec<(i64, u32, &Rule)> = scored
        .table
        .scores
        .iter()
        .map(|(rule, s)| {
            let freq = scored.grammar.stats(rule).map_or(0, |st| st.frequency);
            (s.benefit(), freq, rule)
        })
        .collect();
    ranked.sort();
    ranked
        .into_iter()
        .take(batch)
        .map(|(_, _, r)| r.clone())
        .collect()
}

/// Discards the `batch` worst rules per round while tracking pruning-corpus
/// precision, and returns the earliest grammar with the highest precision.
pub fn prune_incremental(
    grammar: &Grammar,
    pruning: &Corpus,
    config: IncrementalConfig,
) -> PruneOutcome {
    let batch = config.batch.max(1);
    let mut current = score(grammar.clone(), pruning);
    let mut passes = 1;
    let mut trace = PruneTrace {
        steps: vec![PruneStep {
            iteration: 0,
            discarded: 0,
            remaining: current.grammar.len(),
            report: current.table.report,
        }],
    };
    let mut best = (
        current.table.report.exact_precision(),
        0,
        current.grammar.clone(),
    );
    let mut misses = 0;
    while !current.grammar.is_empty() {
        let doomed = worst_rules(&current, batch);
        let mut next = current.grammar;
        for rule in &doomed {
            next.remove(rule);
        }
        current = score(next, pruning);
        passes += 1;
        let precision = current.table.report.exact_precision();
        let iteration = trace.steps.len();
        trace.steps.push(PruneStep {
            iteration,
            discarded: doomed.len(),
            remaining: current.grammar.len(),
            report: current.table.report,
        });
        debug!(
            "incremental pass {iteration}: {} left, P={}",
            current.grammar.len(),
            precision.to_f64()
        );
        if precision > best.0 {
            best = (precision, iteration, current.grammar.clone());
            misses = 0;
        } else if precision < best.0 {
            misses += 1;
            if misses > config.patience {
                break;
            }
        }
    }
    PruneOutcome {
        grammar: best.2,
        selected: best.1,
        trace,
        passes,
    }
}

/// Coarse word class of a POS tag, as used by the rule-class filters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TagClass {
    Noun,
    Pronoun,
    Verb,
    Adverb,
    Adjective,
    Preposition,
    Wh,
    Period,
    Colon,
    Comma,
    Quote,
    Other,
}

impl FromStr for TagClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "noun" => TagClass::Noun,
            "pronoun" => TagClass::Pronoun,
            "verb" => TagClass::Verb,
            "adverb" => TagClass::Adverb,
            "adjective" => TagClass::Adjective,
            "preposition" => TagClass::Preposition,
            "wh" => TagClass::Wh,
            "period" | "punctuation-period" => TagClass::Period,
            "colon" | "punctuation-colon" => TagClass::Colon,
            "comma" | "punctuation-comma" => TagClass::Comma,
            "quote" => TagClass::Quote,
            "other" => TagClass::Other,
            _ => return Err(Error::InvalidArgument(format!("unknown tag class {s:?}"))),
        })
    }
}

/// Tag to [`TagClass`] mapping.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TagsetMap {
    classes: HashMap<String, TagClass>,
}

const PENN: &[(&str, TagClass)] = &[
    ("NN", TagClass::Noun),
    ("NNS", TagClass::Noun),
    ("NNP", TagClass::Noun),
    ("NNPS", TagClass::Noun),
    ("PRP", TagClass::Pronoun),
    ("PRP$", TagClass::Pronoun),
    ("VB", TagClass::Verb),
    ("VBD", TagClass::Verb),
    ("VBG", TagClass::Verb),
    ("VBN", TagClass::Verb),
    ("VBP", TagClass::Verb),
    ("VBZ", TagClass::Verb),
    ("MD", TagClass::Verb),
    ("RB", TagClass::Adverb),
    ("RBR", TagClass::Adverb),
    ("RBS", TagClass::Adverb),
    ("JJ", TagClass::Adjective),
    ("JJR", TagClass::Adjective),
    ("JJS", TagClass::Adjective),
    ("IN", TagClass::Preposition),
    ("WDT", TagClass::Wh),
    ("WP", TagClass::Wh),
    ("WP$", TagClass::Wh),
    ("WRB", TagClass::Wh),
    (".", TagClass::Period),
    (":", TagClass::Colon),
    (",", TagClass::Comma),
    ("``", TagClass::Quote),
    ("''", TagClass::Quote),
    ("\"", TagClass::Quote),
    ("CC", TagClass::Other),
    ("CD", TagClass::Other),
    ("DT", TagClass::Other),
    ("EX", TagClass::Other),
    ("FW", TagClass::Other),
    ("LS", TagClass::Other),
    ("PDT", TagClass::Other),
    ("POS", TagClass::Other),
    ("RP", TagClass::Other),
    ("SYM", TagClass::Other),
    ("TO", TagClass::Other),
    ("UH", TagClass::Other),
    ("$", TagClass::Other),
    ("#", TagClass::Other),
    ("-LRB-", TagClass::Other),
    ("-RRB-", TagClass::Other),
    ("(", TagClass::Other),
    (")", TagClass::Other),
];

impl TagsetMap {
    /// Penn Treebank tagset.
    pub fn penn() -> Self {
        TagsetMap {
            classes: PENN.iter().map(|(t, c)| (t.to_string(), *c)).collect(),
        }
    }

    pub fn insert(&mut self, tag: impl Into<String>, class: TagClass) {
        self.classes.insert(tag.into(), class);
    }

    pub fn class_of(&self, tag: &str) -> Option<TagClass> {
        self.classes.get(tag).copied()
    }

    /// Reads `TAG<TAB>class` lines; `#` starts a comment line.
    pub fn load<R: Read>(source: R, name: &str) -> Result<Self> {
        let mut map = TagsetMap::default();
        for (i, line) in BufReader::new(source).lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (tag, class) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(name, i + 1, None, "expected TAG<TAB>class"))?;
            let class = class
                .parse()
                .map_err(|e: Error| Error::parse(name, i + 1, None, e.to_string()))?;
            map.insert(tag.trim(), class);
        }
        Ok(map)
    }
}

/// Rule classes that a human reviewer would strike from a grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleClassFilter {
    /// Any preposition, period or colon.
    PrepositionPeriodColon,
    /// Any WH tag.
    Wh,
    /// First or last tag is a verb or adverb.
    VerbOrAdverbEdge,
    /// A pronoun together with at least one other tag.
    PronounWithOthers,
    /// A comma or quote at either edge, or an unpaired quote.
    MisplacedCommaOrQuote,
    /// Last tag is an adjective.
    EndsWithAdjective,
}

impl RuleClassFilter {
    pub const ALL: [RuleClassFilter; 6] = [
        RuleClassFilter::PrepositionPeriodColon,
        RuleClassFilter::Wh,
        RuleClassFilter::VerbOrAdverbEdge,
        RuleClassFilter::PronounWithOthers,
        RuleClassFilter::MisplacedCommaOrQuote,
        RuleClassFilter::EndsWithAdjective,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleClassFilter::PrepositionPeriodColon => "prep-period-colon",
            RuleClassFilter::Wh => "wh",
            RuleClassFilter::VerbOrAdverbEdge => "verb-adverb-edge",
            RuleClassFilter::PronounWithOthers => "pronoun-with-others",
            RuleClassFilter::MisplacedCommaOrQuote => "misplaced-comma-quote",
            RuleClassFilter::EndsWithAdjective => "ends-with-adjective",
        }
    }

    /// `classes` holds the class of each tag of the rule, in order.
    pub fn matches(self, rule: &Rule, classes: &[TagClass]) -> bool {
        use TagClass::*;
        let first = classes.first().copied();
        let last = classes.last().copied();
        match self {
            RuleClassFilter::PrepositionPeriodColon => classes
                .iter()
                .any(|c| matches!(c, Preposition | Period | Colon)),
            RuleClassFilter::Wh => classes.contains(&Wh),
            RuleClassFilter::VerbOrAdverbEdge => [first, last]
                .iter()
                .any(|c| matches!(c, Some(Verb | Adverb))),
            RuleClassFilter::PronounWithOthers => classes.len() > 1 && classes.contains(&Pronoun),
            RuleClassFilter::MisplacedCommaOrQuote => {
                [first, last]
                    .iter()
                    .any(|c| matches!(c, Some(Comma | Quote)))
                    || unpaired_quote(rule, classes)
            }
            RuleClassFilter::EndsWithAdjective => last == Some(Adjective),
        }
    }
}

// `` opens and '' closes; any other quote tag pairs with itself.
fn unpaired_quote(rule: &Rule, classes: &[TagClass]) -> bool {
    let mut open = 0usize;
    let mut plain = 0usize;
    for (tag, class) in rule.tags().iter().zip(classes) {
        if *class != TagClass::Quote {
            continue;
        }
        match tag.as_str() {
            "``" => open += 1,
            "''" => {
                if open == 0 {
                    return true;
                }
                open -= 1;
            }
            _ => plain += 1,
        }
    }
    open > 0 || plain % 2 == 1
}

impl fmt::Display for RuleClassFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleClassFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RuleClassFilter::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown rule class filter {s:?}")))
    }
}

/// Removes every rule matched by at least one filter. Every tag in the
/// grammar must have a class in `tagset`.
pub fn prune_by_class(
    grammar: &Grammar,
    filters: &BTreeSet<RuleClassFilter>,
    tagset: &TagsetMap,
) -> Result<Grammar> {
    let mut classified = Vec::with_capacity(grammar.len());
    for rule in grammar.rules() {
        let classes = rule
            .tags()
            .iter()
            .map(|t| {
                tagset
                    .class_of(t)
                    .ok_or_else(|| Error::UnclassifiedTag(t.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        classified.push((rule.clone(), classes));
    }
    let mut out = grammar.clone();
    for (rule, classes) in classified {
        if filters.iter().any(|f| f.matches(&rule, &classes)) {
            out.remove(&rule);
        }
    }
    Ok(out)
}
