//! Local repairs applied to bracketer output.
//!
//! Three rewrites run in a fixed order, each in a single left-to-right pass
//! over the sentence's spans:
//!
//! 1. merge strictly adjacent spans unless either looks like a time
//!    expression (`[household products] [business]`);
//! 2. join simple dates split around a comma (`[June 5] , [1995]`);
//! 3. bracket a quantifier standing before `of NP` (`some of [the companies]`).
//!
//! Only span boundaries change; tokens are never touched.

use std::collections::HashSet;
use std::io::{BufRead, BufReader, Read};

use crate::corpus::{Corpus, Sentence, Span};
use crate::error::{Error, Result};

const MONTHS: &[&str] = &[
    "january",
    "february",
    "march",
    "april",
    "may",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
];

const WEEKDAYS: &[&str] = &[
    "monday",
    "tuesday",
    "wednesday",
    "thursday",
    "friday",
    "saturday",
    "sunday",
];

const TIME_NOUNS: &[&str] = &[
    "yesterday",
    "today",
    "tomorrow",
    "week",
    "month",
    "quarter",
    "year",
    "morning",
    "afternoon",
    "night",
];

const QUANTIFIERS: &[&str] = &[
    "some", "many", "most", "all", "several", "few", "much", "none", "each", "any", "both",
];

fn lexicon(words: &[&[&str]]) -> HashSet<String> {
    words
        .iter()
        .flat_map(|w| w.iter())
        .map(|w| w.to_string())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairConfig {
    pub merge_consecutive: bool,
    pub date_merge: bool,
    pub quantifier_of_split: bool,
    /// Lowercase words that mark a span as a possible time expression.
    pub time_words: HashSet<String>,
    /// Lowercase month names.
    pub month_words: HashSet<String>,
    /// Lowercase quantifiers that may head `Q of NP`.
    pub quantifier_words: HashSet<String>,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            merge_consecutive: true,
            date_merge: true,
            quantifier_of_split: true,
            time_words: lexicon(&[MONTHS, WEEKDAYS, TIME_NOUNS]),
            month_words: lexicon(&[MONTHS]),
            quantifier_words: lexicon(&[QUANTIFIERS]),
        }
    }
}

impl RepairConfig {
    /// Every enabled heuristic needs a nonempty lexicon.
    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.merge_consecutive, &self.time_words, "time"),
            (self.date_merge, &self.month_words, "month"),
            (
                self.quantifier_of_split,
                &self.quantifier_words,
                "quantifier",
            ),
        ];
        for (enabled, words, name) in checks {
            if enabled && words.is_empty() {
                return Err(Error::InvalidArgument(format!("{name} lexicon is empty")));
            }
        }
        Ok(())
    }
}

/// Reads a word-per-line lexicon, lowercased. Blank lines and `#` comments
/// are skipped.
pub fn load_lexicon<R: Read>(source: R) -> Result<HashSet<String>> {
    let mut words = HashSet::new();
    for line in BufReader::new(source).lines() {
        let line = line?;
        let word = line.trim();
        if word.is_empty() || word.starts_with('#') {
            continue;
        }
        words.insert(word.to_lowercase());
    }
    Ok(words)
}

struct View<'a> {
    sentence: &'a Sentence,
    config: &'a RepairConfig,
}

impl View<'_> {
    fn word(&self, i: usize) -> String {
        self.sentence.tokens()[i].word().to_lowercase()
    }

    fn tag(&self, i: usize) -> &str {
        self.sentence.tokens()[i].tag()
    }

    fn is_time_word(&self, i: usize) -> bool {
        self.config.time_words.contains(&self.word(i))
    }

    // A time word, or a number right next to one.
    fn is_time_token(&self, i: usize) -> bool {
        if self.is_time_word(i) {
            return true;
        }
        self.tag(i) == "CD"
            && ((i > 0 && self.is_time_word(i - 1))
                || (i + 1 < self.sentence.len() && self.is_time_word(i + 1)))
    }

    fn is_time_span(&self, span: &Span) -> bool {
        (span.start..span.end).any(|i| self.is_time_token(i))
    }

    fn is_month(&self, i: usize) -> bool {
        self.config.month_words.contains(&self.word(i))
    }

    // [Month] or [Month CD]
    fn is_date_head(&self, span: &Span) -> bool {
        match span.len() {
            1 => self.is_month(span.start),
            2 => self.is_month(span.start) && self.tag(span.start + 1) == "CD",
            _ => false,
        }
    }
}

fn merge_consecutive(view: &View, spans: Vec<Span>) -> Vec<Span> {
    let mut out: Vec<Span> = Vec::with_capacity(spans.len());
    for span in spans {
        if let Some(last) = out.last_mut() {
            if last.end == span.start && !view.is_time_span(last) && !view.is_time_span(&span) {
                last.end = span.end;
                continue;
            }
        }
        out.push(span);
    }
    out
}

fn date_merge(view: &View, spans: Vec<Span>) -> Vec<Span> {
    let mut out = Vec::with_capacity(spans.len());
    let mut i = 0;
    while i < spans.len() {
        let a = spans[i];
        if let Some(b) = spans.get(i + 1) {
            if view.is_date_head(&a)
                && b.start == a.end + 1
                && view.tag(a.end) == ","
                && b.len() == 1
                && view.tag(b.start) == "CD"
            {
                out.push(Span {
                    start: a.start,
                    end: b.end,
                });
                i += 2;
                continue;
            }
        }
        out.push(a);
        i += 1;
    }
    out
}

// The quantifier must not touch a preceding span, or heuristic 1 would
// merge the two on a second pass.
fn quantifier_of_split(view: &View, spans: Vec<Span>) -> Vec<Span> {
    let mut out: Vec<Span> = Vec::with_capacity(spans.len());
    for span in spans {
        if span.start >= 2 {
            let (q, of) = (span.start - 2, span.start - 1);
            let free = out.last().is_none_or(|prev| prev.end < q);
            if free
                && view.word(of) == "of"
                && view.tag(of) == "IN"
                && view.config.quantifier_words.contains(&view.word(q))
            {
                out.push(Span {
                    start: q,
                    end: q + 1,
                });
            }
        }
        out.push(span);
    }
    out
}

pub fn repair_sentence(sentence: &Sentence, config: &RepairConfig) -> Sentence {
    let view = View { sentence, config };
    let mut spans = sentence.nps().to_vec();
    if config.merge_consecutive {
        spans = merge_consecutive(&view, spans);
    }
    if config.date_merge {
        spans = date_merge(&view, spans);
    }
    if config.quantifier_of_split {
        spans = quantifier_of_split(&view, spans);
    }
    sentence
        .with_nps(spans)
        .expect("repairs keep spans sorted and disjoint")
}

pub fn repair(corpus: &Corpus, config: &RepairConfig) -> Corpus {
    Corpus::new(
        corpus
            .sentences
            .iter()
            .map(|s| repair_sentence(s, config))
            .collect(),
        corpus.source.clone(),
    )
}
