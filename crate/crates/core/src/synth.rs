//! Generated corpora from a known flat-NP template grammar.
//!
//! Sentences follow a simple subject-verb-object-PP skeleton. A few
//! constructions are deliberately ambiguous at the tag level (verbal
//! gerunds vs. `VBG NNS` noun phrases, bare quantifiers before `of`,
//! `City , State` names next to comma-separated name lists, occasional
//! over-wide annotations), and a fraction of tags is replaced
//! at random to mimic tagger noise. The extracted grammar is therefore
//! full of harmful rules that pruning should remove.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Sentence, Span, Token};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub sentences: usize,
    /// Probability that a token's tag is replaced by a random tag.
    pub tag_noise: f64,
    /// Probability that a noun phrase plus a following PP is annotated as
    /// one NP.
    pub wide_annotation: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            sentences: 2000,
            tag_noise: 0.05,
            wide_annotation: 0.03,
            seed: 1998,
        }
    }
}

const NP_SHAPES: &[(&[&str], u32)] = &[
    (&["DT", "NN"], 20),
    (&["DT", "JJ", "NN"], 10),
    (&["DT", "NNS"], 8),
    (&["JJ", "NNS"], 6),
    (&["NNS"], 8),
    (&["NN"], 5),
    (&["NNP"], 6),
    (&["NNP", "NNP"], 6),
    (&["PRP"], 8),
    (&["PRP$", "NN"], 4),
    (&["DT", "NN", "NN"], 4),
    (&["CD", "NNS"], 3),
    (&["DT", "JJ", "JJ", "NN"], 2),
    (&["NN", "NNS"], 3),
    (&["VBG", "NNS"], 2),
    (&["DT", "JJ", "NNS"], 4),
];

const ALL_TAGS: &[&str] = &[
    "DT", "NN", "NNS", "NNP", "JJ", "PRP", "PRP$", "CD", "VBG", "VBD", "VBZ", "MD", "VB", "IN",
    "RB", "CC", ",", ".", "TO",
];

fn word_for(tag: &str, rng: &mut ChaCha8Rng) -> &'static str {
    let pool: &[&str] = match tag {
        "DT" => &["the", "a", "this", "every"],
        "NN" => &["company", "market", "price", "plan", "board", "dog", "week"],
        "NNS" => &["titans", "buses", "shares", "towns", "results", "companies"],
        "NNP" => &["Boca", "Raton", "Hot", "Springs", "Palm", "Beach", "June"],
        "JJ" => &["sunny", "biannual", "big", "new", "third-quarter"],
        "PRP" => &["it", "they", "he"],
        "PRP$" => &["their", "its", "his"],
        "CD" => &["5", "15", "1995", "two"],
        "VBG" => &["manufacturing", "boarding", "operating", "running"],
        "VBD" => &["rose", "said", "squeezed", "jetted"],
        "VBZ" => &["is", "has", "sells"],
        "MD" => &["will", "could"],
        "VB" => &["buy", "sell", "go"],
        "IN" => &["of", "for", "in", "like", "before"],
        "RB" => &["typically", "again", "off"],
        "CC" => &["and", "but"],
        "," => &[","],
        "." => &["."],
        "TO" => &["to"],
        _ => &["x"],
    };
    pool.choose(rng).copied().unwrap_or("x")
}

struct Builder {
    tags: Vec<&'static str>,
    nps: Vec<Span>,
}

impl Builder {
    fn plain(&mut self, tag: &'static str) {
        self.tags.push(tag);
    }

    fn np(&mut self, rng: &mut ChaCha8Rng) {
        let shape = NP_SHAPES
            .choose_weighted(rng, |(_, w)| *w)
            .map(|(s, _)| *s)
            .unwrap_or(&["NN"]);
        let start = self.tags.len();
        self.tags.extend_from_slice(shape);
        self.nps.push(Span {
            start,
            end: self.tags.len(),
        });
    }

    fn pp(&mut self, rng: &mut ChaCha8Rng, wide: f64) {
        let wide = rng.gen_bool(wide)
            && !self.nps.is_empty()
            && self.nps.last().unwrap().end == self.tags.len();
        self.plain("IN");
        self.np(rng);
        if wide {
            // Fold the preceding NP, the preposition and this NP into one.
            let last = self.nps.pop().unwrap();
            let prev = self.nps.last_mut().unwrap();
            prev.end = last.end;
        }
    }
}

fn sentence(rng: &mut ChaCha8Rng, config: &SyntheticConfig) -> Sentence {
    let mut b = Builder {
        tags: Vec::new(),
        nps: Vec::new(),
    };
    if rng.gen_bool(0.05) {
        // [some] of [the companies]
        let start = b.tags.len();
        b.plain("DT");
        b.nps.push(Span {
            start,
            end: start + 1,
        });
        b.plain("IN");
    }
    b.np(rng);
    if rng.gen_bool(0.2) {
        b.plain("RB");
    }
    match rng.gen_range(0..3) {
        0 => b.plain("VBD"),
        1 => b.plain("VBZ"),
        _ => {
            b.plain("MD");
            b.plain("VB");
        }
    }
    if rng.gen_bool(0.8) {
        b.np(rng);
    }
    for _ in 0..rng.gen_range(0..3) {
        b.pp(rng, config.wide_annotation);
    }
    if rng.gen_bool(0.15) {
        // like [Boca Raton] , [Hot Springs] , and [Palm Beach]
        b.plain("IN");
        let items = rng.gen_range(2..4);
        for i in 0..items {
            if i > 0 {
                b.plain(",");
                if i + 1 == items {
                    b.plain("CC");
                }
            }
            let start = b.tags.len();
            b.plain("NNP");
            b.plain("NNP");
            b.nps.push(Span {
                start,
                end: start + 2,
            });
        }
    } else if rng.gen_bool(0.05) {
        // in [Boca Raton , Fla.]
        b.plain("IN");
        let start = b.tags.len();
        for tag in ["NNP", "NNP", ",", "NNP"] {
            b.plain(tag);
        }
        b.nps.push(Span {
            start,
            end: start + 4,
        });
    }
    if rng.gen_bool(0.3) {
        // before boarding/VBG [buses/NNS]
        b.plain("IN");
        b.plain("VBG");
        let start = b.tags.len();
        b.plain("NNS");
        b.nps.push(Span {
            start,
            end: start + 1,
        });
        if rng.gen_bool(0.5) {
            b.plain("RB");
        }
    }
    if rng.gen_bool(0.25) {
        b.plain(",");
        b.plain("CC");
        b.np(rng);
        b.plain("VBD");
        b.np(rng);
    }
    b.plain(".");

    let tokens = b
        .tags
        .iter()
        .map(|&tag| {
            let word = word_for(tag, rng);
            let tag = if rng.gen_bool(config.tag_noise) {
                ALL_TAGS.choose(rng).copied().unwrap_or(tag)
            } else {
                tag
            };
            Token::new(word, tag).expect("vocabulary tokens are valid")
        })
        .collect();
    Sentence::new(tokens, b.nps).expect("generated spans are valid")
}

/// Generates a deterministic corpus for `config.seed`.
pub fn generate(config: &SyntheticConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let sentences = (0..config.sentences)
        .map(|_| sentence(&mut rng, config))
        .collect();
    Corpus::new(sentences, format!("synthetic-{}", config.seed))
}
