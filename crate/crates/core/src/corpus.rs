//! Tagged, bracket-annotated sentences and their two file formats.
//!
//! Bracketed format: one sentence per line, tokens `word/TAG` separated by
//! spaces, base NPs delimited by standalone `[` and `]` tokens:
//!
//! ```text
//! When/WRB [ it/PRP ] is/VBZ [ time/NN ] for/IN ...
//! ```
//!
//! The last `/` of a token separates word from tag, so words may contain
//! slashes. IOB2 format is tab-separated `word TAG B|I|O`, one token per
//! line, with a blank line after each sentence.

use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    word: String,
    tag: String,
}

impl Token {
    /// Words and tags must be nonempty and free of whitespace; tags must
    /// not contain `/`.
    pub fn new(word: impl Into<String>, tag: impl Into<String>) -> Result<Self> {
        let word = word.into();
        let tag = tag.into();
        if word.is_empty() || word.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken(format!("bad word {word:?}")));
        }
        if tag.is_empty() || tag.contains('/') || tag.chars().any(char::is_whitespace) {
            return Err(Error::InvalidToken(format!("bad tag {tag:?}")));
        }
        Ok(Token { word, tag })
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.word, self.tag)
    }
}

/// Half-open token interval `[start, end)` covering one base NP.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start >= end {
            return Err(Error::InvalidSpan(format!("[{start},{end}) is empty")));
        }
        Ok(Span { start, end })
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, index: usize) -> bool {
        self.start <= index && index < self.end
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<Token>,
    nps: Vec<Span>,
}

impl Sentence {
    /// Builds a sentence, checking that it has tokens and that the spans
    /// are in bounds, sorted and pairwise disjoint.
    pub fn new(tokens: Vec<Token>, nps: Vec<Span>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::InvalidArgument("sentence has no tokens".into()));
        }
        check_spans(&nps, tokens.len())?;
        Ok(Sentence { tokens, nps })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn nps(&self) -> &[Span] {
        &self.nps
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn tags(&self) -> Vec<&str> {
        self.tokens.iter().map(Token::tag).collect()
    }

    /// Same tokens, different spans.
    pub fn with_nps(&self, nps: Vec<Span>) -> Result<Self> {
        check_spans(&nps, self.tokens.len())?;
        Ok(Sentence {
            tokens: self.tokens.clone(),
            nps,
        })
    }

    /// Same tokens, no spans.
    pub fn unbracketed(&self) -> Self {
        Sentence {
            tokens: self.tokens.clone(),
            nps: Vec::new(),
        }
    }
}

pub(crate) fn check_spans(nps: &[Span], len: usize) -> Result<()> {
    for (i, span) in nps.iter().enumerate() {
        if span.start >= span.end {
            return Err(Error::InvalidSpan(format!("{span} is empty")));
        }
        if span.end > len {
            return Err(Error::InvalidSpan(format!(
                "{span} exceeds sentence length {len}"
            )));
        }
        if i > 0 && nps[i - 1].end > span.start {
            return Err(Error::InvalidSpan(format!(
                "{} and {span} overlap or are out of order",
                nps[i - 1]
            )));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Corpus {
    pub sentences: Vec<Sentence>,
    /// Where the sentences came from: a path, a fold label, `synthetic`...
    pub source: String,
}

impl Corpus {
    pub fn new(sentences: Vec<Sentence>, source: impl Into<String>) -> Self {
        Corpus {
            sentences,
            source: source.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn np_count(&self) -> usize {
        self.sentences.iter().map(|s| s.nps.len()).sum()
    }

    /// Copy with every span removed.
    pub fn unbracketed(&self) -> Corpus {
        Corpus {
            sentences: self.sentences.iter().map(Sentence::unbracketed).collect(),
            source: self.source.clone(),
        }
    }

    /// Concatenation of several corpora, in order.
    pub fn concat<'a>(parts: impl IntoIterator<Item = &'a Corpus>, source: &str) -> Corpus {
        let sentences = parts
            .into_iter()
            .flat_map(|c| c.sentences.iter().cloned())
            .collect();
        Corpus::new(sentences, source)
    }
}

fn parse_token(text: &str, source: &str, line: usize, column: usize) -> Result<Token> {
    let (word, tag) = text.rsplit_once('/').ok_or_else(|| {
        Error::parse(
            source,
            line,
            Some(column),
            format!("token {text:?} has no '/'"),
        )
    })?;
    Token::new(word, tag).map_err(|e| Error::parse(source, line, Some(column), e.to_string()))
}

fn parse_bracketed_line(text: &str, source: &str, line: usize) -> Result<Sentence> {
    let mut tokens = Vec::new();
    let mut nps = Vec::new();
    let mut open: Option<(usize, usize)> = None;
    let mut offset = 0;
    for piece in text.split(' ') {
        let column = text[..offset].chars().count() + 1;
        offset += piece.len() + 1;
        match piece {
            "" => {}
            "[" => {
                if open.is_some() {
                    return Err(Error::parse(source, line, Some(column), "nested '['"));
                }
                open = Some((tokens.len(), column));
            }
            "]" => {
                let (start, open_col) = open
                    .take()
                    .ok_or_else(|| Error::parse(source, line, Some(column), "unbalanced ']'"))?;
                if start == tokens.len() {
                    return Err(Error::parse(source, line, Some(open_col), "empty brackets"));
                }
                nps.push(Span {
                    start,
                    end: tokens.len(),
                });
            }
            _ => tokens.push(parse_token(piece, source, line, column)?),
        }
    }
    if let Some((_, column)) = open {
        return Err(Error::parse(source, line, Some(column), "unbalanced '['"));
    }
    Sentence::new(tokens, nps).map_err(|e| Error::parse(source, line, None, e.to_string()))
}

/// Reads bracketed text. Blank lines are skipped; every other line is one
/// sentence.
pub fn read_bracketed<R: Read>(input: R, source: &str) -> Result<Corpus> {
    let mut sentences = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        sentences.push(parse_bracketed_line(line, source, i + 1)?);
    }
    Ok(Corpus::new(sentences, source))
}

/// One sentence in bracketed format, without a trailing newline.
pub fn format_bracketed(sentence: &Sentence) -> String {
    let mut out = String::new();
    let mut spans = sentence.nps.iter().peekable();
    for (i, token) in sentence.tokens.iter().enumerate() {
        if !out.is_empty() {
            out.push(' ');
        }
        if spans.peek().is_some_and(|s| s.start == i) {
            out.push_str("[ ");
        }
        out.push_str(&token.word);
        out.push('/');
        out.push_str(&token.tag);
        if spans.peek().is_some_and(|s| s.end == i + 1) {
            out.push_str(" ]");
            spans.next();
        }
    }
    out
}

pub fn write_bracketed<W: Write>(corpus: &Corpus, mut output: W) -> Result<()> {
    for sentence in &corpus.sentences {
        writeln!(output, "{}", format_bracketed(sentence))?;
    }
    output.flush()?;
    Ok(())
}

/// Reads IOB2 chunk-tagged text. An `I` label must continue a chunk opened
/// by `B` (or a previous `I`).
pub fn read_iob2<R: Read>(input: R, source: &str) -> Result<Corpus> {
    let mut sentences = Vec::new();
    let mut tokens = Vec::new();
    let mut nps: Vec<Span> = Vec::new();
    let mut inside = false;
    let mut first_line = 0;

    let mut finish = |tokens: &mut Vec<Token>, nps: &mut Vec<Span>, line: usize| -> Result<()> {
        if tokens.is_empty() {
            return Ok(());
        }
        let sentence = Sentence::new(std::mem::take(tokens), std::mem::take(nps))
            .map_err(|e| Error::parse(source, line, None, e.to_string()))?;
        sentences.push(sentence);
        Ok(())
    };

    for (i, line) in BufReader::new(input).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            finish(&mut tokens, &mut nps, first_line)?;
            inside = false;
            continue;
        }
        if tokens.is_empty() {
            first_line = lineno;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                source,
                lineno,
                None,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let token = Token::new(fields[0], fields[1])
            .map_err(|e| Error::parse(source, lineno, None, e.to_string()))?;
        let index = tokens.len();
        tokens.push(token);
        match fields[2] {
            "B" => {
                nps.push(Span {
                    start: index,
                    end: index + 1,
                });
                inside = true;
            }
            "I" => {
                if !inside {
                    return Err(Error::parse(
                        source,
                        lineno,
                        None,
                        "'I' label does not continue a chunk",
                    ));
                }
                if let Some(last) = nps.last_mut() {
                    last.end = index + 1;
                }
            }
            "O" => inside = false,
            other => {
                return Err(Error::parse(
                    source,
                    lineno,
                    None,
                    format!("unknown chunk label {other:?}"),
                ))
            }
        }
    }
    finish(&mut tokens, &mut nps, first_line)?;
    Ok(Corpus::new(sentences, source))
}

/// Per-token B/I/O labels of a sentence.
pub fn iob2_labels(sentence: &Sentence) -> Vec<char> {
    let mut labels = vec!['O'; sentence.len()];
    for span in &sentence.nps {
        labels[span.start] = 'B';
        for label in &mut labels[span.start + 1..span.end] {
            *label = 'I';
        }
    }
    labels
}

pub fn write_iob2<W: Write>(corpus: &Corpus, mut output: W) -> Result<()> {
    for sentence in &corpus.sentences {
        for (token, label) in sentence.tokens.iter().zip(iob2_labels(sentence)) {
            writeln!(output, "{}\t{}\t{}", token.word, token.tag, label)?;
        }
        writeln!(output)?;
    }
    output.flush()?;
    Ok(())
}

/// Assigns sentence indices `0..n` to `k` folds: the indices are shuffled
/// with `seed` and dealt round-robin. Each fold lists its indices in
/// ascending order.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    if n < k {
        return Err(Error::InvalidArgument(format!(
            "{n} sentences cannot fill {k} folds"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (i, index) in order.into_iter().enumerate() {
        folds[i % k].push(index);
    }
    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// Builds the corpus made of the sentences at `indices`.
pub fn select(corpus: &Corpus, indices: &[usize], source: &str) -> Corpus {
    Corpus::new(
        indices
            .iter()
            .map(|&i| corpus.sentences[i].clone())
            .collect(),
        source,
    )
}

/// Splits a corpus into `k` disjoint folds of near-equal size.
pub fn split_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<Vec<Corpus>> {
    let folds = fold_assignment(corpus.len(), k, seed)?;
    Ok(folds
        .iter()
        .enumerate()
        .map(|(i, indices)| select(corpus, indices, &format!("{}#fold{i}", corpus.source)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<Corpus> {
        read_bracketed(text.as_bytes(), "test")
    }

    fn corpus_of(n: usize) -> Corpus {
        let sentences = (0..n)
            .map(|i| {
                Sentence::new(vec![Token::new(format!("w{i}"), "NN").unwrap()], vec![]).unwrap()
            })
            .collect();
        Corpus::new(sentences, "n")
    }

    #[test]
    fn single_token_bracket() {
        let c = read("[ When/WRB ]").unwrap();
        assert_eq!(c.len(), 1);
        let s = &c.sentences[0];
        assert_eq!(s.len(), 1);
        assert_eq!(s.nps(), &[Span::new(0, 1).unwrap()]);
        assert_eq!(s.tokens()[0].word(), "When");
        assert_eq!(s.tokens()[0].tag(), "WRB");
    }

    #[test]
    fn last_slash_splits_word_and_tag() {
        let c = read("1/2/CD").unwrap();
        let t = &c.sentences[0].tokens()[0];
        assert_eq!((t.word(), t.tag()), ("1/2", "CD"));
    }

    #[test]
    fn unbalanced_close_is_error() {
        let err = read("a/DT [ b/NN ] ]").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 1);
                assert_eq!(column, Some(15));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn unclosed_and_nested_brackets_are_errors() {
        assert!(matches!(read("[ a/DT b/NN"), Err(Error::Parse { .. })));
        let err = read("ok/NN\n[ a/DT [ b/NN ] ]").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 2,
                    column: Some(8),
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn missing_slash_and_empty_brackets_are_errors() {
        assert!(matches!(
            read("a/DT word"),
            Err(Error::Parse {
                column: Some(6),
                ..
            })
        ));
        assert!(matches!(read("a/DT [ ]"), Err(Error::Parse { .. })));
        assert!(matches!(read("/DT"), Err(Error::Parse { .. })));
        assert!(matches!(read("a/"), Err(Error::Parse { .. })));
    }

    #[test]
    fn blank_lines_are_skipped() {
        let c = read("\n a/DT \n\n[ b/NN ]\n").unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn write_empty_and_unbracketed() {
        let mut out = Vec::new();
        write_bracketed(&Corpus::default(), &mut out).unwrap();
        assert!(out.is_empty());

        let c = read("a/DT b/NN").unwrap();
        let mut out = Vec::new();
        write_bracketed(&c, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a/DT b/NN\n");
    }

    #[test]
    fn iob2_basic_chunks() {
        let c = read_iob2("a\tDT\tB\nb\tNN\tI\nc\tVB\tO\n".as_bytes(), "t").unwrap();
        assert_eq!(c.sentences[0].nps(), &[Span { start: 0, end: 2 }]);
        let c = read_iob2("a\tNN\tB\nb\tNN\tB\n".as_bytes(), "t").unwrap();
        assert_eq!(
            c.sentences[0].nps(),
            &[Span { start: 0, end: 1 }, Span { start: 1, end: 2 }]
        );
    }

    #[test]
    fn iob2_illegal_transition() {
        let err = read_iob2("a\tDT\tO\nb\tNN\tI\n".as_bytes(), "t").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_iob2("a\tDT\tB\n\nb\tNN\tI\n".as_bytes(), "t").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        assert!(read_iob2("a\tDT\n".as_bytes(), "t").is_err());
        assert!(read_iob2("a\tDT\tX\n".as_bytes(), "t").is_err());
    }

    #[test]
    fn iob2_sentence_breaks() {
        let text = "a\tDT\tB\nb\tNN\tI\n\n\nc\tNN\tO\n";
        let c = read_iob2(text.as_bytes(), "t").unwrap();
        assert_eq!(c.len(), 2);
        let mut out = Vec::new();
        write_iob2(&c, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "a\tDT\tB\nb\tNN\tI\n\nc\tNN\tO\n\n"
        );
    }

    #[test]
    fn folds_exact_division() {
        let folds = split_folds(&corpus_of(10), 5, 7).unwrap();
        assert!(folds.iter().all(|f| f.len() == 2));
    }

    #[test]
    fn folds_remainder() {
        let folds = split_folds(&corpus_of(11), 5, 7).unwrap();
        let mut sizes: Vec<usize> = folds.iter().map(Corpus::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 2, 3]);
    }

    #[test]
    fn folds_deterministic_and_disjoint() {
        let a = fold_assignment(37, 5, 99).unwrap();
        assert_eq!(a, fold_assignment(37, 5, 99).unwrap());
        let mut all: Vec<usize> = a.concat();
        all.sort_unstable();
        assert_eq!(all, (0..37).collect::<Vec<_>>());
        assert_ne!(a, fold_assignment(37, 5, 100).unwrap());
    }

    #[test]
    fn folds_invalid_arguments() {
        assert!(matches!(
            split_folds(&corpus_of(10), 1, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            split_folds(&corpus_of(3), 5, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn sentence_rejects_bad_spans() {
        let toks = vec![
            Token::new("a", "DT").unwrap(),
            Token::new("b", "NN").unwrap(),
        ];
        assert!(Sentence::new(toks.clone(), vec![Span { start: 0, end: 3 }]).is_err());
        assert!(Sentence::new(
            toks.clone(),
            vec![Span { start: 0, end: 2 }, Span { start: 1, end: 2 }]
        )
        .is_err());
        assert!(Sentence::new(
            toks.clone(),
            vec![Span { start: 1, end: 2 }, Span { start: 0, end: 1 }]
        )
        .is_err());
        assert!(Sentence::new(vec![], vec![]).is_err());
        assert!(Span::new(2, 2).is_err());
    }
}
