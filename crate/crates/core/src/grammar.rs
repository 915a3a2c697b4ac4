//! Tag-sequence rules, grammar extraction and the rule trie.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};

use crate::corpus::Corpus;
use crate::error::{Error, Result};

/// A nonempty sequence of POS tags read off one base NP.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule(Vec<String>);

impl Rule {
    pub fn new<S: Into<String>>(tags: impl IntoIterator<Item = S>) -> Result<Self> {
        let tags: Vec<String> = tags.into_iter().map(Into::into).collect();
        if tags.is_empty() {
            return Err(Error::InvalidArgument("rule has no tags".into()));
        }
        if let Some(bad) = tags
            .iter()
            .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(Error::InvalidArgument(format!("bad tag {bad:?} in rule")));
        }
        Ok(Rule(tags))
    }

    /// Parses a space-separated tag sequence such as `DT JJ NN`.
    pub fn parse(text: &str) -> Result<Self> {
        Rule::new(text.split_whitespace())
    }

    pub fn tags(&self) -> &[String] {
        &self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleStats {
    /// Number of training NPs that produced the rule.
    pub frequency: u32,
    /// Net benefit from the most recent scoring, if any.
    pub benefit: Option<i64>,
}

impl Default for RuleStats {
    fn default() -> Self {
        RuleStats {
            frequency: 1,
            benefit: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Grammar {
    rules: BTreeMap<Rule, RuleStats>,
}

impl Grammar {
    pub fn new() -> Self {
        Grammar::default()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn contains(&self, rule: &Rule) -> bool {
        self.rules.contains_key(rule)
    }

    pub fn stats(&self, rule: &Rule) -> Option<&RuleStats> {
        self.rules.get(rule)
    }

    pub fn insert(&mut self, rule: Rule, stats: RuleStats) -> Option<RuleStats> {
        self.rules.insert(rule, stats)
    }

    pub fn remove(&mut self, rule: &Rule) -> Option<RuleStats> {
        self.rules.remove(rule)
    }

    /// Rules in lexicographic tag order.
    pub fn iter(&self) -> impl Iterator<Item = (&Rule, &RuleStats)> {
        self.rules.iter()
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.keys()
    }

    pub fn max_rule_len(&self) -> usize {
        self.rules.keys().map(Rule::len).max().unwrap_or(0)
    }

    pub fn singleton_count(&self) -> usize {
        self.rules.values().filter(|s| s.frequency < 2).count()
    }

    /// Keeps the rules for which `keep` holds.
    pub fn retain(&mut self, mut keep: impl FnMut(&Rule, &RuleStats) -> bool) {
        self.rules.retain(|r, s| keep(r, s));
    }

    pub(crate) fn set_benefit(&mut self, rule: &Rule, benefit: i64) {
        if let Some(stats) = self.rules.get_mut(rule) {
            stats.benefit = Some(benefit);
        }
    }

    /// True when every rule of `self` is also in `other`.
    pub fn is_subset_of(&self, other: &Grammar) -> bool {
        self.rules.keys().all(|r| other.contains(r))
    }
}

impl FromIterator<Rule> for Grammar {
    fn from_iter<I: IntoIterator<Item = Rule>>(iter: I) -> Self {
        let mut g = Grammar::new();
        for rule in iter {
            g.rules
                .entry(rule)
                .or_insert(RuleStats {
                    frequency: 0,
                    benefit: None,
                })
                .frequency += 1;
        }
        g
    }
}

/// One rule per distinct tag sequence among the reference NPs, with the
/// number of NPs that produced it.
pub fn extract_grammar(training: &Corpus) -> Grammar {
    training
        .sentences
        .iter()
        .flat_map(|s| {
            s.nps().iter().map(move |span| {
                Rule(
                    s.tokens()[span.start..span.end]
                        .iter()
                        .map(|t| t.tag().to_string())
                        .collect(),
                )
            })
        })
        .collect()
}

/// Rules seen at least twice in training.
pub fn drop_singletons(grammar: &Grammar) -> Grammar {
    let mut g = grammar.clone();
    g.retain(|_, s| s.frequency >= 2);
    g
}

/// Writes one rule per line: `TAGS<TAB>freq=N[<TAB>benefit=M]`.
pub fn save_grammar<W: Write>(grammar: &Grammar, mut sink: W) -> Result<()> {
    for (rule, stats) in grammar.iter() {
        write!(sink, "{rule}\tfreq={}", stats.frequency)?;
        if let Some(b) = stats.benefit {
            write!(sink, "\tbenefit={b}")?;
        }
        writeln!(sink)?;
    }
    sink.flush()?;
    Ok(())
}

/// Reads a grammar file. Lines starting with `#` and blank lines are
/// ignored. A rule without `freq=` gets frequency 1, so hand-added rules
/// need only the tag sequence.
pub fn load_grammar<R: Read>(source: R, name: &str) -> Result<Grammar> {
    let mut grammar = Grammar::new();
    for (i, line) in BufReader::new(source).lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let rule = Rule::parse(fields.next().unwrap_or_default())
            .map_err(|e| Error::parse(name, lineno, None, e.to_string()))?;
        let mut stats = RuleStats::default();
        for field in fields {
            let bad = || Error::parse(name, lineno, None, format!("bad field {field:?}"));
            let (key, value) = field.split_once('=').ok_or_else(bad)?;
            match key.trim() {
                "freq" => {
                    stats.frequency = value.trim().parse().map_err(|_| bad())?;
                    if stats.frequency == 0 {
                        return Err(Error::parse(
                            name,
                            lineno,
                            None,
                            "frequency must be positive",
                        ));
                    }
                }
                "benefit" => stats.benefit = Some(value.trim().parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            }
        }
        if grammar.contains(&rule) {
            return Err(Error::parse(
                name,
                lineno,
                None,
                format!("duplicate rule {rule}"),
            ));
        }
        grammar.insert(rule, stats);
    }
    Ok(grammar)
}

/// Index of a rule inside a [`RuleTrie`].
pub type RuleId = usize;

#[derive(Clone, Debug, Default)]
struct Node {
    children: HashMap<String, usize>,
    terminal: Option<RuleId>,
}

/// Prefix tree over rule tag sequences. Node 0 is the root.
#[derive(Clone, Debug)]
pub struct RuleTrie {
    nodes: Vec<Node>,
    rules: Vec<Rule>,
    max_depth: usize,
}

impl RuleTrie {
    pub fn compile(grammar: &Grammar) -> Self {
        let mut trie = RuleTrie {
            nodes: vec![Node::default()],
            rules: Vec::with_capacity(grammar.len()),
            max_depth: 0,
        };
        for rule in grammar.rules() {
            let mut at = 0;
            for tag in rule.tags() {
                at = match trie.nodes[at].children.get(tag) {
                    Some(&next) => next,
                    None => {
                        let next = trie.nodes.len();
                        trie.nodes.push(Node::default());
                        trie.nodes[at].children.insert(tag.clone(), next);
                        next
                    }
                };
            }
            trie.nodes[at].terminal = Some(trie.rules.len());
            trie.rules.push(rule.clone());
            trie.max_depth = trie.max_depth.max(rule.len());
        }
        trie
    }

    pub fn rule(&self, id: RuleId) -> &Rule {
        &self.rules[id]
    }

    /// All rules, indexed by [`RuleId`].
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn terminal_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.terminal.is_some()).count()
    }

    /// Length of the longest rule; bounds the depth of any lookup.
    pub fn max_rule_len(&self) -> usize {
        self.max_depth
    }

    pub fn contains<S: AsRef<str>>(&self, tags: &[S]) -> bool {
        let mut at = 0;
        for tag in tags {
            match self.nodes[at].children.get(tag.as_ref()) {
                Some(&next) => at = next,
                None => return false,
            }
        }
        !tags.is_empty() && self.nodes[at].terminal.is_some()
    }

    /// Longest rule matching a prefix of `tags`, as `(length, rule)`.
    /// `visits` is incremented once per trie node entered below the root.
    pub fn longest_prefix<S: AsRef<str>>(
        &self,
        tags: &[S],
        visits: &mut u64,
    ) -> Option<(usize, RuleId)> {
        let mut at = 0;
        let mut best = None;
        for (depth, tag) in tags.iter().enumerate() {
            match self.nodes[at].children.get(tag.as_ref()) {
                Some(&next) => {
                    *visits += 1;
                    at = next;
                    if let Some(id) = self.nodes[at].terminal {
                        best = Some((depth + 1, id));
                    }
                }
                None => break,
            }
        }
        best
    }

    /// Every root-to-terminal path, as rules.
    pub fn paths(&self) -> Vec<Rule> {
        let mut out = Vec::new();
        let mut stack: Vec<(usize, Vec<String>)> = vec![(0, Vec::new())];
        while let Some((at, prefix)) = stack.pop() {
            if self.nodes[at].terminal.is_some() {
                out.push(Rule(prefix.clone()));
            }
            for (tag, &next) in &self.nodes[at].children {
                let mut p = prefix.clone();
                p.push(tag.clone());
                stack.push((next, p));
            }
        }
        out.sort();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::read_bracketed;

    fn rule(s: &str) -> Rule {
        Rule::parse(s).unwrap()
    }

    #[test]
    fn identical_nps_dedup_with_count() {
        let c = read_bracketed(
            "[ the/DT dog/NN ] saw/VBD [ the/DT cat/NN ]".as_bytes(),
            "t",
        )
        .unwrap();
        let g = extract_grammar(&c);
        assert_eq!(g.len(), 1);
        assert_eq!(g.stats(&rule("DT NN")).unwrap().frequency, 2);
    }

    #[test]
    fn no_spans_no_rules() {
        let c = read_bracketed("the/DT dog/NN".as_bytes(), "t").unwrap();
        assert!(extract_grammar(&c).is_empty());
    }

    #[test]
    fn singleton_drop() {
        let mut g = Grammar::new();
        g.insert(
            rule("DT NN"),
            RuleStats {
                frequency: 5,
                benefit: None,
            },
        );
        g.insert(
            rule("VBG NNS"),
            RuleStats {
                frequency: 1,
                benefit: None,
            },
        );
        let d = drop_singletons(&g);
        assert_eq!(d.len(), 1);
        assert_eq!(d.stats(&rule("DT NN")).unwrap().frequency, 5);

        let all_ones: Grammar = [rule("A"), rule("B")].into_iter().collect();
        assert!(drop_singletons(&all_ones).is_empty());
    }

    #[test]
    fn empty_trie() {
        let t = RuleTrie::compile(&Grammar::new());
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.terminal_count(), 0);
        assert!(!t.contains(&["NN"]));
        assert!(!t.contains::<&str>(&[]));
    }

    #[test]
    fn prefix_sharing_chain() {
        let g: Grammar = [rule("NN"), rule("NN NN")].into_iter().collect();
        let t = RuleTrie::compile(&g);
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.terminal_count(), 2);
        let mut v = 0;
        assert_eq!(
            t.longest_prefix(&["NN", "NN", "NN"], &mut v).map(|m| m.0),
            Some(2)
        );
        assert_eq!(v, 2);
        assert_eq!(t.paths(), vec![rule("NN"), rule("NN NN")]);
    }

    #[test]
    fn grammar_file_line_format() {
        let g = load_grammar(
            "# comment\nDT JJ NN\tfreq=3\tbenefit=7\n\nNN\n".as_bytes(),
            "g",
        )
        .unwrap();
        assert_eq!(
            g.stats(&rule("DT JJ NN")),
            Some(&RuleStats {
                frequency: 3,
                benefit: Some(7)
            })
        );
        assert_eq!(
            g.stats(&rule("NN")),
            Some(&RuleStats {
                frequency: 1,
                benefit: None
            })
        );
    }

    #[test]
    fn grammar_round_trip_with_benefits() {
        let mut g = Grammar::new();
        g.insert(
            rule("DT NN"),
            RuleStats {
                frequency: 4,
                benefit: Some(-2),
            },
        );
        g.insert(
            rule("PRP$ JJ NN"),
            RuleStats {
                frequency: 1,
                benefit: None,
            },
        );
        let mut buf = Vec::new();
        save_grammar(&g, &mut buf).unwrap();
        assert_eq!(load_grammar(buf.as_slice(), "g").unwrap(), g);

        let mut buf = Vec::new();
        save_grammar(&Grammar::new(), &mut buf).unwrap();
        assert!(buf.is_empty());
        assert!(load_grammar(buf.as_slice(), "g").unwrap().is_empty());
    }

    #[test]
    fn malformed_grammar_lines() {
        for (text, line) in [
            ("NN\nDT\tfreq=x\n", 2),
            ("NN\tfrq=1\n", 1),
            ("NN\n\nNN\n", 3),
            ("NN\tfreq=0\n", 1),
            ("\tfreq=1\n", 1),
            ("NN\tbenefit\n", 1),
        ] {
            match load_grammar(text.as_bytes(), "g") {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
