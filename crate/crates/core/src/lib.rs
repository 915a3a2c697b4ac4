//! Base noun phrase identification by part-of-speech tag sequence matching.
//!
//! A grammar of tag-sequence rules is read off the base NPs of an annotated
//! corpus, compiled into a prefix trie, and applied with a greedy
//! longest-match scan. Rules are ranked by their net benefit on a held-out
//! pruning corpus (correct bracketings minus the precision errors they are
//! responsible for) and discarded either by threshold or in small
//! increments. A handful of local repair heuristics can clean up the
//! bracketer's output, and a cross-validation harness ties the pieces
//! together.
//!
//! ```
//! use basenp::corpus::read_bracketed;
//! use basenp::grammar::{extract_grammar, RuleTrie};
//! use basenp::bracketer::bracket;
//!
//! let train = read_bracketed("[ the/DT dog/NN ] barked/VBD".as_bytes(), "train").unwrap();
//! let trie = RuleTrie::compile(&extract_grammar(&train));
//! let out = bracket(&["DT", "NN", "VBD", "DT", "NN"], &trie);
//! assert_eq!(out.spans().count(), 2);
//! ```
//!
//! Ratios (precision, recall, averaged scores) are computed through the
//! [`num::Scalar`] trait, so the same code yields `f32`, `f64` or exact
//! [`Fraction`] values. The pruning loops compare precisions exactly.

pub mod bracketer;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod experiment;
pub mod grammar;
pub mod num;
pub mod pruner;
pub mod repair;
pub mod scorer;
pub mod synth;

pub use error::{Error, Result};

/// Exact non-negative ratio of two counts.
pub type Fraction = num_rational::Ratio<u64>;

/// Floating-point ratio used for reporting.
pub type Real = f64;

/// Single-precision ratio, for callers that store many scores.
pub type Real32 = f32;
