//! Matching machines for exact pattern matching.
//!
//! A *matching machine* is an automaton-like 6-uple `(Q, o, F, α, δ, σ)`
//! driving a generic window-based search loop for a fixed pattern `w`:
//! at state `q` with window position `p`, the loop reads the text symbol
//! at `p + α(q)`, reports an occurrence when `q` is a pre-match state and
//! the read symbol matches, then moves to state `δ(q, x)` and advances the
//! window by `σ(q, x)`.  Most published exact pattern matching algorithms
//! (naive, Morris-Pratt, Horspool, TVSBS, ...) can be encoded this way so
//! that the generic loop touches exactly the same text positions as the
//! original algorithm.
//!
//! On top of that encoding the crate provides:
//!
//! - [`executor`] — the generic search loop with text-access
//!   instrumentation, a brute-force occurrence oracle and Monte-Carlo
//!   speed estimation;
//! - [`expansion`] — the full-memory expansion of a machine, which splits
//!   states by the text symbols already read ahead of the window, and the
//!   standardness test that makes the Markov analysis applicable;
//! - [`markov`] — the exact asymptotic speed of a machine under an iid
//!   text model, obtained from the limit state frequencies of the Markov
//!   chain induced by a standard machine;
//! - [`lattice`] — the position lattice of a pattern: shifts and
//!   transitions for every proper subset of checked positions, built in
//!   `O(|w|·2^|w|)` with a definitional brute-force oracle for testing;
//! - [`strategy`] — search strategies (machines whose states are subsets
//!   of pattern positions), exhaustive search for the fastest strategy,
//!   and the polynomial K-heuristic based on n-sets sublattices and
//!   shift expectations;
//! - [`classics`] — machine encodings and instrumented reference
//!   implementations of classic algorithms;
//! - [`cli`] — the `matchspeed` command-line tool.
//!
//! The *average speed* of a run is the ratio of the text length to the
//! number of text accesses performed; the *asymptotic speed* is its limit
//! expectation under an iid model.  Speeds above 1 mean the searcher
//! skips text; the best possible speed is `|w|`.

pub mod classics;
pub mod cli;
pub mod executor;
pub mod expansion;
pub mod format;
pub mod lattice;
mod linalg;
pub mod machine;
pub mod markov;
pub mod rng;
pub mod strategy;

pub use machine::{Alphabet, IidModel, MatchingMachine, Pattern, StateId, Symbol};
