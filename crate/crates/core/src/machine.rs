//! Core domain types: alphabets, patterns, iid models and matching
//! machines, plus structural validation and the compactness predicate.

use std::fmt;

use thiserror::Error;

/// Index of a symbol in an [`Alphabet`] (dense, starting at 0).
pub type Symbol = u8;

/// Dense machine state id. The sink is always [`SINK`] (id 0).
pub type StateId = u32;

/// The sink state id. Every machine owns a sink with `δ(⊙,x)=⊙` and
/// `σ(⊙,x)=0` for all symbols.
pub const SINK: StateId = 0;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("alphabet must contain between 1 and 255 distinct symbols, got {0}")]
    AlphabetSize(usize),
    #[error("duplicate symbol {:?} in alphabet", *.0 as char)]
    DuplicateSymbol(u8),
    #[error("empty pattern")]
    EmptyPattern,
    #[error("symbol {:?} not in alphabet", *.0 as char)]
    SymbolNotInAlphabet(u8),
    #[error("model has {got} probabilities for an alphabet of size {want}")]
    ModelSize { got: usize, want: usize },
    #[error("model probabilities must be nonnegative")]
    NegativeProbability,
    #[error("model probabilities sum to {0}, expected 1")]
    NotADistribution(f64),
}

/// A finite, ordered set of byte symbols. Symbol indices are stable:
/// `index_of(byte(s)) == s` for every symbol `s`.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    bytes: Vec<u8>,
    lookup: [i16; 256],
}

impl Alphabet {
    /// Build an alphabet from distinct bytes, in the given order.
    pub fn new(bytes: &[u8]) -> Result<Self, DomainError> {
        if bytes.is_empty() || bytes.len() > 255 {
            return Err(DomainError::AlphabetSize(bytes.len()));
        }
        let mut lookup = [-1i16; 256];
        for (i, &b) in bytes.iter().enumerate() {
            if lookup[b as usize] >= 0 {
                return Err(DomainError::DuplicateSymbol(b));
            }
            lookup[b as usize] = i as i16;
        }
        Ok(Alphabet {
            bytes: bytes.to_vec(),
            lookup,
        })
    }

    /// Alphabet of the distinct bytes occurring in `data`, sorted.
    pub fn from_text(data: &[u8]) -> Result<Self, DomainError> {
        let mut seen = [false; 256];
        for &b in data {
            seen[b as usize] = true;
        }
        let bytes: Vec<u8> = (0..=255u8).filter(|&b| seen[b as usize]).collect();
        Self::new(&bytes)
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // size >= 1 by construction
    }

    pub fn index_of(&self, byte: u8) -> Option<Symbol> {
        let i = self.lookup[byte as usize];
        (i >= 0).then_some(i as Symbol)
    }

    pub fn byte(&self, sym: Symbol) -> u8 {
        self.bytes[sym as usize]
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// Encode raw bytes as symbol indices; fails on any byte outside the
    /// alphabet.
    pub fn encode(&self, data: &[u8]) -> Result<Vec<Symbol>, DomainError> {
        data.iter()
            .map(|&b| self.index_of(b).ok_or(DomainError::SymbolNotInAlphabet(b)))
            .collect()
    }

    /// Encode raw bytes, silently dropping bytes outside the alphabet.
    pub fn encode_lossy(&self, data: &[u8]) -> Vec<Symbol> {
        data.iter().filter_map(|&b| self.index_of(b)).collect()
    }

    pub fn decode(&self, syms: &[Symbol]) -> Vec<u8> {
        syms.iter().map(|&s| self.byte(s)).collect()
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Alphabet({:?})", String::from_utf8_lossy(&self.bytes))
    }
}

/// A nonempty pattern, stored as symbol indices into its alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    syms: Vec<Symbol>,
}

impl Pattern {
    pub fn from_bytes(alphabet: &Alphabet, bytes: &[u8]) -> Result<Self, DomainError> {
        if bytes.is_empty() {
            return Err(DomainError::EmptyPattern);
        }
        Ok(Pattern {
            syms: alphabet.encode(bytes)?,
        })
    }

    pub fn from_symbols(syms: Vec<Symbol>) -> Result<Self, DomainError> {
        if syms.is_empty() {
            return Err(DomainError::EmptyPattern);
        }
        Ok(Pattern { syms })
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        false // |w| >= 1 by construction
    }

    /// Symbol at position `i` (0-based).
    pub fn at(&self, i: usize) -> Symbol {
        self.syms[i]
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.syms
    }
}

/// An iid text model: one probability per alphabet symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct IidModel {
    probs: Vec<f64>,
}

impl IidModel {
    pub fn new(probs: Vec<f64>) -> Result<Self, DomainError> {
        if probs.iter().any(|&p| p < 0.0) {
            return Err(DomainError::NegativeProbability);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(DomainError::NotADistribution(sum));
        }
        Ok(IidModel { probs })
    }

    pub fn uniform(num_symbols: usize) -> Self {
        IidModel {
            probs: vec![1.0 / num_symbols as f64; num_symbols],
        }
    }

    pub fn prob(&self, sym: Symbol) -> f64 {
        self.probs[sym as usize]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// A matching machine `(Q, o, F, α, δ, σ)` over a fixed alphabet size.
///
/// States are dense ids; id 0 is the sink. `trans` and `shift` are total
/// on `Q × Σ` by construction. A state may additionally carry a
/// *sentinel rule* `(δ, σ)` applied when the generic loop reads the text
/// padding position `|t|`; only machines of order `|w|` (those reading
/// one position past the window) need it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingMachine {
    num_symbols: usize,
    init: StateId,
    next: Vec<u32>,
    prematch: Vec<bool>,
    trans: Vec<StateId>,
    shift: Vec<u32>,
    sentinel: Vec<Option<(StateId, u32)>>,
    /// Optional display names, one per state (used by strategies and
    /// expanded machines when serialized).
    names: Option<Vec<String>>,
}

impl MatchingMachine {
    pub fn num_states(&self) -> usize {
        self.next.len()
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn init(&self) -> StateId {
        self.init
    }

    /// Next-position-to-check `α(q)`.
    pub fn next(&self, q: StateId) -> u32 {
        self.next[q as usize]
    }

    pub fn is_prematch(&self, q: StateId) -> bool {
        self.prematch[q as usize]
    }

    /// Transition `δ(q, x)`.
    pub fn trans(&self, q: StateId, x: Symbol) -> StateId {
        self.trans[q as usize * self.num_symbols + x as usize]
    }

    /// Shift `σ(q, x)`.
    pub fn shift(&self, q: StateId, x: Symbol) -> u32 {
        self.shift[q as usize * self.num_symbols + x as usize]
    }

    pub fn sentinel(&self, q: StateId) -> Option<(StateId, u32)> {
        self.sentinel[q as usize]
    }

    /// Machine order: `max_q α(q)`.
    pub fn order(&self) -> u32 {
        self.next.iter().copied().max().unwrap_or(0)
    }

    pub fn name(&self, q: StateId) -> Option<&str> {
        self.names.as_ref().map(|n| n[q as usize].as_str())
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn prematch_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_states() as StateId).filter(|&q| self.prematch[q as usize])
    }
}

/// Incremental construction of a [`MatchingMachine`]. The sink (id 0) is
/// created automatically with its conventional self-loop rows.
pub struct MachineBuilder {
    num_symbols: usize,
    next: Vec<u32>,
    prematch: Vec<bool>,
    trans: Vec<StateId>,
    shift: Vec<u32>,
    sentinel: Vec<Option<(StateId, u32)>>,
    names: Vec<String>,
    any_name: bool,
    filled: Vec<bool>,
}

impl MachineBuilder {
    pub fn new(num_symbols: usize) -> Self {
        let mut b = MachineBuilder {
            num_symbols,
            next: Vec::new(),
            prematch: Vec::new(),
            trans: Vec::new(),
            shift: Vec::new(),
            sentinel: Vec::new(),
            names: Vec::new(),
            any_name: false,
            filled: Vec::new(),
        };
        let sink = b.add_state(0, false);
        debug_assert_eq!(sink, SINK);
        for x in 0..num_symbols as Symbol {
            b.set_edge(SINK, x, SINK, 0);
        }
        b
    }

    /// Append a state; all its transitions start as sink self-traps and
    /// must be set before [`finish`](Self::finish).
    pub fn add_state(&mut self, next: u32, prematch: bool) -> StateId {
        let id = self.next.len() as StateId;
        self.next.push(next);
        self.prematch.push(prematch);
        self.trans
            .extend(std::iter::repeat_n(SINK, self.num_symbols));
        self.shift
            .extend(std::iter::repeat_n(0u32, self.num_symbols));
        self.sentinel.push(None);
        self.names.push(String::new());
        self.filled.push(false);
        id
    }

    pub fn set_edge(&mut self, q: StateId, x: Symbol, target: StateId, shift: u32) {
        let i = q as usize * self.num_symbols + x as usize;
        self.trans[i] = target;
        self.shift[i] = shift;
        self.filled[q as usize] = true;
    }

    pub fn set_sentinel(&mut self, q: StateId, target: StateId, shift: u32) {
        self.sentinel[q as usize] = Some((target, shift));
    }

    pub fn set_name(&mut self, q: StateId, name: impl Into<String>) {
        self.names[q as usize] = name.into();
        self.any_name = true;
    }

    pub fn num_states(&self) -> usize {
        self.next.len()
    }

    pub fn finish(self, init: StateId) -> MatchingMachine {
        assert!((init as usize) < self.next.len(), "init out of range");
        debug_assert!(
            self.filled.iter().all(|&f| f),
            "some state has no transitions set"
        );
        MatchingMachine {
            num_symbols: self.num_symbols,
            init,
            next: self.next,
            prematch: self.prematch,
            trans: self.trans,
            shift: self.shift,
            sentinel: self.sentinel,
            names: self.any_name.then_some(self.names),
        }
    }
}

/// Drop states unreachable from the init (following symbol and sentinel
/// edges). The sink keeps id 0; survivors are renumbered in
/// breadth-first order, names included.
pub fn prune_unreachable(machine: &MatchingMachine) -> MatchingMachine {
    let k = machine.num_symbols();
    let mut new_id = vec![u32::MAX; machine.num_states()];
    new_id[SINK as usize] = SINK;
    let mut order: Vec<StateId> = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    let push = |q: StateId,
                new_id: &mut Vec<u32>,
                queue: &mut std::collections::VecDeque<StateId>,
                order: &mut Vec<StateId>| {
        if new_id[q as usize] == u32::MAX {
            new_id[q as usize] = (order.len() + 1) as u32;
            order.push(q);
            queue.push_back(q);
        }
    };
    push(machine.init(), &mut new_id, &mut queue, &mut order);
    while let Some(q) = queue.pop_front() {
        for x in 0..k as Symbol {
            push(machine.trans(q, x), &mut new_id, &mut queue, &mut order);
        }
        if let Some((t, _)) = machine.sentinel(q) {
            push(t, &mut new_id, &mut queue, &mut order);
        }
    }
    let mut b = MachineBuilder::new(k);
    for &q in &order {
        b.add_state(machine.next(q), machine.is_prematch(q));
    }
    for (i, &q) in order.iter().enumerate() {
        let id = (i + 1) as StateId;
        for x in 0..k as Symbol {
            b.set_edge(
                id,
                x,
                new_id[machine.trans(q, x) as usize],
                machine.shift(q, x),
            );
        }
        if let Some((t, s)) = machine.sentinel(q) {
            b.set_sentinel(id, new_id[t as usize], s);
        }
        if let Some(name) = machine.name(q) {
            if !name.is_empty() {
                b.set_name(id, name);
            }
        }
    }
    b.finish(new_id[machine.init() as usize])
}

/// One broken structural rule, naming the offending state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A pre-match state has `α(q) >= |w|`.
    PrematchNextOutOfRange { state: StateId, next: u32 },
    /// `δ(⊙, x) != ⊙`.
    SinkTransNotSelf { symbol: Symbol },
    /// `σ(⊙, x) != 0`.
    SinkShiftNonzero { symbol: Symbol },
    /// A transition targets a state id outside `Q`.
    TransTargetOutOfRange { state: StateId, symbol: Symbol },
    /// `max_q α(q) < |w| - 1`: the machine cannot check a full window.
    OrderTooSmall { order: u32, need: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PrematchNextOutOfRange { state, next } => {
                write!(
                    f,
                    "prematch next out of range: state {state} has next {next}"
                )
            }
            Violation::SinkTransNotSelf { symbol } => {
                write!(f, "sink transition not self on symbol {symbol}")
            }
            Violation::SinkShiftNonzero { symbol } => {
                write!(f, "sink shift nonzero on symbol {symbol}")
            }
            Violation::TransTargetOutOfRange { state, symbol } => {
                write!(
                    f,
                    "state {state} transitions out of range on symbol {symbol}"
                )
            }
            Violation::OrderTooSmall { order, need } => {
                write!(f, "machine order {order} below required {need}")
            }
        }
    }
}

/// Check every structural invariant of a machine against its pattern.
/// Violations are data, not failures: an empty list means the machine is
/// structurally sound.
pub fn validate_structure(machine: &MatchingMachine, pattern: &Pattern) -> Vec<Violation> {
    let mut out = Vec::new();
    let wlen = pattern.len() as u32;
    let n = machine.num_states() as StateId;
    for x in 0..machine.num_symbols() as Symbol {
        if machine.trans(SINK, x) != SINK {
            out.push(Violation::SinkTransNotSelf { symbol: x });
        }
        if machine.shift(SINK, x) != 0 {
            out.push(Violation::SinkShiftNonzero { symbol: x });
        }
    }
    for q in 0..n {
        if machine.is_prematch(q) && machine.next(q) >= wlen {
            out.push(Violation::PrematchNextOutOfRange {
                state: q,
                next: machine.next(q),
            });
        }
        for x in 0..machine.num_symbols() as Symbol {
            if machine.trans(q, x) >= n {
                out.push(Violation::TransTargetOutOfRange {
                    state: q,
                    symbol: x,
                });
            }
        }
    }
    if machine.order() < wlen - 1 {
        out.push(Violation::OrderTooSmall {
            order: machine.order(),
            need: wlen - 1,
        });
    }
    out
}

/// Result of the compactness check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompactnessReport {
    pub compact: bool,
    /// A state with a forced outcome, when not compact. Rule 1: exactly
    /// one symbol escapes the sink. Rule 2: all symbols share both the
    /// transition and the shift.
    pub witness: Option<StateId>,
}

/// A machine is compact when no state has a forced single outcome; such
/// states read the text without the read influencing what happens next.
/// The sink is exempt (its self-loop is conventional), and so are
/// pre-match states: their read decides whether an occurrence is
/// reported, so it is never useless even when the transition and shift
/// ignore it (any strategy whose pre-match read cannot re-align the
/// window has exactly that shape).
pub fn is_compact(machine: &MatchingMachine) -> CompactnessReport {
    let k = machine.num_symbols() as Symbol;
    for q in 1..machine.num_states() as StateId {
        if machine.is_prematch(q) {
            continue;
        }
        let live = (0..k).filter(|&x| machine.trans(q, x) != SINK).count();
        let rule1 = live == 1;
        let rule2 = (1..k).all(|x| {
            machine.trans(q, x) == machine.trans(q, 0) && machine.shift(q, x) == machine.shift(q, 0)
        });
        if rule1 || rule2 {
            return CompactnessReport {
                compact: false,
                witness: Some(q),
            };
        }
    }
    CompactnessReport {
        compact: true,
        witness: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classics::{build_machine, AlgorithmId};

    fn ab() -> Alphabet {
        Alphabet::new(b"ab").unwrap()
    }

    #[test]
    fn alphabet_round_trips_symbols() {
        let a = Alphabet::new(b"ba").unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a.index_of(b'b'), Some(0));
        assert_eq!(a.index_of(b'a'), Some(1));
        assert_eq!(a.index_of(b'c'), None);
        assert_eq!(a.byte(0), b'b');
        assert!(Alphabet::new(b"").is_err());
        assert!(Alphabet::new(b"aa").is_err());
    }

    #[test]
    fn pattern_rejects_empty_and_foreign_symbols() {
        let a = ab();
        assert_eq!(Pattern::from_bytes(&a, b""), Err(DomainError::EmptyPattern));
        assert_eq!(
            Pattern::from_bytes(&a, b"abc"),
            Err(DomainError::SymbolNotInAlphabet(b'c'))
        );
        let p = Pattern::from_bytes(&a, b"abb").unwrap();
        assert_eq!(p.symbols(), &[0, 1, 1]);
    }

    #[test]
    fn model_must_be_a_distribution() {
        assert!(IidModel::new(vec![0.5, 0.5]).is_ok());
        assert!(IidModel::new(vec![0.5, 0.6]).is_err());
        assert!(IidModel::new(vec![-0.1, 1.1]).is_err());
        let u = IidModel::uniform(4);
        assert!((u.prob(3) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn naive_machine_for_abb_is_structurally_valid() {
        let a = ab();
        let p = Pattern::from_bytes(&a, b"abb").unwrap();
        let m = build_machine(AlgorithmId::Naive, &a, &p).unwrap();
        assert_eq!(validate_structure(&m, &p), vec![]);
    }

    #[test]
    fn prematch_next_out_of_range_is_reported() {
        let a = ab();
        let p = Pattern::from_bytes(&a, b"abb").unwrap();
        let mut b = MachineBuilder::new(2);
        let q = b.add_state(3, true); // α(q) = |w|, illegal for a prematch state
        for x in 0..2 {
            b.set_edge(q, x, q, 1);
        }
        let m = b.finish(q);
        let v = validate_structure(&m, &p);
        assert_eq!(
            v,
            vec![Violation::PrematchNextOutOfRange { state: q, next: 3 }]
        );
    }

    #[test]
    fn broken_sink_convention_is_reported() {
        let a = ab();
        let p = Pattern::from_bytes(&a, b"abb").unwrap();
        let mut b = MachineBuilder::new(2);
        let q = b.add_state(2, false);
        for x in 0..2 {
            b.set_edge(q, x, q, 1);
        }
        b.set_edge(SINK, 0, SINK, 1); // σ(⊙,a) = 1
        let m = b.finish(q);
        let v = validate_structure(&m, &p);
        assert_eq!(v, vec![Violation::SinkShiftNonzero { symbol: 0 }]);
    }

    #[test]
    fn compactness_rules() {
        // Rule 2: one state, both symbols behave identically.
        let mut b = MachineBuilder::new(2);
        let q = b.add_state(0, false);
        b.set_edge(q, 0, q, 1);
        b.set_edge(q, 1, q, 1);
        let m = b.finish(q);
        let r = is_compact(&m);
        assert!(!r.compact);
        assert_eq!(r.witness, Some(q));

        // Rule 1: exactly one symbol escapes the sink.
        let mut b = MachineBuilder::new(2);
        let q = b.add_state(0, false);
        let q2 = b.add_state(1, false);
        b.set_edge(q, 0, q2, 0);
        b.set_edge(q, 1, SINK, 1);
        b.set_edge(q2, 0, q, 1);
        b.set_edge(q2, 1, q, 2);
        let m = b.finish(q);
        let r = is_compact(&m);
        assert!(!r.compact);
        assert_eq!(r.witness, Some(q));

        // The naive machine is compact.
        let a = ab();
        let p = Pattern::from_bytes(&a, b"abb").unwrap();
        let m = build_machine(AlgorithmId::Naive, &a, &p).unwrap();
        assert!(is_compact(&m).compact);
    }
}
