//! Full-memory expansion, standardness, and per-state memory lookup.
//!
//! The expansion of a machine splits every state by the set of text
//! positions already read ahead of the current window. An expanded state
//! is a pair `(q, H)` where `H` maps relative positions in `[0, ord]` to
//! the symbols known to sit there. Reads of a recorded position are
//! forced: a contradicting symbol leads to the sink (that path has
//! probability zero on any text actually driving the machine), and a
//! confirming symbol passes through without consulting the text model.
//! This is what makes the Markov analysis of [`crate::markov`] exact.
//!
//! A machine is *standard* when it equals its own expansion, i.e. every
//! state appears in exactly one reachable pair; `mem(q)` is then the
//! memory of that pair.

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::machine::{MachineBuilder, MatchingMachine, Pattern, StateId, Symbol, SINK};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExpandError {
    /// The expansion exceeded the state cap. `bound` is the theoretical
    /// worst case `(|Σ|+1)^(ord+1) · |Q|`, which may vary a lot with the
    /// machine at hand.
    #[error("expansion exceeded {cap} states (worst-case bound {bound})")]
    ExplosionGuard { cap: usize, bound: u64 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MemError {
    #[error("machine is not standard: state {0} appears in {1} reachable pairs")]
    NotStandard(StateId, usize),
    #[error(transparent)]
    Expand(#[from] ExpandError),
}

/// Partial map from relative text positions to recorded symbols; at most
/// one symbol per position. Entries are kept sorted by position.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MemoryMap {
    entries: Vec<(u32, Symbol)>,
}

impl MemoryMap {
    pub fn empty() -> Self {
        MemoryMap::default()
    }

    pub fn from_entries(mut entries: Vec<(u32, Symbol)>) -> Self {
        entries.sort_unstable();
        entries.dedup();
        debug_assert!(
            entries.windows(2).all(|w| w[0].0 != w[1].0),
            "two symbols recorded at one position"
        );
        MemoryMap { entries }
    }

    pub fn get(&self, pos: u32) -> Option<Symbol> {
        self.entries
            .binary_search_by_key(&pos, |e| e.0)
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn entries(&self) -> &[(u32, Symbol)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Record a symbol at a currently-unset position.
    fn with(&self, pos: u32, sym: Symbol) -> Self {
        debug_assert!(self.get(pos).is_none());
        let mut entries = self.entries.clone();
        let at = entries.partition_point(|e| e.0 < pos);
        entries.insert(at, (pos, sym));
        MemoryMap { entries }
    }
}

/// The k-shifted of a memory map: subtract `k` from every position and
/// drop what falls below zero.
pub fn k_shifted(map: &MemoryMap, k: u32) -> MemoryMap {
    MemoryMap {
        entries: map
            .entries
            .iter()
            .filter(|&&(u, _)| u >= k)
            .map(|&(u, y)| (u - k, y))
            .collect(),
    }
}

/// A machine together with the `(base state, memory)` pair behind each of
/// its states. State 0 is the collapsed global sink.
#[derive(Clone, Debug)]
pub struct ExpandedMachine {
    pub machine: MatchingMachine,
    pub base: Vec<StateId>,
    pub memory: Vec<MemoryMap>,
    /// Number of states dequeued during construction (each reachable
    /// state is visited exactly once).
    pub visited: usize,
}

pub const DEFAULT_STATE_CAP: usize = 1_000_000;

pub fn expand(machine: &MatchingMachine) -> Result<ExpandedMachine, ExpandError> {
    expand_with_cap(machine, DEFAULT_STATE_CAP)
}

/// Breadth-first closure from `(o, ∅)` under the three transition cases:
/// unchecked position (record the read, trim by the shift), contradicted
/// record (sink), confirmed record (pass through, trim by the shift).
/// Sentinel rules trim the memory but record nothing: the padding symbol
/// sits behind every window the loop can still visit.
pub fn expand_with_cap(
    machine: &MatchingMachine,
    cap: usize,
) -> Result<ExpandedMachine, ExpandError> {
    let k = machine.num_symbols();
    let bound = ((k + 1) as u64)
        .checked_pow(machine.order() + 1)
        .and_then(|b| b.checked_mul(machine.num_states() as u64))
        .unwrap_or(u64::MAX);

    let mut builder = MachineBuilder::new(k);
    let mut base = vec![SINK];
    let mut memory = vec![MemoryMap::empty()];
    let mut ids: HashMap<(StateId, MemoryMap), StateId> = HashMap::new();
    let mut queue = VecDeque::new();

    let mut intern = |q: StateId,
                      h: MemoryMap,
                      builder: &mut MachineBuilder,
                      base: &mut Vec<StateId>,
                      memory: &mut Vec<MemoryMap>,
                      queue: &mut VecDeque<StateId>|
     -> Result<StateId, ExpandError> {
        if q == SINK {
            return Ok(SINK);
        }
        if let Some(&id) = ids.get(&(q, h.clone())) {
            return Ok(id);
        }
        if builder.num_states() > cap {
            return Err(ExpandError::ExplosionGuard { cap, bound });
        }
        let id = builder.add_state(machine.next(q), machine.is_prematch(q));
        ids.insert((q, h.clone()), id);
        base.push(q);
        memory.push(h);
        queue.push_back(id);
        Ok(id)
    };

    let init = intern(
        machine.init(),
        MemoryMap::empty(),
        &mut builder,
        &mut base,
        &mut memory,
        &mut queue,
    )?;
    let mut visited = 0usize;
    while let Some(id) = queue.pop_front() {
        visited += 1;
        let q = base[id as usize];
        let h = memory[id as usize].clone();
        let alpha = machine.next(q);
        for x in 0..k as Symbol {
            let (target, shift) = (machine.trans(q, x), machine.shift(q, x));
            let (tq, th) = match h.get(alpha) {
                None => (target, k_shifted(&h.with(alpha, x), shift)),
                Some(y) if y != x => (SINK, MemoryMap::empty()),
                Some(_) => (target, k_shifted(&h, shift)),
            };
            let tid = intern(tq, th, &mut builder, &mut base, &mut memory, &mut queue)?;
            builder.set_edge(id, x, tid, shift);
        }
        if let Some((target, shift)) = machine.sentinel(q) {
            let tid = intern(
                target,
                k_shifted(&h, shift),
                &mut builder,
                &mut base,
                &mut memory,
                &mut queue,
            )?;
            builder.set_sentinel(id, tid, shift);
        }
    }
    Ok(ExpandedMachine {
        machine: builder.finish(init),
        base,
        memory,
        visited,
    })
}

/// True iff every non-sink state of the machine appears in exactly one
/// reachable pair of its full-memory expansion.
pub fn is_standard(machine: &MatchingMachine) -> Result<bool, ExpandError> {
    Ok(standard_memories(machine)?.is_some())
}

/// The per-state memories of a standard machine (indexed by state id),
/// or `None` when the machine is not standard. Single expansion pass.
pub fn standard_memories(machine: &MatchingMachine) -> Result<Option<Vec<MemoryMap>>, ExpandError> {
    let exp = expand(machine)?;
    Ok(memories_from(machine, &exp).ok())
}

fn memories_from(
    machine: &MatchingMachine,
    exp: &ExpandedMachine,
) -> Result<Vec<MemoryMap>, MemError> {
    let mut counts = vec![0usize; machine.num_states()];
    let mut mems = vec![MemoryMap::empty(); machine.num_states()];
    for (id, &q) in exp.base.iter().enumerate().skip(1) {
        counts[q as usize] += 1;
        mems[q as usize] = exp.memory[id].clone();
    }
    for (q, &count) in counts.iter().enumerate().skip(1) {
        if count != 1 {
            return Err(MemError::NotStandard(q as StateId, count));
        }
    }
    Ok(mems)
}

/// The memory paired with state `q` in the expansion of a standard
/// machine. For a strategy state `s` this is `{(j, w_j) : j ∈ s}`.
pub fn mem(machine: &MatchingMachine, q: StateId) -> Result<MemoryMap, MemError> {
    let exp = expand(machine)?;
    let mems = memories_from(machine, &exp)?;
    Ok(mems[q as usize].clone())
}

/// Debug runner asserting memory soundness: at every iteration in state
/// `(q, H)` at window `p`, each recorded `(j, y) ∈ H` must satisfy
/// `t[p+j] = y`. Returns the number of iterations checked.
pub fn check_memory_soundness(
    exp: &ExpandedMachine,
    pattern: &Pattern,
    text: &[Symbol],
) -> Result<u64, String> {
    let m = &exp.machine;
    let wlen = pattern.len();
    if text.len() < wlen {
        return Ok(0);
    }
    let last = text.len() - wlen;
    let guard = (text.len() as u64 + 1) * m.num_states() as u64;
    let (mut state, mut pos) = (m.init(), 0usize);
    let mut steps = 0u64;
    while pos <= last {
        steps += 1;
        if steps > guard {
            return Err("no termination".into());
        }
        for &(j, y) in exp.memory[state as usize].entries() {
            let at = pos + j as usize;
            if at < text.len() && text[at] != y {
                return Err(format!(
                    "memory unsound: state {state} records symbol {y} at +{j}, text has {} at {at}",
                    text[at]
                ));
            }
        }
        let read_at = pos + m.next(state) as usize;
        if read_at < text.len() {
            let x = text[read_at];
            let (t, s) = (m.trans(state, x), m.shift(state, x));
            state = t;
            pos += s as usize;
        } else if read_at == text.len() {
            let (t, s) = m.sentinel(state).ok_or("sentinel undefined")?;
            state = t;
            pos += s as usize;
        } else {
            return Err("read out of bounds".into());
        }
    }
    Ok(steps)
}
