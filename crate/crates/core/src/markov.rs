//! Exact asymptotic speed of a matching machine under an iid model.
//!
//! For a *standard* machine the state sequence of the generic loop is a
//! Markov chain: when the position about to be read is already recorded
//! in `mem(q)` the successor is forced (probability 1), otherwise the
//! read is a fresh iid symbol and the row mixes `π`. The asymptotic
//! speed is `Σ_q β_q · E_q`, where `β` are the limit (Cesàro) state
//! frequencies from the initial state and `E_q` is the expected shift
//! out of `q` (the recorded symbol's shift when the read is forced, the
//! `π`-average otherwise).
//!
//! The pipeline for an arbitrary machine is: expand to full memory when
//! not standard, build the chain, solve for `β`, combine. `β` is
//! computed by condensing the positive-probability graph into strongly
//! connected components, solving absorption probabilities into each
//! terminal component, and mixing their stationary distributions —
//! periodic chains need no special casing because occupation
//! frequencies, not pointwise limits, are what the speed uses. Dense LU
//! handles chains up to [`DENSE_LIMIT`] states; larger chains fall back
//! to damped power iteration, whose fixed point is the same mixture.

use thiserror::Error;

use crate::expansion::{expand, ExpandError, ExpandedMachine, MemoryMap};
use crate::linalg::{lu_factor, lu_solve};
use crate::machine::{IidModel, MatchingMachine, StateId, Symbol};

/// Largest chain solved by dense LU; beyond this, power iteration.
pub const DENSE_LIMIT: usize = 4096;
const PIVOT_TOL: f64 = 1e-10;
const POWER_TOL: f64 = 1e-12;
const POWER_MAX_SWEEPS: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpeedError {
    #[error("machine is not standard; expand it first")]
    NotStandard,
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error("linear system is rank deficient beyond the expected null space")]
    SingularSystem,
}

/// The Markov chain of machine states under an iid model: sparse
/// row-stochastic transition matrix plus the initial state (the initial
/// distribution is the unit mass there).
#[derive(Clone, Debug)]
pub struct MarkovChain {
    pub init: usize,
    /// `rows[q]` lists `(q', P(q -> q'))` with positive probabilities,
    /// sorted by target.
    pub rows: Vec<Vec<(u32, f64)>>,
}

impl MarkovChain {
    pub fn num_states(&self) -> usize {
        self.rows.len()
    }
}

/// Speed analysis of one machine under one model.
#[derive(Clone, Debug, serde::Serialize)]
pub struct SpeedReport {
    /// Limit state frequencies (zero on transient states).
    pub beta: Vec<f64>,
    /// Expected shift out of each state.
    pub expected_shift: Vec<f64>,
    /// `Σ_q β_q · E_q`.
    pub speed: f64,
    /// States of the machine as given.
    pub base_states: usize,
    /// States of the machine actually analyzed (its expansion when the
    /// input was not standard).
    pub analyzed_states: usize,
}

/// Build the chain of a standard machine. Rows for states whose next
/// position was already checked carry a single probability-1 entry.
pub fn build_chain(machine: &MatchingMachine, model: &IidModel) -> Result<MarkovChain, SpeedError> {
    let mems = crate::expansion::standard_memories(machine)?.ok_or(SpeedError::NotStandard)?;
    Ok(chain_from_memories(machine, &mems, model))
}

pub(crate) fn chain_from_memories(
    machine: &MatchingMachine,
    mems: &[MemoryMap],
    model: &IidModel,
) -> MarkovChain {
    let n = machine.num_states();
    let mut rows = Vec::with_capacity(n);
    for q in 0..n as StateId {
        let mut row: Vec<(u32, f64)> = Vec::new();
        match mems[q as usize].get(machine.next(q)) {
            Some(y) => row.push((machine.trans(q, y), 1.0)),
            None => {
                for x in 0..machine.num_symbols() as Symbol {
                    let p = model.prob(x);
                    if p > 0.0 {
                        row.push((machine.trans(q, x), p));
                    }
                }
            }
        }
        row.sort_unstable_by_key(|&(t, _)| t);
        row.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        rows.push(row);
    }
    MarkovChain {
        init: machine.init() as usize,
        rows,
    }
}

/// Expected shift out of state `q` of a standard machine: the recorded
/// symbol's shift when the next position was already checked, the
/// model average otherwise.
pub fn expected_shift(
    machine: &MatchingMachine,
    model: &IidModel,
    q: StateId,
) -> Result<f64, SpeedError> {
    let mems = crate::expansion::standard_memories(machine)?.ok_or(SpeedError::NotStandard)?;
    Ok(expected_shifts_from(machine, &mems, model)[q as usize])
}

pub(crate) fn expected_shifts_from(
    machine: &MatchingMachine,
    mems: &[MemoryMap],
    model: &IidModel,
) -> Vec<f64> {
    (0..machine.num_states() as StateId)
        .map(|q| match mems[q as usize].get(machine.next(q)) {
            Some(y) => machine.shift(q, y) as f64,
            None => (0..machine.num_symbols() as Symbol)
                .map(|x| model.prob(x) * machine.shift(q, x) as f64)
                .sum(),
        })
        .collect()
}

/// Iterative Tarjan SCC over the positive-probability graph restricted
/// to states reachable from `init`. Returns `(component id per state,
/// component count)`; unreachable states get `u32::MAX`.
fn reachable_sccs(chain: &MarkovChain) -> (Vec<u32>, usize) {
    const UNSEEN: u32 = u32::MAX;
    let n = chain.num_states();
    let mut reach = vec![false; n];
    let mut stack = vec![chain.init];
    reach[chain.init] = true;
    while let Some(q) = stack.pop() {
        for &(t, _) in &chain.rows[q] {
            if !reach[t as usize] {
                reach[t as usize] = true;
                stack.push(t as usize);
            }
        }
    }

    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut tarjan_stack: Vec<usize> = Vec::new();
    let mut next_index = 0u32;
    let mut num_comps = 0usize;
    let mut frames: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if !reach[root] || index[root] != UNSEEN {
            continue;
        }
        frames.push((root, 0));
        while let Some(&mut (v, ref mut ei)) = frames.last_mut() {
            if *ei == 0 {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                tarjan_stack.push(v);
                on_stack[v] = true;
            }
            if *ei < chain.rows[v].len() {
                let w = chain.rows[v][*ei].0 as usize;
                *ei += 1;
                if index[w] == UNSEEN {
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    loop {
                        let w = tarjan_stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = num_comps as u32;
                        if w == v {
                            break;
                        }
                    }
                    num_comps += 1;
                }
                frames.pop();
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    low[parent] = low[parent].min(low[v]);
                }
            }
        }
    }
    (comp, num_comps)
}

/// Limit occupation frequencies of the chain from its initial state:
/// absorption probability into each terminal component times that
/// component's stationary distribution; zero on transient states.
pub fn limit_frequencies(chain: &MarkovChain) -> Result<Vec<f64>, SpeedError> {
    let n = chain.num_states();
    if n > DENSE_LIMIT {
        return Ok(power_iteration(chain));
    }
    let (comp, num_comps) = reachable_sccs(chain);
    let mut terminal = vec![true; num_comps];
    for q in 0..n {
        if comp[q] == u32::MAX {
            continue;
        }
        for &(t, _) in &chain.rows[q] {
            if comp[t as usize] != comp[q] {
                terminal[comp[q] as usize] = false;
            }
        }
    }
    let terminal_comps: Vec<u32> = (0..num_comps as u32)
        .filter(|&c| terminal[c as usize])
        .collect();

    // Absorption probabilities from init into each terminal component.
    let transient: Vec<usize> = (0..n)
        .filter(|&q| comp[q] != u32::MAX && !terminal[comp[q] as usize])
        .collect();
    let mut absorb = vec![0.0; num_comps];
    if terminal[comp[chain.init] as usize] {
        absorb[comp[chain.init] as usize] = 1.0;
    } else {
        let k = transient.len();
        let mut slot_of = vec![usize::MAX; n];
        for (i, &q) in transient.iter().enumerate() {
            slot_of[q] = i;
        }
        // I - P restricted to transient states.
        let mut a = vec![0.0; k * k];
        for (i, &q) in transient.iter().enumerate() {
            a[i * k + i] = 1.0;
            for &(t, p) in &chain.rows[q] {
                let t = t as usize;
                if slot_of[t] != usize::MAX {
                    a[i * k + slot_of[t]] -= p;
                }
            }
        }
        let piv = lu_factor(&mut a, k, PIVOT_TOL).ok_or(SpeedError::SingularSystem)?;
        let init_slot = slot_of[chain.init];
        for &c in &terminal_comps {
            let mut rhs = vec![0.0; k];
            for (i, &q) in transient.iter().enumerate() {
                for &(t, p) in &chain.rows[q] {
                    if comp[t as usize] == c {
                        rhs[i] += p;
                    }
                }
            }
            lu_solve(&a, k, &piv, &mut rhs);
            absorb[c as usize] = rhs[init_slot];
        }
    }

    // Stationary distribution of each relevant terminal component.
    let mut beta = vec![0.0; n];
    for &c in &terminal_comps {
        let weight = absorb[c as usize];
        if weight <= 0.0 {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&q| comp[q] == c).collect();
        let m = members.len();
        let mut slot_of = vec![usize::MAX; n];
        for (i, &q) in members.iter().enumerate() {
            slot_of[q] = i;
        }
        // (P^T - I) s = 0 with the last row replaced by Σ s = 1.
        let mut a = vec![0.0; m * m];
        for (j, &q) in members.iter().enumerate() {
            a[j * m + j] = -1.0;
            for &(t, p) in &chain.rows[q] {
                let i = slot_of[t as usize];
                debug_assert_ne!(i, usize::MAX, "terminal component must be closed");
                a[i * m + j] += p;
            }
        }
        for j in 0..m {
            a[(m - 1) * m + j] = 1.0;
        }
        let mut s = vec![0.0; m];
        s[m - 1] = 1.0;
        let piv = lu_factor(&mut a, m, PIVOT_TOL).ok_or(SpeedError::SingularSystem)?;
        lu_solve(&a, m, &piv, &mut s);
        for (i, &q) in members.iter().enumerate() {
            beta[q] += weight * s[i];
        }
    }
    Ok(beta)
}

/// Damped (lazy) power iteration `v <- v(P+I)/2` from the initial
/// distribution. The damping removes periodicity, so the pointwise
/// limit equals the absorption-weighted stationary mixture.
fn power_iteration(chain: &MarkovChain) -> Vec<f64> {
    let n = chain.num_states();
    let mut v = vec![0.0; n];
    v[chain.init] = 1.0;
    let mut next = vec![0.0; n];
    for _ in 0..POWER_MAX_SWEEPS {
        for x in next.iter_mut() {
            *x = 0.0;
        }
        for q in 0..n {
            let vq = v[q];
            if vq == 0.0 {
                continue;
            }
            next[q] += 0.5 * vq;
            for &(t, p) in &chain.rows[q] {
                next[t as usize] += 0.5 * vq * p;
            }
        }
        let diff: f64 = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut v, &mut next);
        if diff <= POWER_TOL {
            break;
        }
    }
    v
}

/// Asymptotic speed of any structurally valid machine: expands to full
/// memory when the machine is not standard, then solves the chain.
pub fn asymptotic_speed(
    machine: &MatchingMachine,
    model: &IidModel,
) -> Result<SpeedReport, SpeedError> {
    let exp: ExpandedMachine = expand(machine)?;
    let base_states = machine.num_states();
    // A standard machine is isomorphic to its expansion; analyzing the
    // expansion directly is equivalent either way.
    speed_of_analyzed(&exp.machine, &exp.memory, model, base_states)
}

/// Speed of a machine whose per-state memories are already known (e.g.
/// strategies, whose state `s` records exactly the pattern symbols at
/// the positions of `s`). Skips the expansion pass.
pub fn asymptotic_speed_with_memories(
    machine: &MatchingMachine,
    mems: &[MemoryMap],
    model: &IidModel,
) -> Result<SpeedReport, SpeedError> {
    speed_of_analyzed(machine, mems, model, machine.num_states())
}

fn speed_of_analyzed(
    machine: &MatchingMachine,
    mems: &[MemoryMap],
    model: &IidModel,
    base_states: usize,
) -> Result<SpeedReport, SpeedError> {
    let chain = chain_from_memories(machine, mems, model);
    let beta = limit_frequencies(&chain)?;
    let expected = expected_shifts_from(machine, mems, model);
    let speed = beta.iter().zip(&expected).map(|(b, e)| b * e).sum();
    Ok(SpeedReport {
        beta,
        expected_shift: expected,
        speed,
        base_states,
        analyzed_states: machine.num_states(),
    })
}
