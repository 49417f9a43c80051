//! Search strategies: machines whose states are position subsets.
//!
//! A strategy is determined by a next-position map `γ` with
//! `γ(s) ∉ s`: from state `s` it reads window position `γ(s)`, and its
//! transitions and shifts are the lattice entries at `(γ(s), ·)`. The
//! induced machine keeps only the states reachable from the empty set;
//! states one position short of a full window are the pre-match states.
//!
//! [`fastest_strategy`] finds the exact speed-maximal strategy by
//! depth-first assignment of `γ` over reachable states only (unreached
//! assignments cannot affect the speed, so pruning them loses nothing),
//! deduplicating completed machines by their canonical description.
//! The search space grows so fast that patterns longer than 4 are
//! rejected unless forced.
//!
//! [`k_heuristic`] trades exactness for polynomial time: build the
//! K-sets sublattice, compute shift expectations to horizon `K+1`, and
//! read the strategy off the final argmax.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::expansion::MemoryMap;
use crate::lattice::{
    build_lattice, build_sublattice, full_set, set_to_string, LatticeError, LatticeView, PosSet,
    PositionLattice, SubLattice,
};
use crate::machine::{IidModel, MachineBuilder, MatchingMachine, Pattern, StateId, Symbol};
use crate::markov::{asymptotic_speed_with_memories, SpeedError, SpeedReport};

/// Brute force beyond this pattern length requires an explicit override.
pub const FASTEST_LENGTH_LIMIT: usize = 4;

/// Scores this close are ties, resolved toward the smaller position.
pub const ARGMAX_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("next-position map picks {position}, already inside state {state}")]
    InvalidMap { state: String, position: usize },
    #[error("pattern length {len} exceeds the brute-force limit {limit} (use force to override)")]
    PatternTooLong { len: usize, limit: usize },
    #[error("sublattice state {state} has no admissible position")]
    IncompleteSublattice { state: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Speed(#[from] SpeedError),
}

/// A strategy: the induced machine plus the position set and
/// next-position of every state (index 0 is the sink).
#[derive(Clone, Debug)]
pub struct Strategy {
    pub machine: MatchingMachine,
    pub sets: Vec<PosSet>,
    pub next_pos: Vec<u8>,
    pub wlen: usize,
}

impl Strategy {
    /// Memory of each state: a strategy state `s` records exactly the
    /// pattern symbols at the positions of `s`.
    pub fn memories(&self, pattern: &Pattern) -> Vec<MemoryMap> {
        self.sets
            .iter()
            .enumerate()
            .map(|(id, &s)| {
                if id == 0 {
                    MemoryMap::empty()
                } else {
                    MemoryMap::from_entries(
                        (0..self.wlen)
                            .filter(|&j| s & (1 << j) != 0)
                            .map(|j| (j as u32, pattern.at(j)))
                            .collect(),
                    )
                }
            })
            .collect()
    }

    /// Exact asymptotic speed; strategies are standard, so the chain is
    /// built directly from the known memories.
    pub fn speed(&self, pattern: &Pattern, model: &IidModel) -> Result<SpeedReport, SpeedError> {
        asymptotic_speed_with_memories(&self.machine, &self.memories(pattern), model)
    }
}

struct StrategyAssembly {
    builder: MachineBuilder,
    sets: Vec<PosSet>,
    next_pos: Vec<u8>,
    ids: HashMap<PosSet, StateId>,
    queue: std::collections::VecDeque<PosSet>,
    wlen: usize,
}

impl StrategyAssembly {
    fn intern<G: Fn(PosSet) -> usize>(
        &mut self,
        s: PosSet,
        gamma: &G,
    ) -> Result<StateId, StrategyError> {
        if let Some(&id) = self.ids.get(&s) {
            return Ok(id);
        }
        let pos = gamma(s);
        if pos >= self.wlen || s & (1 << pos) != 0 {
            return Err(StrategyError::InvalidMap {
                state: set_to_string(s),
                position: pos,
            });
        }
        let prematch = s.count_ones() as usize == self.wlen - 1;
        let id = self.builder.add_state(pos as u32, prematch);
        self.builder.set_name(id, set_to_string(s));
        self.ids.insert(s, id);
        self.sets.push(s);
        self.next_pos.push(pos as u8);
        self.queue.push_back(s);
        Ok(id)
    }
}

/// Build the strategy induced by `gamma` on a lattice (or sublattice):
/// breadth-first reachable closure from the empty state.
pub fn strategy_from_map<V, G>(
    view: &V,
    pattern: &Pattern,
    gamma: G,
) -> Result<Strategy, StrategyError>
where
    V: LatticeView,
    G: Fn(PosSet) -> usize,
{
    let m = pattern.len();
    let mut asm = StrategyAssembly {
        builder: MachineBuilder::new(view.asize()),
        sets: vec![0 as PosSet],
        next_pos: vec![0u8],
        ids: HashMap::new(),
        queue: std::collections::VecDeque::new(),
        wlen: m,
    };
    let init = asm.intern(0, &gamma)?;
    while let Some(s) = asm.queue.pop_front() {
        let id = asm.ids[&s];
        let pos = asm.next_pos[id as usize] as usize;
        for x in 0..view.asize() as Symbol {
            let (k, t) = view.entry(s, pos, x);
            let tid = asm.intern(t, &gamma)?;
            asm.builder.set_edge(id, x, tid, k);
        }
    }
    Ok(Strategy {
        machine: asm.builder.finish(init),
        sets: asm.sets,
        next_pos: asm.next_pos,
        wlen: m,
    })
}

/// Smallest position whose score is within [`ARGMAX_TOLERANCE`] of the
/// running maximum; positions must come in ascending order.
pub fn argmax_tiebreak(scored: impl Iterator<Item = (usize, f64)>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (pos, score) in scored {
        match best {
            None => best = Some((pos, score)),
            Some((_, s)) if score > s + ARGMAX_TOLERANCE => best = Some((pos, score)),
            _ => {}
        }
    }
    best.map(|(pos, _)| pos)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FastestOptions {
    /// Lift the pattern-length guard.
    pub force: bool,
    /// Prune assignment branches whose one-step shift bound cannot beat
    /// the incumbent. Exact on the returned speed; ties may resolve to
    /// a different (equal-speed) strategy than the unbounded search.
    pub use_bound: bool,
}

/// Search statistics, mostly for tests and curiosity.
#[derive(Clone, Copy, Debug, Default)]
pub struct FastestStats {
    pub evaluated: usize,
    pub memo_hits: usize,
    pub pruned: usize,
}

/// Exact argmax of the asymptotic speed over all strategies of the
/// pattern. Enumerates next-position assignments depth-first over
/// reachable states only; behaviorally identical strategies are
/// evaluated once. Equal speeds resolve to the lexicographically
/// smallest `(state, position)` description.
pub fn fastest_strategy(
    pattern: &Pattern,
    num_symbols: usize,
    model: &IidModel,
    opts: FastestOptions,
) -> Result<(Strategy, SpeedReport), StrategyError> {
    let (s, r, _) = fastest_strategy_with_stats(pattern, num_symbols, model, opts)?;
    Ok((s, r))
}

pub fn fastest_strategy_with_stats(
    pattern: &Pattern,
    num_symbols: usize,
    model: &IidModel,
    opts: FastestOptions,
) -> Result<(Strategy, SpeedReport, FastestStats), StrategyError> {
    let m = pattern.len();
    if m > FASTEST_LENGTH_LIMIT && !opts.force {
        return Err(StrategyError::PatternTooLong {
            len: m,
            limit: FASTEST_LENGTH_LIMIT,
        });
    }
    let lattice = build_lattice(pattern, num_symbols)?;
    let mut search = Search {
        lattice: &lattice,
        pattern,
        model,
        num_symbols,
        assignment: vec![-1i8; 1 << m],
        best: None,
        memo: HashSet::new(),
        stats: FastestStats::default(),
        use_bound: opts.use_bound,
    };
    search.dfs()?;
    let (key, _speed) = search.best.take().expect("at least one strategy exists");
    let gamma: HashMap<PosSet, usize> = key.iter().map(|&(s, p)| (s, p as usize)).collect();
    let strategy = strategy_from_map(&lattice, pattern, |s| gamma[&s])?;
    let report = strategy.speed(pattern, model)?;
    Ok((strategy, report, search.stats))
}

struct Search<'a> {
    lattice: &'a PositionLattice,
    pattern: &'a Pattern,
    model: &'a IidModel,
    num_symbols: usize,
    /// `assignment[s]` = chosen position for state `s`, or -1.
    assignment: Vec<i8>,
    /// Canonical `(state, position)` description and speed of the
    /// incumbent.
    best: Option<(Vec<(PosSet, u8)>, f64)>,
    memo: HashSet<Vec<(PosSet, u8)>>,
    stats: FastestStats,
    use_bound: bool,
}

impl Search<'_> {
    /// States reachable from the empty set under the current partial
    /// assignment, in `≼`-friendly sorted order, plus the first
    /// unassigned one.
    fn reachable(&self) -> (Vec<PosSet>, Option<PosSet>) {
        let mut seen: HashSet<PosSet> = HashSet::new();
        let mut stack = vec![0 as PosSet];
        seen.insert(0);
        let mut frontier: Option<PosSet> = None;
        while let Some(s) = stack.pop() {
            let pos = self.assignment[s as usize];
            if pos < 0 {
                frontier = Some(match frontier {
                    None => s,
                    Some(f) if crate::lattice::order_lt(s, f) => s,
                    Some(f) => f,
                });
                continue;
            }
            for x in 0..self.num_symbols as Symbol {
                let (_, t) = self.lattice.entry(s, pos as usize, x);
                if seen.insert(t) {
                    stack.push(t);
                }
            }
        }
        let mut all: Vec<PosSet> = seen.into_iter().collect();
        all.sort_unstable();
        (all, frontier)
    }

    /// Sound upper bound on the speed of any completion: no state can
    /// sustain more expected shift per access than its best remaining
    /// one-step action.
    fn bound(&self) -> f64 {
        let m = self.pattern.len();
        let mut best = 0.0f64;
        for s in 0..full_set(m) {
            let onestep = |i: usize| -> f64 {
                (0..self.num_symbols as Symbol)
                    .map(|x| self.model.prob(x) * self.lattice.entry(s, i, x).0 as f64)
                    .sum()
            };
            let b = if self.assignment[s as usize] >= 0 {
                onestep(self.assignment[s as usize] as usize)
            } else {
                (0..m)
                    .filter(|&i| s & (1 << i) == 0)
                    .map(onestep)
                    .fold(0.0, f64::max)
            };
            best = best.max(b);
        }
        best
    }

    /// Speed of a completed assignment, straight off the lattice: the
    /// chain row of a strategy state is always the model mix (its next
    /// position is never pre-checked), so no machine needs building.
    fn evaluate(&self, key: &[(PosSet, u8)]) -> Result<f64, StrategyError> {
        let index: HashMap<PosSet, usize> =
            key.iter().enumerate().map(|(i, &(s, _))| (s, i)).collect();
        let mut rows = Vec::with_capacity(key.len());
        let mut expected = Vec::with_capacity(key.len());
        for &(s, pos) in key {
            let mut row: Vec<(u32, f64)> = Vec::new();
            let mut e = 0.0;
            for x in 0..self.num_symbols as Symbol {
                let p = self.model.prob(x);
                let (k, t) = self.lattice.entry(s, pos as usize, x);
                e += p * k as f64;
                if p > 0.0 {
                    row.push((index[&t] as u32, p));
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
            expected.push(e);
        }
        let chain = crate::markov::MarkovChain {
            init: index[&0],
            rows,
        };
        let beta = crate::markov::limit_frequencies(&chain)?;
        Ok(beta.iter().zip(&expected).map(|(b, e)| b * e).sum())
    }

    fn dfs(&mut self) -> Result<(), StrategyError> {
        let (reachable, frontier) = self.reachable();
        match frontier {
            Some(s) => {
                if self.use_bound {
                    if let Some((_, best)) = &self.best {
                        if self.bound() < *best {
                            self.stats.pruned += 1;
                            return Ok(());
                        }
                    }
                }
                let m = self.pattern.len();
                for i in 0..m {
                    if s & (1 << i) != 0 {
                        continue;
                    }
                    self.assignment[s as usize] = i as i8;
                    self.dfs()?;
                    self.assignment[s as usize] = -1;
                }
                Ok(())
            }
            None => {
                let key: Vec<(PosSet, u8)> = reachable
                    .iter()
                    .map(|&s| (s, self.assignment[s as usize] as u8))
                    .collect();
                if !self.memo.insert(key.clone()) {
                    self.stats.memo_hits += 1;
                    return Ok(());
                }
                self.stats.evaluated += 1;
                let speed = self.evaluate(&key)?;
                let better = match &self.best {
                    None => true,
                    Some((bkey, bspeed)) => speed > *bspeed || (speed == *bspeed && key < *bkey),
                };
                if better {
                    self.best = Some((key, speed));
                }
                Ok(())
            }
        }
    }
}

/// Best expected cumulative shift reachable in `0..=horizon` steps from
/// each sublattice state, restricted to admissible positions.
#[derive(Clone, Debug)]
pub struct ShiftExpectationTable {
    pub horizon: usize,
    /// `levels[l][state_index]` = `ES^l[s]`.
    pub levels: Vec<Vec<f64>>,
}

pub fn shift_expectations(
    sub: &SubLattice,
    model: &IidModel,
    horizon: usize,
) -> Result<ShiftExpectationTable, StrategyError> {
    let n = sub.len();
    for idx in 0..n {
        if sub.admissible(idx).is_empty() {
            return Err(StrategyError::IncompleteSublattice {
                state: set_to_string(sub.state_at(idx)),
            });
        }
    }
    let mut levels = vec![vec![0.0f64; n]];
    for _ in 1..=horizon {
        let prev = levels.last().unwrap();
        let mut cur = vec![0.0f64; n];
        for (idx, slot) in cur.iter_mut().enumerate() {
            let s = sub.state_at(idx);
            let mut best = f64::NEG_INFINITY;
            for &i in sub.admissible(idx) {
                let mut e = 0.0;
                for x in 0..sub.asize() as Symbol {
                    let (k, t) = sub.entry(s, i as usize, x);
                    let tidx = sub.state_index(t).expect("admissible targets are members");
                    e += model.prob(x) * (k as f64 + prev[tidx]);
                }
                if e > best {
                    best = e;
                }
            }
            *slot = best;
        }
        levels.push(cur);
    }
    Ok(ShiftExpectationTable { horizon, levels })
}

/// Polynomial heuristic: K-sets sublattice, shift expectations to
/// horizon `K+1` (overridable), strategy extracted from the final
/// argmax (ties to the smallest position).
pub fn k_heuristic(
    pattern: &Pattern,
    num_symbols: usize,
    model: &IidModel,
    k: usize,
    horizon_override: Option<usize>,
) -> Result<(Strategy, SpeedReport), StrategyError> {
    assert!(k >= 1, "heuristic order must be at least 1");
    let sub = build_sublattice(pattern, num_symbols, k);
    let horizon = horizon_override.unwrap_or(k + 1).max(1);
    let es = shift_expectations(&sub, model, horizon - 1)?;
    let prev = &es.levels[horizon - 1];
    let mut gamma_by_state: HashMap<PosSet, usize> = HashMap::new();
    for idx in 0..sub.len() {
        let s = sub.state_at(idx);
        let scored = sub.admissible(idx).iter().map(|&i| {
            let mut e = 0.0;
            for x in 0..sub.asize() as Symbol {
                let (kk, t) = sub.entry(s, i as usize, x);
                let tidx = sub.state_index(t).expect("admissible targets are members");
                e += model.prob(x) * (kk as f64 + prev[tidx]);
            }
            (i as usize, e)
        });
        let pick = argmax_tiebreak(scored).expect("complete sublattice");
        gamma_by_state.insert(s, pick);
    }
    let strategy = strategy_from_map(&sub, pattern, |s| gamma_by_state[&s])?;
    let report = strategy.speed(pattern, model)?;
    Ok((strategy, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::executor::{generic_run, oracle_search, sample_text};
    use crate::expansion::{expand, is_standard};
    use crate::machine::{is_compact, validate_structure, Alphabet};
    use crate::rng::SplitMix64;

    fn setup(w: &[u8]) -> (Alphabet, Pattern, PositionLattice) {
        let a = Alphabet::new(b"ab").unwrap();
        let p = Pattern::from_bytes(&a, w).unwrap();
        let lat = build_lattice(&p, 2).unwrap();
        (a, p, lat)
    }

    fn min_free(s: PosSet) -> usize {
        (0..32).find(|&i| s & (1 << i) == 0).unwrap()
    }

    fn max_free(s: PosSet, m: usize) -> usize {
        (0..m).rev().find(|&i| s & (1 << i) == 0).unwrap()
    }

    #[test]
    fn leftmost_and_rightmost_strategies_are_valid() {
        let (_, p, lat) = setup(b"abb");
        let model = IidModel::uniform(2);
        let mut rng = SplitMix64::new(8);
        for gamma in [
            Box::new(|s: PosSet| min_free(s)) as Box<dyn Fn(PosSet) -> usize>,
            Box::new(|s: PosSet| max_free(s, 3)),
        ] {
            let strat = strategy_from_map(&lat, &p, gamma).unwrap();
            assert_eq!(validate_structure(&strat.machine, &p), vec![]);
            assert!(is_standard(&strat.machine).unwrap());
            assert!(is_compact(&strat.machine).compact);
            for _ in 0..300 {
                let t = sample_text(&model, 50, &mut rng);
                let r = generic_run(&strat.machine, &p, &t).unwrap();
                assert_eq!(r.occurrences, oracle_search(&p, &t));
            }
        }
    }

    #[test]
    fn leftmost_strategy_of_ab_reads_like_expected() {
        let (_, p, lat) = setup(b"ab");
        let strat = strategy_from_map(&lat, &p, min_free).unwrap();
        // States: {} and {1} (after reading a 'b' at position 1 of the
        // next window... the reachable set depends on shifts); at least
        // the init must read position 0.
        assert_eq!(strat.machine.next(strat.machine.init()), 0);
        let report = strat.speed(&p, &IidModel::uniform(2)).unwrap();
        assert!(report.speed > 0.0 && report.speed <= 2.0);
    }

    #[test]
    fn invalid_map_is_rejected() {
        let (_, p, lat) = setup(b"abb");
        let err = strategy_from_map(&lat, &p, |_| 5).unwrap_err();
        assert!(matches!(err, StrategyError::InvalidMap { .. }));
    }

    #[test]
    fn expansion_is_a_bijection_on_strategy_states() {
        let (_, p, lat) = setup(b"abab");
        let strat = strategy_from_map(&lat, &p, min_free).unwrap();
        let exp = expand(&strat.machine).unwrap();
        assert_eq!(exp.machine.num_states(), strat.machine.num_states());
        // And the memory of a state is exactly its position set's symbols.
        let mems = strat.memories(&p);
        for (id, mem) in mems.iter().enumerate().skip(1) {
            assert_eq!(&exp.memory[id], mem);
        }
    }

    #[test]
    fn pattern_too_long_guard() {
        let a = Alphabet::new(b"ab").unwrap();
        let p = Pattern::from_bytes(&a, b"ababa").unwrap();
        let err = fastest_strategy(&p, 2, &IidModel::uniform(2), FastestOptions::default());
        assert!(matches!(
            err,
            Err(StrategyError::PatternTooLong { len: 5, limit: 4 })
        ));
    }

    #[test]
    fn single_symbol_pattern_has_the_unique_strategy() {
        let a = Alphabet::new(b"ab").unwrap();
        let p = Pattern::from_bytes(&a, b"a").unwrap();
        let (strat, report) =
            fastest_strategy(&p, 2, &IidModel::uniform(2), FastestOptions::default()).unwrap();
        assert_eq!(strat.machine.num_states(), 2); // sink + {}
        assert!((report.speed - 1.0).abs() < 1e-12);
    }

    /// Exhaustive enumeration of every total next-position map, no
    /// memoization, no reachability pruning: the definitional oracle.
    fn exhaustive_fastest_speed(p: &Pattern, model: &IidModel) -> f64 {
        let m = p.len();
        let lat = build_lattice(p, model.len()).unwrap();
        let states: Vec<PosSet> = (0..full_set(m)).collect();
        let choices: Vec<Vec<usize>> = states
            .iter()
            .map(|&s| (0..m).filter(|&i| s & (1 << i) == 0).collect())
            .collect();
        let mut pick = vec![0usize; states.len()];
        let mut best = f64::NEG_INFINITY;
        loop {
            let gamma: HashMap<PosSet, usize> = states
                .iter()
                .enumerate()
                .map(|(idx, &s)| (s, choices[idx][pick[idx]]))
                .collect();
            let strat = strategy_from_map(&lat, p, |s| gamma[&s]).unwrap();
            let speed = strat.speed(p, model).unwrap().speed;
            if speed > best {
                best = speed;
            }
            // Odometer over all total maps.
            let mut i = 0;
            loop {
                if i == states.len() {
                    return best;
                }
                pick[i] += 1;
                if pick[i] < choices[i].len() {
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn fastest_matches_the_naive_enumerator() {
        for w in [&b"ab"[..], b"aa", b"abb", b"aab"] {
            let a = Alphabet::new(b"ab").unwrap();
            let p = Pattern::from_bytes(&a, w).unwrap();
            for model in [IidModel::uniform(2), IidModel::new(vec![0.2, 0.8]).unwrap()] {
                let (_, report) =
                    fastest_strategy(&p, 2, &model, FastestOptions::default()).unwrap();
                let oracle = exhaustive_fastest_speed(&p, &model);
                assert!(
                    (report.speed - oracle).abs() < 1e-12,
                    "{:?}: {} vs oracle {}",
                    String::from_utf8_lossy(w),
                    report.speed,
                    oracle
                );
            }
        }
    }

    #[test]
    fn bounded_search_finds_the_same_speed() {
        let a = Alphabet::new(b"ab").unwrap();
        let p = Pattern::from_bytes(&a, b"abb").unwrap();
        let model = IidModel::new(vec![0.3, 0.7]).unwrap();
        let (_, plain) = fastest_strategy(&p, 2, &model, FastestOptions::default()).unwrap();
        let (_, bounded) = fastest_strategy(
            &p,
            2,
            &model,
            FastestOptions {
                force: false,
                use_bound: true,
            },
        )
        .unwrap();
        assert!((plain.speed - bounded.speed).abs() < 1e-12);
    }

    #[test]
    fn shift_expectations_base_and_one_step() {
        let (_, p, lat) = setup(b"abb");
        let sub = crate::lattice::n_sets_sublattice(&lat, 3);
        let model = IidModel::uniform(2);
        let es = shift_expectations(&sub, &model, 3).unwrap();
        assert!(es.levels[0].iter().all(|&v| v == 0.0));
        // Level 1 is the best one-step expected shift.
        for idx in 0..sub.len() {
            let s = sub.state_at(idx);
            let expect = sub
                .admissible(idx)
                .iter()
                .map(|&i| {
                    (0..2 as Symbol)
                        .map(|x| model.prob(x) * sub.entry(s, i as usize, x).0 as f64)
                        .sum::<f64>()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((es.levels[1][idx] - expect).abs() < 1e-12);
        }
        // Monotone in the horizon, bounded by horizon * |w|.
        for l in 1..es.levels.len() {
            for idx in 0..sub.len() {
                assert!(es.levels[l][idx] + 1e-12 >= es.levels[l - 1][idx]);
                assert!(es.levels[l][idx] <= (l * p.len()) as f64 + 1e-12);
            }
        }
    }

    /// Plain recursion over all position-choice trees (no table):
    /// independent route to the same maximum.
    fn tree_search(sub: &SubLattice, model: &IidModel, s: PosSet, depth: usize) -> f64 {
        if depth == 0 {
            return 0.0;
        }
        let idx = sub.state_index(s).unwrap();
        sub.admissible(idx)
            .iter()
            .map(|&i| {
                (0..sub.asize() as Symbol)
                    .map(|x| {
                        let (k, t) = sub.entry(s, i as usize, x);
                        model.prob(x) * (k as f64 + tree_search(sub, model, t, depth - 1))
                    })
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn shift_expectations_match_exhaustive_tree_search() {
        let (_, p, lat) = setup(b"abb");
        let sub = crate::lattice::n_sets_sublattice(&lat, p.len());
        let model = IidModel::new(vec![0.4, 0.6]).unwrap();
        let es = shift_expectations(&sub, &model, 4).unwrap();
        for idx in 0..sub.len() {
            let s = sub.state_at(idx);
            let oracle = tree_search(&sub, &model, s, 4);
            assert!(
                (es.levels[4][idx] - oracle).abs() < 1e-9,
                "state {}: {} vs {}",
                set_to_string(s),
                es.levels[4][idx],
                oracle
            );
        }
    }

    #[test]
    fn fastest_abb_finds_overlapping_occurrences() {
        let a = Alphabet::new(b"ab").unwrap();
        let p = Pattern::from_bytes(&a, b"abb").unwrap();
        let (strat, _) = fastest_strategy(&p, 2, &IidModel::uniform(2), FastestOptions::default())
            .unwrap();
        let text = a.encode(b"abbabb").unwrap();
        let run = generic_run(&strat.machine, &p, &text).unwrap();
        assert_eq!(run.occurrences, vec![0, 3]);
    }

    #[test]
    fn non_prematch_states_keep_their_grown_set_reachable() {
        // Reading the matching symbol from s must land on s ∪ {γ(s)},
        // so the grown set is always a state of the strategy.
        let (_, p, lat) = setup(b"abba");
        for gamma in [
            Box::new(min_free) as Box<dyn Fn(PosSet) -> usize>,
            Box::new(|s: PosSet| max_free(s, 4)),
        ] {
            let strat = strategy_from_map(&lat, &p, gamma).unwrap();
            for id in 1..strat.machine.num_states() {
                let s = strat.sets[id];
                if (s.count_ones() as usize) < p.len() - 1 {
                    let grown = s | (1 << strat.next_pos[id]);
                    assert!(strat.sets.contains(&grown));
                }
            }
        }
    }

    #[test]
    fn heuristic_is_valid_and_dominated_by_fastest() {
        let a = Alphabet::new(b"ab").unwrap();
        let model = IidModel::uniform(2);
        let mut rng = SplitMix64::new(77);
        for w in [&b"abb"[..], b"abab", b"aabb"] {
            let p = Pattern::from_bytes(&a, w).unwrap();
            let (fast, fast_report) =
                fastest_strategy(&p, 2, &model, FastestOptions::default()).unwrap();
            let _ = fast;
            for k in 1..=3 {
                let (strat, report) = k_heuristic(&p, 2, &model, k, None).unwrap();
                assert!(
                    report.speed <= fast_report.speed + 1e-9,
                    "k={k} {} vs fastest {}",
                    report.speed,
                    fast_report.speed
                );
                for _ in 0..100 {
                    let t = sample_text(&model, 60, &mut rng);
                    let r = generic_run(&strat.machine, &p, &t).unwrap();
                    assert_eq!(r.occurrences, oracle_search(&p, &t));
                }
            }
        }
    }

    #[test]
    fn argmax_tiebreak_rules() {
        assert_eq!(argmax_tiebreak([(2, 1.0)].into_iter()), Some(2));
        assert_eq!(argmax_tiebreak([(1, 5.0), (3, 5.0)].into_iter()), Some(1));
        // Within tolerance counts as a tie.
        assert_eq!(
            argmax_tiebreak([(0, 1.0), (2, 1.0 + 1e-13)].into_iter()),
            Some(0)
        );
        assert_eq!(argmax_tiebreak([(0, 1.0), (2, 1.1)].into_iter()), Some(2));
    }

    #[test]
    fn determinism_of_fastest_and_heuristic() {
        let a = Alphabet::new(b"ab").unwrap();
        let p = Pattern::from_bytes(&a, b"abba").unwrap();
        let model = IidModel::new(vec![0.25, 0.75]).unwrap();
        let (s1, r1) = fastest_strategy(&p, 2, &model, FastestOptions::default()).unwrap();
        let (s2, r2) = fastest_strategy(&p, 2, &model, FastestOptions::default()).unwrap();
        assert_eq!(s1.machine, s2.machine);
        assert_eq!(r1.speed, r2.speed);
        let (h1, _) = k_heuristic(&p, 2, &model, 2, None).unwrap();
        let (h2, _) = k_heuristic(&p, 2, &model, 2, None).unwrap();
        assert_eq!(h1.machine, h2.machine);
    }
}
