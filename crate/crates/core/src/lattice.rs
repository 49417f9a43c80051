//! The position lattice of a pattern.
//!
//! A lattice state is a proper subset `s` of pattern positions, meaning
//! "these relative window positions are known to match the pattern". For
//! every unchecked position `i ∉ s` and symbol `x`, the lattice stores
//! the minimal consistent window shift `Sh_s(i,x)` and the surviving
//! position set `T_s(i,x) = (s ∪ {i}) ≫ Sh_s(i,x)`. The shift is the
//! smallest `k` (at least 1 when `s` is one position short of full, else
//! at least 0) such that the read symbol re-aligns onto the pattern
//! (`w[i-k] = x` whenever `i >= k`) and every recorded position stays
//! consistent (`w[u-k] = w[u]` for all `u ∈ s` with `u >= k`).
//!
//! [`oracle_shift`] computes entries straight from that definition and
//! serves as the testing oracle. [`build_lattice`] fills the whole table
//! in `O(|w|·2^|w|)` by reusing already-computed rows: the empty row
//! comes from the `prec` table, singleton rows reduce to the empty row,
//! and larger rows peel off their greatest element. Entries for a state
//! are only ever derived from states strictly smaller in the total order
//! `≼` (cardinality first, then lowest differing position).
//!
//! Two boundary cases the reductions must get right, both covered by the
//! exhaustive oracle tests: a peeled-off position that falls behind the
//! window (`ℓ < k₁`) contributes nothing, and position 0 never
//! constrains a positive shift, so rows of `{0}` equal the empty row
//! wherever the shift is positive.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::machine::{Alphabet, Pattern, Symbol};

/// A set of pattern positions as a bitmask (bit `i` = position `i`).
pub type PosSet = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    /// The dense table needs `Θ(|w|·2^|w|)` memory; patterns longer than
    /// the cap are rejected.
    #[error("pattern length {len} exceeds the lattice capacity cap {cap}")]
    CapacityGuard { len: usize, cap: usize },
}

pub const DEFAULT_LENGTH_CAP: usize = 24;

/// `{0, ..., len-1}` as a bitmask.
pub fn full_set(len: usize) -> PosSet {
    ((1u64 << len) - 1) as PosSet
}

/// Render a position set as `{0,2}` (empty set is `{}`).
pub fn set_to_string(s: PosSet) -> String {
    let mut out = String::from("{");
    let mut first = true;
    for i in 0..32 {
        if s & (1 << i) != 0 {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{i}");
            first = false;
        }
    }
    out.push('}');
    out
}

/// The total order `≼` on position sets: smaller cardinality first;
/// within a cardinality, the set owning the smallest differing position
/// comes first.
pub fn order_leq(s: PosSet, t: PosSet) -> bool {
    if s == t {
        return true;
    }
    let (cs, ct) = (s.count_ones(), t.count_ones());
    if cs != ct {
        return cs < ct;
    }
    let lowest_diff = (s ^ t) & (s ^ t).wrapping_neg();
    s & lowest_diff != 0
}

pub fn order_lt(s: PosSet, t: PosSet) -> bool {
    s != t && order_leq(s, t)
}

/// `prec[i][x] = max{j <= i : w_j = x}`, or -1 when `x` does not occur
/// in `w[0..=i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecTable {
    asize: usize,
    entries: Vec<i32>,
}

impl PrecTable {
    pub fn get(&self, i: usize, x: Symbol) -> i32 {
        self.entries[i * self.asize + x as usize]
    }
}

pub fn prec_table(pattern: &Pattern, num_symbols: usize) -> PrecTable {
    let m = pattern.len();
    let mut entries = vec![-1i32; m * num_symbols];
    let mut last = vec![-1i32; num_symbols];
    for i in 0..m {
        last[pattern.at(i) as usize] = i as i32;
        entries[i * num_symbols..(i + 1) * num_symbols].copy_from_slice(&last);
    }
    PrecTable {
        asize: num_symbols,
        entries,
    }
}

/// Length of the longest proper suffix of `w` that is also a prefix,
/// via the classic partial-match table.
pub fn border(pattern: &Pattern) -> usize {
    let w = pattern.symbols();
    let mut fail = vec![0usize; w.len() + 1];
    let mut k = 0usize;
    for i in 1..w.len() {
        while k > 0 && w[i] != w[k] {
            k = fail[k];
        }
        if w[i] == w[k] {
            k += 1;
        }
        fail[i + 1] = k;
    }
    fail[w.len()]
}

/// Brute-force lattice entry, straight from the minimal-`k` definition.
/// `k = |w|` always qualifies, so the scan terminates.
pub fn oracle_shift(pattern: &Pattern, s: PosSet, i: usize, x: Symbol) -> (u32, PosSet) {
    let w = pattern.symbols();
    let m = w.len();
    debug_assert!(i < m && s & (1 << i) == 0 && s < full_set(m));
    let start = if s.count_ones() as usize == m - 1 {
        1
    } else {
        0
    };
    for k in start..=m {
        if i >= k && w[i - k] != x {
            continue;
        }
        let mut ok = true;
        let mut rest = s >> k;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            if w[j] != w[j + k] {
                ok = false;
                break;
            }
            rest &= rest - 1;
        }
        if ok {
            return (k as u32, (s | (1 << i)) >> k);
        }
    }
    unreachable!("k = |w| satisfies the definition vacuously")
}

/// Computes one lattice entry from already-filled `≼`-smaller rows.
/// `get` must return the entry for any state strictly before `s`.
fn derive_entry<G>(
    w: &[Symbol],
    bord: usize,
    prec: &PrecTable,
    s: PosSet,
    i: usize,
    x: Symbol,
    get: &G,
) -> (u32, PosSet)
where
    G: Fn(PosSet, usize, Symbol) -> (u32, PosSet),
{
    let m = w.len();
    if x == w[i] {
        // Matching symbol: grow the set, or wrap to the border when the
        // window is complete.
        return if s.count_ones() as usize == m - 1 {
            ((m - bord) as u32, full_set(bord))
        } else {
            (0, s | (1 << i))
        };
    }
    match s.count_ones() {
        0 => {
            let p = prec.get(i, x);
            if p >= 0 {
                ((i as i32 - p) as u32, 1 << p)
            } else {
                (i as u32 + 1, 0)
            }
        }
        1 => {
            let e = s.trailing_zeros() as usize;
            if i < e {
                // Refine the empty-row entry by the constraint at e.
                let (k1, t1) = get(0, i, x);
                debug_assert!(k1 as usize <= e);
                let (k2, t2) = get(t1, e - k1 as usize, w[e]);
                (k1 + k2, t2)
            } else if e == 0 {
                get(0, i, x)
            } else {
                // Jump to the first shift compatible with w[e] at e, then
                // search on from the surviving record.
                let (c, s1) = get(0, e - 1, w[e]);
                let k0 = 1 + c as usize;
                debug_assert!(k0 <= i);
                let (k2, t2) = get(s1, i - k0, x);
                (k0 as u32 + k2, t2)
            }
        }
        _ => {
            let ell = (31 - s.leading_zeros()) as usize;
            let (k1, t1) = get(s & !(1 << ell), i, x);
            if ell < k1 as usize {
                // The peeled position fell behind the window.
                (k1, t1)
            } else {
                let (k2, t2) = get(t1, ell - k1 as usize, w[ell]);
                (k1 + k2, t2)
            }
        }
    }
}

/// Iterate all `r`-element subsets of `{lo, .., hi-1}` in lexicographic
/// order of their sorted tuples (which is `≼` within one cardinality).
fn for_each_combination(lo: usize, hi: usize, r: usize, mut f: impl FnMut(PosSet)) {
    if r == 0 {
        f(0);
        return;
    }
    if hi - lo < r {
        return;
    }
    let mut idx: Vec<usize> = (lo..lo + r).collect();
    loop {
        let mask = idx.iter().fold(0, |acc, &b| acc | (1 << b));
        f(mask);
        let mut j = r as i32 - 1;
        while j >= 0 && idx[j as usize] >= hi - r + j as usize {
            j -= 1;
        }
        if j < 0 {
            return;
        }
        idx[j as usize] += 1;
        for k2 in j as usize + 1..r {
            idx[k2] = idx[k2 - 1] + 1;
        }
    }
}

/// All proper subsets of `{0..m-1}` in `≼` order.
fn for_each_state(m: usize, mut f: impl FnMut(PosSet)) {
    for l in 0..m {
        for_each_combination(0, m, l, &mut f);
    }
}

/// The full position lattice: dense shift/transition tables for every
/// proper subset of positions.
#[derive(Debug)]
pub struct PositionLattice {
    wlen: usize,
    asize: usize,
    border: usize,
    shift: Vec<u8>,
    trans: Vec<PosSet>,
    /// Number of entries computed during construction (equals the edge
    /// count of the lattice).
    pub entries_computed: u64,
}

/// Common read access shared by the full lattice and its sublattices.
pub trait LatticeView {
    fn wlen(&self) -> usize;
    fn asize(&self) -> usize;
    /// `(Sh_s(i,x), T_s(i,x))`; `i` must not belong to `s`.
    fn entry(&self, s: PosSet, i: usize, x: Symbol) -> (u32, PosSet);
    /// All states, in `≼` order.
    fn states(&self) -> Vec<PosSet>;

    fn num_states(&self) -> usize {
        self.states().len()
    }

    fn num_edges(&self) -> u64 {
        let (m, a) = (self.wlen(), self.asize());
        self.states()
            .iter()
            .map(|s| (m as u64 - s.count_ones() as u64) * a as u64)
            .sum()
    }
}

impl PositionLattice {
    #[inline]
    fn slot(&self, s: PosSet, i: usize, x: Symbol) -> usize {
        (s as usize * self.wlen + i) * self.asize + x as usize
    }
}

impl LatticeView for PositionLattice {
    fn wlen(&self) -> usize {
        self.wlen
    }

    fn asize(&self) -> usize {
        self.asize
    }

    #[inline]
    fn entry(&self, s: PosSet, i: usize, x: Symbol) -> (u32, PosSet) {
        debug_assert!(s & (1 << i) == 0);
        let slot = self.slot(s, i, x);
        (self.shift[slot] as u32, self.trans[slot])
    }

    fn states(&self) -> Vec<PosSet> {
        let mut out = Vec::with_capacity((1usize << self.wlen) - 1);
        for_each_state(self.wlen, |s| out.push(s));
        out
    }
}

pub fn build_lattice(
    pattern: &Pattern,
    num_symbols: usize,
) -> Result<PositionLattice, LatticeError> {
    build_lattice_with_cap(pattern, num_symbols, DEFAULT_LENGTH_CAP)
}

pub fn build_lattice_with_cap(
    pattern: &Pattern,
    num_symbols: usize,
    cap: usize,
) -> Result<PositionLattice, LatticeError> {
    let m = pattern.len();
    let a = num_symbols;
    let total = (1u64 << m) * m as u64 * a as u64;
    if m > cap || total > (1 << 31) {
        return Err(LatticeError::CapacityGuard { len: m, cap });
    }
    let prec = prec_table(pattern, a);
    let bord = border(pattern);
    let w = pattern.symbols();
    let slot = |s: PosSet, i: usize, x: Symbol| (s as usize * m + i) * a + x as usize;
    let mut shift = vec![0u8; total as usize];
    let mut trans = vec![0 as PosSet; total as usize];
    let mut entries_computed = 0u64;
    for_each_state(m, |s| {
        for i in 0..m {
            if s & (1 << i) != 0 {
                continue;
            }
            for x in 0..a as Symbol {
                let (k, t) = derive_entry(w, bord, &prec, s, i, x, &|s2, i2, x2| {
                    debug_assert!(order_lt(s2, s), "lookup must precede {s:b}");
                    let sl = slot(s2, i2, x2);
                    (shift[sl] as u32, trans[sl])
                });
                let sl = slot(s, i, x);
                shift[sl] = k as u8;
                trans[sl] = t;
                entries_computed += 1;
            }
        }
    });
    Ok(PositionLattice {
        wlen: m,
        asize: a,
        border: bord,
        shift,
        trans,
        entries_computed,
    })
}

impl PositionLattice {
    pub fn border(&self) -> usize {
        self.border
    }
}

/// A complete sublattice: a `≼`-ordered subset of states closed enough
/// that every state keeps at least one admissible position (one whose
/// transitions all stay inside).
#[derive(Debug)]
pub struct SubLattice {
    wlen: usize,
    asize: usize,
    /// Maximum rest size of member states.
    pub n: usize,
    states: Vec<PosSet>,
    index: HashMap<PosSet, u32>,
    shift: Vec<u8>,
    trans: Vec<PosSet>,
    /// `Tr(s)`: positions of `s̄` whose every transition stays in the
    /// sublattice. Indexed like `states`.
    admissible: Vec<Vec<u8>>,
}

impl LatticeView for SubLattice {
    fn wlen(&self) -> usize {
        self.wlen
    }

    fn asize(&self) -> usize {
        self.asize
    }

    #[inline]
    fn entry(&self, s: PosSet, i: usize, x: Symbol) -> (u32, PosSet) {
        let row = self.index[&s] as usize;
        let slot = (row * self.wlen + i) * self.asize + x as usize;
        (self.shift[slot] as u32, self.trans[slot])
    }

    fn states(&self) -> Vec<PosSet> {
        self.states.clone()
    }
}

impl SubLattice {
    pub fn contains(&self, s: PosSet) -> bool {
        self.index.contains_key(&s)
    }

    pub fn state_at(&self, idx: usize) -> PosSet {
        self.states[idx]
    }

    pub fn state_index(&self, s: PosSet) -> Option<usize> {
        self.index.get(&s).map(|&i| i as usize)
    }

    /// `Tr(s)` for the state at `idx`.
    pub fn admissible(&self, idx: usize) -> &[u8] {
        &self.admissible[idx]
    }

    pub fn is_complete(&self) -> bool {
        self.admissible.iter().all(|t| !t.is_empty())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Size of the rest of `s`: positions above the maximal leading run.
pub fn rest_size(s: PosSet) -> u32 {
    s.count_ones() - s.trailing_ones()
}

/// Member states of the n-sets sublattice (`rest(s) <= n`), in `≼` order.
fn enumerate_nsets(m: usize, n: usize, mut f: impl FnMut(PosSet)) {
    for l in 0..m {
        // Larger prefixes come first within a cardinality.
        for c in (l.saturating_sub(n)..=l).rev() {
            let rest = l - c;
            let prefix = full_set(c);
            if rest == 0 {
                f(prefix);
            } else {
                for_each_combination(c + 1, m, rest, |mask| f(prefix | mask));
            }
        }
    }
}

fn finish_sublattice(
    wlen: usize,
    asize: usize,
    n: usize,
    states: Vec<PosSet>,
    index: HashMap<PosSet, u32>,
    shift: Vec<u8>,
    trans: Vec<PosSet>,
) -> SubLattice {
    let mut sub = SubLattice {
        wlen,
        asize,
        n,
        states,
        index,
        shift,
        trans,
        admissible: Vec::new(),
    };
    let mut admissible = Vec::with_capacity(sub.states.len());
    for &s in &sub.states {
        let mut tr = Vec::new();
        for i in 0..wlen {
            if s & (1 << i) != 0 {
                continue;
            }
            let inside =
                (0..asize as Symbol).all(|x| sub.index.contains_key(&sub.entry(s, i, x).1));
            if inside {
                tr.push(i as u8);
            }
        }
        admissible.push(tr);
    }
    sub.admissible = admissible;
    sub
}

/// Restrict a built lattice to its n-sets sublattice: states whose rest
/// holds at most `n` positions.
pub fn n_sets_sublattice(lattice: &PositionLattice, n: usize) -> SubLattice {
    let (m, a) = (lattice.wlen, lattice.asize);
    let mut states = Vec::new();
    enumerate_nsets(m, n, |s| states.push(s));
    let index: HashMap<PosSet, u32> = states
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i as u32))
        .collect();
    let mut shift = vec![0u8; states.len() * m * a];
    let mut trans = vec![0; states.len() * m * a];
    for (row, &s) in states.iter().enumerate() {
        for i in 0..m {
            if s & (1 << i) != 0 {
                continue;
            }
            for x in 0..a as Symbol {
                let (k, t) = lattice.entry(s, i, x);
                let slot = (row * m + i) * a + x as usize;
                shift[slot] = k as u8;
                trans[slot] = t;
            }
        }
    }
    finish_sublattice(m, a, n, states, index, shift, trans)
}

/// Build the n-sets sublattice directly, without materializing the full
/// lattice: `O(|w|^{n+2})` entries instead of `Θ(|w|·2^|w|)`. Every row
/// the reductions consult is itself a member state, so the same
/// derivation applies.
pub fn build_sublattice(pattern: &Pattern, num_symbols: usize, n: usize) -> SubLattice {
    let m = pattern.len();
    let a = num_symbols;
    let prec = prec_table(pattern, a);
    let bord = border(pattern);
    let w = pattern.symbols();
    let mut states = Vec::new();
    enumerate_nsets(m, n, |s| states.push(s));
    let index: HashMap<PosSet, u32> = states
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, i as u32))
        .collect();
    let mut shift = vec![0u8; states.len() * m * a];
    let mut trans = vec![0; states.len() * m * a];
    for (row, &s) in states.iter().enumerate() {
        for i in 0..m {
            if s & (1 << i) != 0 {
                continue;
            }
            for x in 0..a as Symbol {
                let (k, t) = derive_entry(w, bord, &prec, s, i, x, &|s2, i2, x2| {
                    let r = index[&s2] as usize;
                    debug_assert!(r < row, "lookup must precede the current row");
                    let slot = (r * m + i2) * a + x2 as usize;
                    (shift[slot] as u32, trans[slot])
                });
                let slot = (row * m + i) * a + x as usize;
                shift[slot] = k as u8;
                trans[slot] = t;
            }
        }
    }
    finish_sublattice(m, a, n, states, index, shift, trans)
}

/// DOT rendering of a lattice or sublattice, one node per state labeled
/// by its set, one edge per `(i, x)` labeled `i,x|shift`.
pub fn to_dot(view: &impl LatticeView, alphabet: &Alphabet, name: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{name}\" {{");
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=oval];");
    let states = view.states();
    for &s in &states {
        let _ = writeln!(out, "  n{s} [label=\"{}\"];", set_to_string(s));
    }
    for &s in &states {
        for i in 0..view.wlen() {
            if s & (1 << i) != 0 {
                continue;
            }
            for x in 0..view.asize() as Symbol {
                let (k, t) = view.entry(s, i, x);
                let c = alphabet.byte(x) as char;
                let _ = writeln!(out, "  n{s} -> n{t} [label=\"{i},{c}|{k}\"];");
            }
        }
    }
    out.push_str("}\n");
    out
}
