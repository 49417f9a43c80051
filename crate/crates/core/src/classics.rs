//! Machine encodings and instrumented reference implementations of the
//! baseline pattern matching algorithms.
//!
//! Each machine-backed algorithm is certified by trace equivalence: on
//! any text, the generic loop driving the built machine reads exactly
//! the same positions, in the same order, as the instrumented reference
//! implementation. Access-order conventions pinned here:
//!
//! - `naive`: left-to-right scan per window, shift 1.
//! - `morris_pratt` / `kmp`: left-to-right with failure cascades; each
//!   cascade level re-reads the mismatched text position (one access
//!   per pattern comparison), which is why their speeds sit strictly
//!   below 1. KMP uses the strong failure table and skips straight to
//!   the next position when the cascade bottoms out.
//! - `quicksearch`: left-to-right scan, then one read past the window
//!   for the Sunday bad-character shift.
//! - `horspool`: anchor check at the window end, then right-to-left;
//!   the shift always keys on the anchor character.
//! - `tvsbs`: right-to-left scan; shift from a bad-two-character rule
//!   on the characters at distances `|w|-1` and `|w|` from the window.
//! - `fjs`: Sunday-style anchor filter plus KMP scanning (strong
//!   failure) once the anchor matches.
//! - `sma`: the string-matching automaton; reads every position once.
//! - `ebom` / `hash3`: instrumented only (factor-oracle and 3-gram
//!   hashing state spaces do not map onto small machines); `hash3`
//!   falls back to the naive scan for patterns shorter than 3.
//!
//! All scanners stop as soon as no full window remains (`p > |t|-|w|`),
//! mirroring the generic loop guard.

use thiserror::Error;

use crate::executor::RunReport;
use crate::machine::{Alphabet, MachineBuilder, MatchingMachine, Pattern, StateId, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgorithmId {
    Naive,
    MorrisPratt,
    Kmp,
    Quicksearch,
    Horspool,
    Tvsbs,
    Fjs,
    Ebom,
    Hash3,
    Sma,
}

impl AlgorithmId {
    pub const ALL: [AlgorithmId; 10] = [
        AlgorithmId::Naive,
        AlgorithmId::MorrisPratt,
        AlgorithmId::Kmp,
        AlgorithmId::Quicksearch,
        AlgorithmId::Horspool,
        AlgorithmId::Tvsbs,
        AlgorithmId::Fjs,
        AlgorithmId::Ebom,
        AlgorithmId::Hash3,
        AlgorithmId::Sma,
    ];

    /// Algorithms with a machine encoding.
    pub const MACHINE_BACKED: [AlgorithmId; 8] = [
        AlgorithmId::Naive,
        AlgorithmId::MorrisPratt,
        AlgorithmId::Kmp,
        AlgorithmId::Quicksearch,
        AlgorithmId::Horspool,
        AlgorithmId::Tvsbs,
        AlgorithmId::Fjs,
        AlgorithmId::Sma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::Naive => "naive",
            AlgorithmId::MorrisPratt => "morris_pratt",
            AlgorithmId::Kmp => "kmp",
            AlgorithmId::Quicksearch => "quicksearch",
            AlgorithmId::Horspool => "horspool",
            AlgorithmId::Tvsbs => "tvsbs",
            AlgorithmId::Fjs => "fjs",
            AlgorithmId::Ebom => "ebom",
            AlgorithmId::Hash3 => "hash3",
            AlgorithmId::Sma => "sma",
        }
    }

    pub fn from_name(name: &str) -> Option<AlgorithmId> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn has_machine(self) -> bool {
        !matches!(self, AlgorithmId::Ebom | AlgorithmId::Hash3)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassicsError {
    #[error("no machine encoding for {}", .0.name())]
    UnsupportedAlgorithm(AlgorithmId),
}

// ---------------------------------------------------------------------
// Shared preprocessing
// ---------------------------------------------------------------------

/// Weak failure table: `fail[j]` is the longest proper border of
/// `w[0..j]`, for `j` in `0..=m` (`fail[0]` unused).
fn weak_fail(w: &[Symbol]) -> Vec<usize> {
    let m = w.len();
    let mut fail = vec![0usize; m + 1];
    let mut k = 0;
    for i in 1..m {
        while k > 0 && w[i] != w[k] {
            k = fail[k];
        }
        if w[i] == w[k] {
            k += 1;
        }
        fail[i + 1] = k;
    }
    fail
}

/// Strong failure table: `next[j]` is the longest border of `w[0..j]`
/// whose following symbol differs from `w[j]`, or -1.
fn strong_fail(w: &[Symbol], fail: &[usize]) -> Vec<i32> {
    let m = w.len();
    let mut next = vec![-1i32; m];
    for j in 1..m {
        let f = fail[j];
        next[j] = if w[f] != w[j] { f as i32 } else { next[f] };
    }
    next
}

/// Automaton step: longest `k` such that `w[0..k]` is a suffix of
/// `w[0..j]` followed by `x`. Equals `j + 1` exactly when `x == w[j]`.
fn extend(w: &[Symbol], fail: &[usize], j: usize, x: Symbol) -> usize {
    let mut k = j;
    loop {
        if k < w.len() && w[k] == x {
            return k + 1;
        }
        if k == 0 {
            return 0;
        }
        k = fail[k];
    }
}

/// Sunday shift per symbol read at distance `m` from the window:
/// `m - rightmost index of the symbol`, or `m + 1` when absent.
fn sunday_delta(w: &[Symbol], asize: usize) -> Vec<u32> {
    let m = w.len();
    let mut d = vec![m as u32 + 1; asize];
    for (i, &c) in w.iter().enumerate() {
        d[c as usize] = (m - i) as u32;
    }
    d
}

/// Horspool shift keyed on the window's last character: distance from
/// the rightmost occurrence in `w[0..m-1]` to the end, or `m`.
fn horspool_shift(w: &[Symbol], asize: usize) -> Vec<u32> {
    let m = w.len();
    let mut d = vec![m as u32; asize];
    for i in 0..m.saturating_sub(1) {
        d[w[i] as usize] = (m - 1 - i) as u32;
    }
    d
}

/// Bad-two-character shift for the pair read at distances `m-1` and `m`:
/// smallest shift realigning the pair on the pattern. `b = None` is the
/// sentinel past the text end, which matches nothing.
fn brbc(w: &[Symbol], a: Symbol, b: Option<Symbol>) -> u32 {
    let m = w.len();
    for k in 1..m {
        if w[m - 1 - k] == a && Some(w[m - k]) == b {
            return k as u32;
        }
    }
    if b == Some(w[0]) {
        m as u32
    } else {
        m as u32 + 1
    }
}

// ---------------------------------------------------------------------
// Machine builders
// ---------------------------------------------------------------------

pub fn build_machine(
    algo: AlgorithmId,
    alphabet: &Alphabet,
    pattern: &Pattern,
) -> Result<MatchingMachine, ClassicsError> {
    let a = alphabet.len();
    let w = pattern.symbols();
    let m = match algo {
        AlgorithmId::Naive => naive_machine(a, w),
        AlgorithmId::MorrisPratt => mp_machine(a, w, false),
        AlgorithmId::Kmp => mp_machine(a, w, true),
        AlgorithmId::Quicksearch => quicksearch_machine(a, w),
        AlgorithmId::Horspool => horspool_machine(a, w),
        AlgorithmId::Tvsbs => tvsbs_machine(a, w),
        AlgorithmId::Fjs => fjs_machine(a, w),
        AlgorithmId::Sma => sma_machine(a, w),
        AlgorithmId::Ebom | AlgorithmId::Hash3 => {
            return Err(ClassicsError::UnsupportedAlgorithm(algo))
        }
    };
    Ok(crate::machine::prune_unreachable(&m))
}

/// State `k` = length of the matched window prefix; every mismatch
/// restarts the window one position over.
fn naive_machine(asize: usize, w: &[Symbol]) -> MatchingMachine {
    let m = w.len();
    let mut b = MachineBuilder::new(asize);
    let ids: Vec<StateId> = (0..m).map(|k| b.add_state(k as u32, k == m - 1)).collect();
    for k in 0..m {
        for x in 0..asize as Symbol {
            if k + 1 < m && x == w[k] {
                b.set_edge(ids[k], x, ids[k + 1], 0);
            } else {
                b.set_edge(ids[k], x, ids[0], 1);
            }
        }
    }
    b.finish(ids[0])
}

/// Morris-Pratt (weak failure) or KMP (strong failure). State `j` =
/// matched prefix length; a mismatch moves to the failure state with a
/// shift that keeps the read position fixed, re-reading it there.
fn mp_machine(asize: usize, w: &[Symbol], strong: bool) -> MatchingMachine {
    let m = w.len();
    let fail = weak_fail(w);
    let next = strong_fail(w, &fail);
    let mut b = MachineBuilder::new(asize);
    let ids: Vec<StateId> = (0..m).map(|j| b.add_state(j as u32, j == m - 1)).collect();
    let bord = fail[m];
    for j in 0..m {
        for x in 0..asize as Symbol {
            if x == w[j] {
                if j + 1 < m {
                    b.set_edge(ids[j], x, ids[j + 1], 0);
                } else {
                    // Full match: continue from the border, one position on.
                    b.set_edge(ids[j], x, ids[bord], (m - bord) as u32);
                }
            } else {
                let f = if strong {
                    next[j]
                } else if j == 0 {
                    -1
                } else {
                    fail[j] as i32
                };
                if f < 0 {
                    b.set_edge(ids[j], x, ids[0], j as u32 + 1);
                } else {
                    b.set_edge(ids[j], x, ids[f as usize], (j - f as usize) as u32);
                }
            }
        }
    }
    b.finish(ids[0])
}

/// The string-matching automaton: state = longest pattern prefix that
/// suffixes the text read so far. Each read advances the text pointer
/// by exactly one, so the speed is exactly 1 under any model.
fn sma_machine(asize: usize, w: &[Symbol]) -> MatchingMachine {
    let m = w.len();
    let fail = weak_fail(w);
    let bord = fail[m];
    let mut b = MachineBuilder::new(asize);
    let ids: Vec<StateId> = (0..m).map(|q| b.add_state(q as u32, q == m - 1)).collect();
    for q in 0..m {
        for x in 0..asize as Symbol {
            let e = extend(w, &fail, q, x);
            if e == m {
                b.set_edge(ids[q], x, ids[bord], (m - bord) as u32);
            } else {
                b.set_edge(ids[q], x, ids[e], (q + 1 - e) as u32);
            }
        }
    }
    b.finish(ids[0])
}

/// Left-to-right scan states plus one shift-lookup state of order `|w|`.
fn quicksearch_machine(asize: usize, w: &[Symbol]) -> MatchingMachine {
    let m = w.len();
    let delta = sunday_delta(w, asize);
    let mut b = MachineBuilder::new(asize);
    let scan: Vec<StateId> = (0..m).map(|k| b.add_state(k as u32, k == m - 1)).collect();
    let lookup = b.add_state(m as u32, false);
    for k in 0..m {
        for x in 0..asize as Symbol {
            if k + 1 < m && x == w[k] {
                b.set_edge(scan[k], x, scan[k + 1], 0);
            } else {
                b.set_edge(scan[k], x, lookup, 0);
            }
        }
    }
    for x in 0..asize as Symbol {
        b.set_edge(lookup, x, scan[0], delta[x as usize]);
    }
    b.set_sentinel(lookup, scan[0], m as u32 + 1);
    b.finish(scan[0])
}

/// Anchor check at the window end, then right-to-left; the shift is the
/// anchor character's, so inner states share one constant shift.
fn horspool_machine(asize: usize, w: &[Symbol]) -> MatchingMachine {
    let m = w.len();
    let shift = horspool_shift(w, asize);
    let anchor_shift = shift[w[m - 1] as usize];
    let mut b = MachineBuilder::new(asize);
    // State k = number of suffix characters matched so far.
    let ids: Vec<StateId> = (0..m)
        .map(|k| b.add_state((m - 1 - k) as u32, k == m - 1))
        .collect();
    for k in 0..m {
        for x in 0..asize as Symbol {
            if k == 0 {
                if m > 1 && x == w[m - 1] {
                    b.set_edge(ids[0], x, ids[1], 0);
                } else {
                    b.set_edge(ids[0], x, ids[0], shift[x as usize]);
                }
            } else if k + 1 < m && x == w[m - 1 - k] {
                b.set_edge(ids[k], x, ids[k + 1], 0);
            } else {
                b.set_edge(ids[k], x, ids[0], anchor_shift);
            }
        }
    }
    b.finish(ids[0])
}

/// Right-to-left scan; the shift state remembers the window's last
/// character and reads one past the window for the pair rule.
fn tvsbs_machine(asize: usize, w: &[Symbol]) -> MatchingMachine {
    let m = w.len();
    let mut b = MachineBuilder::new(asize);
    let scan: Vec<StateId> = (0..m)
        .map(|k| b.add_state((m - 1 - k) as u32, k == m - 1))
        .collect();
    let lookup: Vec<StateId> = (0..asize).map(|_| b.add_state(m as u32, false)).collect();
    for k in 0..m {
        for x in 0..asize as Symbol {
            if k == 0 {
                if m > 1 && x == w[m - 1] {
                    b.set_edge(scan[0], x, scan[1], 0);
                } else {
                    b.set_edge(scan[0], x, lookup[x as usize], 0);
                }
            } else if k + 1 < m && x == w[m - 1 - k] {
                b.set_edge(scan[k], x, scan[k + 1], 0);
            } else {
                b.set_edge(scan[k], x, lookup[w[m - 1] as usize], 0);
            }
        }
    }
    for (a, &id) in lookup.iter().enumerate() {
        for y in 0..asize as Symbol {
            b.set_edge(id, y, scan[0], brbc(w, a as Symbol, Some(y)));
        }
        b.set_sentinel(id, scan[0], brbc(w, a as Symbol, None));
    }
    b.finish(scan[0])
}

/// Sunday anchor filter plus KMP scanning. States: anchor check `A`,
/// shift lookup `B` (order `|w|`), verified scan `V_k` (anchor known,
/// reports at `k = |w|-2`), and plain KMP states `K_j`.
fn fjs_machine(asize: usize, w: &[Symbol]) -> MatchingMachine {
    let m = w.len();
    let fail = weak_fail(w);
    let next = strong_fail(w, &fail);
    let delta = sunday_delta(w, asize);
    let bord = fail[m];
    let mut b = MachineBuilder::new(asize);
    let anchor = b.add_state(m as u32 - 1, m == 1);
    let lookup = b.add_state(m as u32, false);
    let vscan: Vec<StateId> = (0..m.saturating_sub(1))
        .map(|k| b.add_state(k as u32, k + 2 == m))
        .collect();
    let kscan: Vec<StateId> = if m >= 2 {
        (0..m).map(|j| b.add_state(j as u32, j + 1 == m)).collect()
    } else {
        Vec::new()
    };
    let full_match = |b: &mut MachineBuilder, from: StateId, x: Symbol| {
        if bord == 0 {
            b.set_edge(from, x, anchor, m as u32);
        } else {
            b.set_edge(from, x, kscan[bord], (m - bord) as u32);
        }
    };
    let mismatch = |b: &mut MachineBuilder, from: StateId, j: usize, x: Symbol| {
        let f = next[j];
        if f < 0 {
            b.set_edge(from, x, anchor, j as u32 + 1);
        } else {
            b.set_edge(from, x, kscan[f as usize], (j - f as usize) as u32);
        }
    };
    for x in 0..asize as Symbol {
        if x == w[m - 1] {
            if m == 1 {
                full_match(&mut b, anchor, x);
            } else {
                b.set_edge(anchor, x, vscan[0], 0);
            }
        } else {
            b.set_edge(anchor, x, lookup, 0);
        }
        b.set_edge(lookup, x, anchor, delta[x as usize]);
    }
    b.set_sentinel(lookup, anchor, m as u32 + 1);
    for k in 0..m.saturating_sub(1) {
        for x in 0..asize as Symbol {
            if x == w[k] {
                if k + 2 < m {
                    b.set_edge(vscan[k], x, vscan[k + 1], 0);
                } else {
                    full_match(&mut b, vscan[k], x); // anchor was pre-verified
                }
            } else {
                mismatch(&mut b, vscan[k], k, x);
            }
        }
    }
    for j in 0..kscan.len() {
        for x in 0..asize as Symbol {
            if x == w[j] {
                if j + 1 < m {
                    b.set_edge(kscan[j], x, kscan[j + 1], 0);
                } else {
                    full_match(&mut b, kscan[j], x);
                }
            } else {
                mismatch(&mut b, kscan[j], j, x);
            }
        }
    }
    b.finish(anchor)
}

// ---------------------------------------------------------------------
// Instrumented reference implementations
// ---------------------------------------------------------------------

/// Text reader counting every access; `read` past the end returns the
/// sentinel (`None`), which matches no symbol.
struct Tape<'a> {
    text: &'a [Symbol],
    accesses: u64,
    trace: Option<&'a mut Vec<usize>>,
}

impl<'a> Tape<'a> {
    fn read(&mut self, i: usize) -> Option<Symbol> {
        debug_assert!(i <= self.text.len());
        self.accesses += 1;
        if let Some(t) = self.trace.as_deref_mut() {
            t.push(i);
        }
        self.text.get(i).copied()
    }
}

/// Run the textbook implementation of `algo`, counting text accesses.
pub fn instrumented_search(
    algo: AlgorithmId,
    pattern: &Pattern,
    text: &[Symbol],
    alphabet_size: usize,
) -> RunReport {
    run_instrumented(algo, pattern, text, alphabet_size, None)
}

/// Like [`instrumented_search`], also recording the access sequence.
pub fn instrumented_trace(
    algo: AlgorithmId,
    pattern: &Pattern,
    text: &[Symbol],
    alphabet_size: usize,
) -> (RunReport, Vec<usize>) {
    let mut trace = Vec::new();
    let report = run_instrumented(algo, pattern, text, alphabet_size, Some(&mut trace));
    (report, trace)
}

fn run_instrumented(
    algo: AlgorithmId,
    pattern: &Pattern,
    text: &[Symbol],
    alphabet_size: usize,
    trace: Option<&mut Vec<usize>>,
) -> RunReport {
    let w = pattern.symbols();
    let mut occ = Vec::new();
    let mut tape = Tape {
        text,
        accesses: 0,
        trace,
    };
    if text.len() >= w.len() {
        let n = text.len();
        match algo {
            AlgorithmId::Naive => naive_search(w, n, &mut tape, &mut occ),
            AlgorithmId::MorrisPratt => mp_search(w, n, &mut tape, &mut occ, false),
            AlgorithmId::Kmp => mp_search(w, n, &mut tape, &mut occ, true),
            AlgorithmId::Quicksearch => qs_search(w, n, alphabet_size, &mut tape, &mut occ),
            AlgorithmId::Horspool => horspool_search(w, n, alphabet_size, &mut tape, &mut occ),
            AlgorithmId::Tvsbs => tvsbs_search(w, n, &mut tape, &mut occ),
            AlgorithmId::Fjs => fjs_search(w, n, alphabet_size, &mut tape, &mut occ),
            AlgorithmId::Sma => sma_search(w, n, &mut tape, &mut occ),
            AlgorithmId::Ebom => ebom_search(w, n, alphabet_size, &mut tape, &mut occ),
            AlgorithmId::Hash3 => hash3_search(w, n, &mut tape, &mut occ),
        }
    }
    RunReport::from_run(occ, tape.accesses, text.len())
}

fn naive_search(w: &[Symbol], n: usize, tape: &mut Tape, occ: &mut Vec<usize>) {
    let m = w.len();
    for p in 0..=n - m {
        let mut k = 0;
        while k < m && tape.read(p + k) == Some(w[k]) {
            k += 1;
        }
        if k == m {
            occ.push(p);
        }
    }
}

fn mp_search(w: &[Symbol], n: usize, tape: &mut Tape, occ: &mut Vec<usize>, strong: bool) {
    let m = w.len();
    let fail = weak_fail(w);
    let next = strong_fail(w, &fail);
    let (mut i, mut j) = (0usize, 0usize);
    while i - j <= n - m {
        let x = tape.read(i);
        if x == Some(w[j]) {
            i += 1;
            j += 1;
            if j == m {
                occ.push(i - m);
                j = fail[m];
            }
        } else {
            let f = if strong {
                next[j]
            } else if j == 0 {
                -1
            } else {
                fail[j] as i32
            };
            if f < 0 {
                i += 1;
                j = 0;
            } else {
                j = f as usize; // next pass re-reads t[i]
            }
        }
    }
}

fn sma_search(w: &[Symbol], n: usize, tape: &mut Tape, occ: &mut Vec<usize>) {
    let m = w.len();
    let fail = weak_fail(w);
    let (mut i, mut q) = (0usize, 0usize);
    while i - q <= n - m {
        let x = tape.read(i);
        i += 1;
        q = match x {
            Some(x) => extend(w, &fail, q, x),
            None => 0,
        };
        if q == m {
            occ.push(i - m);
            q = fail[m];
        }
    }
}

fn qs_search(w: &[Symbol], n: usize, asize: usize, tape: &mut Tape, occ: &mut Vec<usize>) {
    let m = w.len();
    let delta = sunday_delta(w, asize);
    let mut p = 0usize;
    while p <= n - m {
        let mut k = 0;
        while k < m && tape.read(p + k) == Some(w[k]) {
            k += 1;
        }
        if k == m {
            occ.push(p);
        }
        p += match tape.read(p + m) {
            Some(y) => delta[y as usize] as usize,
            None => m + 1,
        };
    }
}

fn horspool_search(w: &[Symbol], n: usize, asize: usize, tape: &mut Tape, occ: &mut Vec<usize>) {
    let m = w.len();
    let shift = horspool_shift(w, asize);
    let mut p = 0usize;
    while p <= n - m {
        let a = tape.read(p + m - 1).expect("inside the text");
        if a == w[m - 1] {
            let mut k = 1;
            while k < m && tape.read(p + m - 1 - k) == Some(w[m - 1 - k]) {
                k += 1;
            }
            if k == m {
                occ.push(p);
            }
        }
        p += shift[a as usize] as usize;
    }
}

fn tvsbs_search(w: &[Symbol], n: usize, tape: &mut Tape, occ: &mut Vec<usize>) {
    let m = w.len();
    let mut p = 0usize;
    while p <= n - m {
        let a = tape.read(p + m - 1).expect("inside the text");
        if a == w[m - 1] {
            let mut k = 1;
            while k < m && tape.read(p + m - 1 - k) == Some(w[m - 1 - k]) {
                k += 1;
            }
            if k == m {
                occ.push(p);
            }
        }
        let b = tape.read(p + m);
        p += brbc(w, a, b) as usize;
    }
}

fn fjs_search(w: &[Symbol], n: usize, asize: usize, tape: &mut Tape, occ: &mut Vec<usize>) {
    let m = w.len();
    let fail = weak_fail(w);
    let next = strong_fail(w, &fail);
    let delta = sunday_delta(w, asize);
    let bord = fail[m];
    let mut p = 0usize;
    'outer: while p <= n - m {
        // Sunday phase: anchor check, bad-character shift on failure.
        let a = tape.read(p + m - 1).expect("inside the text");
        if a != w[m - 1] {
            p += match tape.read(p + m) {
                Some(y) => delta[y as usize] as usize,
                None => m + 1,
            };
            continue;
        }
        if m == 1 {
            occ.push(p);
            p += 1;
            continue;
        }
        // KMP phase; the anchor of this first window is already known.
        let mut j = 0usize;
        let mut verified = true;
        loop {
            if p > n - m {
                break 'outer;
            }
            let limit = if verified { m - 1 } else { m };
            let x = tape.read(p + j);
            if x == Some(w[j]) {
                j += 1;
                if j == limit {
                    occ.push(p);
                    p += m - bord;
                    if bord == 0 {
                        continue 'outer;
                    }
                    j = bord;
                    verified = false;
                }
            } else {
                let f = next[j];
                if f < 0 {
                    p += j + 1;
                    continue 'outer;
                }
                p += j - f as usize; // same text position re-read at level f
                j = f as usize;
                verified = false;
            }
        }
    }
}

/// Factor oracle of the reversed pattern: transition tables over states
/// `0..=m`, built with the standard supply-function construction.
struct FactorOracle {
    trans: Vec<i32>, // [state * asize + symbol], -1 = dead
    asize: usize,
}

impl FactorOracle {
    fn of_reversed(w: &[Symbol], asize: usize) -> FactorOracle {
        let m = w.len();
        let u: Vec<Symbol> = w.iter().rev().copied().collect();
        let mut trans = vec![-1i32; (m + 1) * asize];
        let mut supply = vec![-1i32; m + 1];
        for i in 1..=m {
            let x = u[i - 1];
            trans[(i - 1) * asize + x as usize] = i as i32;
            let mut k = supply[i - 1];
            while k >= 0 && trans[k as usize * asize + x as usize] < 0 {
                trans[k as usize * asize + x as usize] = i as i32;
                k = supply[k as usize];
            }
            supply[i] = if k < 0 {
                0
            } else {
                trans[k as usize * asize + x as usize]
            };
        }
        FactorOracle { trans, asize }
    }

    fn step(&self, q: i32, x: Symbol) -> i32 {
        if q < 0 {
            -1
        } else {
            self.trans[q as usize * self.asize + x as usize]
        }
    }
}

/// Backward oracle matching with a two-character entry table: the two
/// window-final characters feed the oracle together; death there shifts
/// by `m-1`, death at relative position `k` shifts past it, and a full
/// surviving window is an occurrence (shifted by the pattern period).
fn ebom_search(w: &[Symbol], n: usize, asize: usize, tape: &mut Tape, occ: &mut Vec<usize>) {
    let m = w.len();
    if m == 1 {
        for p in 0..n {
            if tape.read(p) == Some(w[0]) {
                occ.push(p);
            }
        }
        return;
    }
    let oracle = FactorOracle::of_reversed(w, asize);
    let fail = weak_fail(w);
    let period = m - fail[m];
    let mut p = 0usize;
    'outer: while p <= n - m {
        let a = tape.read(p + m - 1).expect("inside the text");
        let b = tape.read(p + m - 2).expect("inside the text");
        let q = oracle.step(oracle.step(0, a), b);
        if q < 0 {
            p += m - 1;
            continue;
        }
        let mut q = q;
        for k in (0..m - 2).rev() {
            let x = tape.read(p + k).expect("inside the text");
            q = oracle.step(q, x);
            if q < 0 {
                p += k + 1;
                continue 'outer;
            }
        }
        occ.push(p); // a length-m word surviving the oracle is the pattern
        p += period;
    }
}

/// Boyer-Moore on 3-gram hashes. Collisions only shorten shifts, so the
/// scheme stays safe; candidate windows are verified left to right
/// (re-reading the gram positions). Patterns shorter than 3 fall back
/// to the naive scan.
fn hash3_search(w: &[Symbol], n: usize, tape: &mut Tape, occ: &mut Vec<usize>) {
    let m = w.len();
    if m < 3 {
        naive_search(w, n, tape, occ);
        return;
    }
    let hash = |a: Symbol, b: Symbol, c: Symbol| -> usize {
        ((a as usize) << 5 ^ (b as usize) << 3 ^ c as usize) & 0xFF
    };
    let mut table = vec![(m - 2) as u32; 256];
    for i in 2..m - 1 {
        table[hash(w[i - 2], w[i - 1], w[i])] = (m - 1 - i) as u32;
    }
    let end_hash = hash(w[m - 3], w[m - 2], w[m - 1]);
    let sh1 = table[end_hash].max(1);
    table[end_hash] = 0;
    let mut p = 0usize;
    while p <= n - m {
        let c0 = tape.read(p + m - 3).expect("inside the text");
        let c1 = tape.read(p + m - 2).expect("inside the text");
        let c2 = tape.read(p + m - 1).expect("inside the text");
        let sh = table[hash(c0, c1, c2)];
        if sh == 0 {
            let mut k = 0;
            while k < m && tape.read(p + k) == Some(w[k]) {
                k += 1;
            }
            if k == m {
                occ.push(p);
            }
            p += sh1 as usize;
        } else {
            p += sh as usize;
        }
    }
}
