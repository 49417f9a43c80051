//! The generic search loop with text-access instrumentation, the
//! brute-force occurrence oracle, and Monte-Carlo speed estimation.
//!
//! The loop starts at `(o, 0)` and runs while `p <= |t| - |w|`; each
//! iteration reads exactly one text position `p + α(q)`, reports `p`
//! when `q` is a pre-match state and the read symbol equals `w[α(q)]`,
//! then applies `(δ, σ)`. Machines of order `|w|` (TVSBS and friends)
//! read one position past the window at the last alignment; texts are
//! conceptually padded with a single sentinel symbol outside the
//! alphabet there, and such reads take the state's sentinel rule.

use thiserror::Error;

use crate::machine::{IidModel, MatchingMachine, Pattern, Symbol};
use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq)]
pub enum RunError {
    /// The machine looped over its state set without advancing the
    /// window or producing a report: the iteration guard
    /// `(|t|+1)·|Q|` fired. Signals an invalid machine (or a degenerate
    /// model that feeds one).
    #[error("no termination: {iterations} iterations without progress at position {position}")]
    NonTermination { iterations: u64, position: usize },
    /// The machine read the sentinel position `|t|` but defines no
    /// sentinel rule for the current state.
    #[error("state {state} read past the text without a sentinel rule")]
    SentinelUndefined { state: u32 },
    /// `α(q)` points beyond the sentinel position.
    #[error("state {state} reads {offset} positions ahead, beyond the padded text")]
    ReadOutOfBounds { state: u32, offset: u32 },
    #[error("monte-carlo requires text_length >= |w| and replicates >= 1")]
    BadParameters,
}

/// Instrumentation gathered from one run of the generic loop.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    /// Occurrence positions, sorted ascending.
    pub occurrences: Vec<usize>,
    /// Number of text reads (one per loop iteration).
    pub accesses: u64,
    /// Number of loop iterations.
    pub iterations: u64,
    /// `|t| / accesses`, or 0 when nothing was read.
    pub average_speed: f64,
}

impl RunReport {
    /// Assemble a report for a run of `accesses` reads over `text_len`
    /// symbols.
    pub(crate) fn from_run(occurrences: Vec<usize>, accesses: u64, text_len: usize) -> Self {
        Self::new(occurrences, accesses, text_len)
    }

    fn new(occurrences: Vec<usize>, accesses: u64, text_len: usize) -> Self {
        let average_speed = if accesses == 0 {
            0.0
        } else {
            text_len as f64 / accesses as f64
        };
        RunReport {
            occurrences,
            accesses,
            iterations: accesses,
            average_speed,
        }
    }
}

/// Run the generic algorithm, counting every text access.
pub fn generic_run(
    machine: &MatchingMachine,
    pattern: &Pattern,
    text: &[Symbol],
) -> Result<RunReport, RunError> {
    run_inner(machine, pattern, text, None)
}

/// Like [`generic_run`], also recording the exact sequence of text
/// positions accessed. Used by the trace-equivalence tests.
pub fn generic_run_trace(
    machine: &MatchingMachine,
    pattern: &Pattern,
    text: &[Symbol],
) -> Result<(RunReport, Vec<usize>), RunError> {
    let mut trace = Vec::new();
    let report = run_inner(machine, pattern, text, Some(&mut trace))?;
    Ok((report, trace))
}

fn run_inner(
    machine: &MatchingMachine,
    pattern: &Pattern,
    text: &[Symbol],
    mut trace: Option<&mut Vec<usize>>,
) -> Result<RunReport, RunError> {
    let wlen = pattern.len();
    let tlen = text.len();
    let mut occurrences = Vec::new();
    let mut accesses: u64 = 0;
    if tlen < wlen {
        return Ok(RunReport::new(occurrences, 0, tlen));
    }
    let guard = (tlen as u64 + 1) * machine.num_states() as u64;
    let last = tlen - wlen;
    let mut state = machine.init();
    let mut pos = 0usize;
    while pos <= last {
        accesses += 1;
        if accesses > guard {
            return Err(RunError::NonTermination {
                iterations: accesses,
                position: pos,
            });
        }
        let alpha = machine.next(state) as usize;
        let read_at = pos + alpha;
        if let Some(t) = trace.as_deref_mut() {
            t.push(read_at);
        }
        if read_at < tlen {
            let x = text[read_at];
            if machine.is_prematch(state) && x == pattern.at(alpha) {
                occurrences.push(pos);
            }
            let (next_state, shift) = (machine.trans(state, x), machine.shift(state, x));
            state = next_state;
            pos += shift as usize;
        } else if read_at == tlen {
            // Sentinel read: never matches, never reports.
            let (next_state, shift) = machine
                .sentinel(state)
                .ok_or(RunError::SentinelUndefined { state })?;
            state = next_state;
            pos += shift as usize;
        } else {
            return Err(RunError::ReadOutOfBounds {
                state,
                offset: alpha as u32,
            });
        }
    }
    Ok(RunReport::new(occurrences, accesses, tlen))
}

/// Ground-truth occurrence finder: direct comparison of every window.
pub fn oracle_search(pattern: &Pattern, text: &[Symbol]) -> Vec<usize> {
    let w = pattern.symbols();
    if text.len() < w.len() {
        return Vec::new();
    }
    (0..=text.len() - w.len())
        .filter(|&p| &text[p..p + w.len()] == w)
        .collect()
}

/// Mean and standard error of the average speed over iid replicate texts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub replicates: u32,
}

/// Draw a text of length `len` from the model.
pub fn sample_text(model: &IidModel, len: usize, rng: &mut SplitMix64) -> Vec<Symbol> {
    let probs = model.probs();
    let mut cum = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cum.push(acc);
    }
    let mut text = Vec::with_capacity(len);
    for _ in 0..len {
        let u = rng.next_f64();
        let sym = cum.partition_point(|&c| c <= u).min(probs.len() - 1);
        text.push(sym as Symbol);
    }
    text
}

/// Empirical estimator of the asymptotic speed: draws `replicates` iid
/// texts from the model, runs the machine on each, and aggregates the
/// per-run average speeds. Deterministic in `seed`; replicate `i` uses
/// the `i`-th fork of the seed stream, so results do not depend on
/// evaluation order.
pub fn monte_carlo_speed(
    machine: &MatchingMachine,
    pattern: &Pattern,
    model: &IidModel,
    text_length: usize,
    replicates: u32,
    seed: u64,
) -> Result<SpeedEstimate, RunError> {
    if text_length < pattern.len() || replicates == 0 {
        return Err(RunError::BadParameters);
    }
    let mut root = SplitMix64::new(seed);
    let mut speeds = Vec::with_capacity(replicates as usize);
    for _ in 0..replicates {
        let mut rng = root.fork();
        let text = sample_text(model, text_length, &mut rng);
        let report = generic_run(machine, pattern, &text)?;
        speeds.push(report.average_speed);
    }
    let n = speeds.len() as f64;
    let mean = speeds.iter().sum::<f64>() / n;
    let stderr = if speeds.len() < 2 {
        0.0
    } else {
        let var = speeds.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    };
    Ok(SpeedEstimate {
        mean,
        stderr,
        replicates,
    })
}
