//! C ABI for the matchspeed library.
//!
//! The unit of work is an opaque searcher handle bundling an alphabet,
//! a pattern and a matching machine. Constructors build handles from a
//! named classic algorithm, from the brute-force fastest strategy, from
//! the K-heuristic, or from a machine file in the canonical JSON
//! format. Every fallible call returns an [`MsStatus`]; results travel
//! through out-parameters.
//!
//! Conventions: patterns, alphabets and texts are raw byte buffers.
//! When an explicit alphabet is not given, it is the sorted set of
//! distinct pattern bytes. Model probabilities are arrays with one
//! entry per alphabet symbol, in alphabet order (null means uniform).
//! Strings returned by the library are freed with [`ms_string_free`],
//! handles with [`ms_searcher_free`].

use std::ffi::{c_char, CStr, CString};

use matchspeed::classics::{build_machine, AlgorithmId, ClassicsError};
use matchspeed::executor::{generic_run, monte_carlo_speed, RunError};
use matchspeed::expansion::ExpandError;
use matchspeed::format;
use matchspeed::lattice::LatticeError;
use matchspeed::machine::{Alphabet, DomainError, IidModel, MatchingMachine, Pattern};
use matchspeed::markov::{asymptotic_speed, SpeedError};
use matchspeed::strategy::{fastest_strategy, k_heuristic, FastestOptions, StrategyError};

/// Status codes; nonzero values match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    /// Internal error (invalid machine, singular system, IO, ...).
    Error = 1,
    /// Unparseable pattern, model, algorithm name or machine document.
    Parse = 2,
    /// Full-memory expansion exceeded its state cap.
    Explosion = 3,
    /// Pattern too long for the brute-force search (pass force).
    PatternTooLong = 4,
    /// A byte fell outside the declared alphabet.
    AlphabetMismatch = 5,
    /// Pattern too long for the dense position lattice.
    Capacity = 6,
    /// A required pointer argument was null.
    NullArgument = 7,
}

/// Opaque searcher: alphabet + pattern + matching machine.
pub struct MsSearcher {
    alphabet: Alphabet,
    pattern: Pattern,
    machine: MatchingMachine,
}

/// Instrumentation from one search.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MsRunStats {
    /// Number of occurrences found.
    pub occurrences: u64,
    /// Number of text reads performed.
    pub accesses: u64,
    /// Text length divided by accesses (0 when nothing was read).
    pub average_speed: f64,
}

/// Mean and standard error of a Monte-Carlo speed estimate.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct MsSpeedEstimate {
    pub mean: f64,
    /// Standard error of the mean.
    pub std_error: f64,
}

trait IntoStatus {
    fn status(&self) -> MsStatus;
}

impl IntoStatus for DomainError {
    fn status(&self) -> MsStatus {
        match self {
            DomainError::SymbolNotInAlphabet(_) => MsStatus::AlphabetMismatch,
            _ => MsStatus::Parse,
        }
    }
}

impl IntoStatus for StrategyError {
    fn status(&self) -> MsStatus {
        match self {
            StrategyError::PatternTooLong { .. } => MsStatus::PatternTooLong,
            StrategyError::Lattice(LatticeError::CapacityGuard { .. }) => MsStatus::Capacity,
            StrategyError::Speed(SpeedError::Expand(ExpandError::ExplosionGuard { .. })) => {
                MsStatus::Explosion
            }
            _ => MsStatus::Error,
        }
    }
}

impl IntoStatus for SpeedError {
    fn status(&self) -> MsStatus {
        match self {
            SpeedError::Expand(ExpandError::ExplosionGuard { .. }) => MsStatus::Explosion,
            _ => MsStatus::Error,
        }
    }
}

impl IntoStatus for RunError {
    fn status(&self) -> MsStatus {
        match self {
            RunError::BadParameters => MsStatus::Parse,
            _ => MsStatus::Error,
        }
    }
}

impl IntoStatus for ClassicsError {
    fn status(&self) -> MsStatus {
        MsStatus::Parse
    }
}

unsafe fn slice_arg<'a>(ptr: *const u8, len: usize) -> Option<&'a [u8]> {
    if ptr.is_null() && len > 0 {
        None
    } else if len == 0 {
        Some(&[])
    } else {
        Some(unsafe { std::slice::from_raw_parts(ptr, len) })
    }
}

/// Alphabet from an explicit byte set, or from the pattern's bytes.
fn resolve_alphabet(pattern: &[u8], alphabet: &[u8]) -> Result<Alphabet, MsStatus> {
    let source: Vec<u8> = if alphabet.is_empty() {
        pattern.to_vec()
    } else {
        let mut all = alphabet.to_vec();
        all.extend_from_slice(pattern);
        all
    };
    Alphabet::from_text(&source).map_err(|e| e.status())
}

unsafe fn resolve_model(alphabet: &Alphabet, probs: *const f64) -> Result<IidModel, MsStatus> {
    if probs.is_null() {
        Ok(IidModel::uniform(alphabet.len()))
    } else {
        let slice = unsafe { std::slice::from_raw_parts(probs, alphabet.len()) };
        IidModel::new(slice.to_vec()).map_err(|e| e.status())
    }
}

unsafe fn deliver(out: *mut *mut MsSearcher, searcher: MsSearcher) -> MsStatus {
    if out.is_null() {
        return MsStatus::NullArgument;
    }
    unsafe { *out = Box::into_raw(Box::new(searcher)) };
    MsStatus::Ok
}

/// Build a searcher for a named classic algorithm (`naive`,
/// `morris_pratt`, `kmp`, `quicksearch`, `horspool`, `tvsbs`, `fjs`,
/// `sma`). `alphabet`/`alphabet_len` may be null/0 to infer the
/// alphabet from the pattern.
///
/// # Safety
/// `algorithm` must be a valid C string; buffer pointers must cover
/// their stated lengths; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_from_algorithm(
    algorithm: *const c_char,
    pattern: *const u8,
    pattern_len: usize,
    alphabet: *const u8,
    alphabet_len: usize,
    out: *mut *mut MsSearcher,
) -> MsStatus {
    if algorithm.is_null() {
        return MsStatus::NullArgument;
    }
    let Ok(name) = unsafe { CStr::from_ptr(algorithm) }.to_str() else {
        return MsStatus::Parse;
    };
    let Some(algo) = AlgorithmId::from_name(name) else {
        return MsStatus::Parse;
    };
    let (Some(pat), Some(alpha)) = (unsafe { slice_arg(pattern, pattern_len) }, unsafe {
        slice_arg(alphabet, alphabet_len)
    }) else {
        return MsStatus::NullArgument;
    };
    let alphabet = match resolve_alphabet(pat, alpha) {
        Ok(a) => a,
        Err(s) => return s,
    };
    let pattern = match Pattern::from_bytes(&alphabet, pat) {
        Ok(p) => p,
        Err(e) => return e.status(),
    };
    let machine = match build_machine(algo, &alphabet, &pattern) {
        Ok(m) => m,
        Err(e) => return e.status(),
    };
    unsafe {
        deliver(
            out,
            MsSearcher {
                alphabet,
                pattern,
                machine,
            },
        )
    }
}

/// Build the brute-force fastest strategy for the pattern under an iid
/// model (`probs` has one entry per alphabet symbol, null = uniform).
/// Patterns longer than 4 are rejected unless `force` is nonzero.
///
/// # Safety
/// Buffer pointers must cover their stated lengths; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_fastest(
    pattern: *const u8,
    pattern_len: usize,
    alphabet: *const u8,
    alphabet_len: usize,
    probs: *const f64,
    force: i32,
    out: *mut *mut MsSearcher,
) -> MsStatus {
    let (Some(pat), Some(alpha)) = (unsafe { slice_arg(pattern, pattern_len) }, unsafe {
        slice_arg(alphabet, alphabet_len)
    }) else {
        return MsStatus::NullArgument;
    };
    let alphabet = match resolve_alphabet(pat, alpha) {
        Ok(a) => a,
        Err(s) => return s,
    };
    let pattern = match Pattern::from_bytes(&alphabet, pat) {
        Ok(p) => p,
        Err(e) => return e.status(),
    };
    let model = match unsafe { resolve_model(&alphabet, probs) } {
        Ok(m) => m,
        Err(s) => return s,
    };
    let opts = FastestOptions {
        force: force != 0,
        use_bound: false,
    };
    let (strategy, _) = match fastest_strategy(&pattern, alphabet.len(), &model, opts) {
        Ok(r) => r,
        Err(e) => return e.status(),
    };
    unsafe {
        deliver(
            out,
            MsSearcher {
                alphabet,
                pattern,
                machine: strategy.machine,
            },
        )
    }
}

/// Build a K-heuristic strategy (`order >= 1`).
///
/// # Safety
/// Buffer pointers must cover their stated lengths; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_heuristic(
    pattern: *const u8,
    pattern_len: usize,
    alphabet: *const u8,
    alphabet_len: usize,
    probs: *const f64,
    order: usize,
    out: *mut *mut MsSearcher,
) -> MsStatus {
    if order == 0 {
        return MsStatus::Parse;
    }
    let (Some(pat), Some(alpha)) = (unsafe { slice_arg(pattern, pattern_len) }, unsafe {
        slice_arg(alphabet, alphabet_len)
    }) else {
        return MsStatus::NullArgument;
    };
    let alphabet = match resolve_alphabet(pat, alpha) {
        Ok(a) => a,
        Err(s) => return s,
    };
    let pattern = match Pattern::from_bytes(&alphabet, pat) {
        Ok(p) => p,
        Err(e) => return e.status(),
    };
    let model = match unsafe { resolve_model(&alphabet, probs) } {
        Ok(m) => m,
        Err(s) => return s,
    };
    let (strategy, _) = match k_heuristic(&pattern, alphabet.len(), &model, order, None) {
        Ok(r) => r,
        Err(e) => return e.status(),
    };
    unsafe {
        deliver(
            out,
            MsSearcher {
                alphabet,
                pattern,
                machine: strategy.machine,
            },
        )
    }
}

/// Load a searcher from a machine document in the canonical JSON
/// format.
///
/// # Safety
/// `json` must be a valid C string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_from_json(
    json: *const c_char,
    out: *mut *mut MsSearcher,
) -> MsStatus {
    if json.is_null() {
        return MsStatus::NullArgument;
    }
    let Ok(text) = unsafe { CStr::from_ptr(json) }.to_str() else {
        return MsStatus::Parse;
    };
    let doc = match format::from_json(text) {
        Ok(d) => d,
        Err(_) => return MsStatus::Parse,
    };
    let (alphabet, pattern, machine) = match format::from_document(&doc) {
        Ok(t) => t,
        Err(_) => return MsStatus::Parse,
    };
    unsafe {
        deliver(
            out,
            MsSearcher {
                alphabet,
                pattern,
                machine,
            },
        )
    }
}

/// Serialize the searcher's machine to the canonical JSON format. The
/// returned string is owned by the caller (free with
/// [`ms_string_free`]); null on null input.
///
/// # Safety
/// `searcher` must be a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_to_json(searcher: *const MsSearcher) -> *mut c_char {
    let Some(s) = (unsafe { searcher.as_ref() }) else {
        return std::ptr::null_mut();
    };
    let doc = format::to_document(&s.alphabet, &s.pattern, &s.machine);
    CString::new(format::to_json(&doc))
        .map(|c| c.into_raw())
        .unwrap_or(std::ptr::null_mut())
}

/// Number of machine states (including the sink).
///
/// # Safety
/// `searcher` must be a live handle; null yields 0.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_state_count(searcher: *const MsSearcher) -> usize {
    unsafe { searcher.as_ref() }.map_or(0, |s| s.machine.num_states())
}

/// Machine order: the furthest window offset any state reads.
///
/// # Safety
/// `searcher` must be a live handle; null yields 0.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_order(searcher: *const MsSearcher) -> u32 {
    unsafe { searcher.as_ref() }.map_or(0, |s| s.machine.order())
}

/// Alphabet size of the searcher.
///
/// # Safety
/// `searcher` must be a live handle; null yields 0.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_alphabet_size(searcher: *const MsSearcher) -> usize {
    unsafe { searcher.as_ref() }.map_or(0, |s| s.alphabet.len())
}

/// Copy the alphabet bytes (in symbol order, the order model
/// probability arrays use) into `buf`, up to `capacity`. Returns the
/// alphabet size regardless of how much was copied.
///
/// # Safety
/// `buf` must point to at least `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_alphabet(
    searcher: *const MsSearcher,
    buf: *mut u8,
    capacity: usize,
) -> usize {
    let Some(s) = (unsafe { searcher.as_ref() }) else {
        return 0;
    };
    let bytes = s.alphabet.bytes();
    if !buf.is_null() {
        let n = bytes.len().min(capacity);
        unsafe { std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf, n) };
    }
    bytes.len()
}

/// Exact asymptotic speed of the searcher under an iid model (null
/// `probs` = uniform).
///
/// # Safety
/// `probs` must be null or hold one entry per alphabet symbol;
/// `out_speed` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_asymptotic_speed(
    searcher: *const MsSearcher,
    probs: *const f64,
    out_speed: *mut f64,
) -> MsStatus {
    let Some(s) = (unsafe { searcher.as_ref() }) else {
        return MsStatus::NullArgument;
    };
    if out_speed.is_null() {
        return MsStatus::NullArgument;
    }
    let model = match unsafe { resolve_model(&s.alphabet, probs) } {
        Ok(m) => m,
        Err(st) => return st,
    };
    match asymptotic_speed(&s.machine, &model) {
        Ok(report) => {
            unsafe { *out_speed = report.speed };
            MsStatus::Ok
        }
        Err(e) => e.status(),
    }
}

/// Monte-Carlo speed estimate over `replicates` iid texts of
/// `text_length` symbols; deterministic in `seed`.
///
/// # Safety
/// `probs` must be null or hold one entry per alphabet symbol; `out`
/// must be valid.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_monte_carlo_speed(
    searcher: *const MsSearcher,
    probs: *const f64,
    text_length: usize,
    replicates: u32,
    seed: u64,
    out: *mut MsSpeedEstimate,
) -> MsStatus {
    let Some(s) = (unsafe { searcher.as_ref() }) else {
        return MsStatus::NullArgument;
    };
    if out.is_null() {
        return MsStatus::NullArgument;
    }
    let model = match unsafe { resolve_model(&s.alphabet, probs) } {
        Ok(m) => m,
        Err(st) => return st,
    };
    match monte_carlo_speed(
        &s.machine,
        &s.pattern,
        &model,
        text_length,
        replicates,
        seed,
    ) {
        Ok(est) => {
            unsafe {
                *out = MsSpeedEstimate {
                    mean: est.mean,
                    std_error: est.stderr,
                }
            };
            MsStatus::Ok
        }
        Err(e) => e.status(),
    }
}

/// Search a text, optionally collecting occurrence positions into
/// `positions` (up to `capacity`; `stats.occurrences` reports the full
/// count either way). Text bytes must belong to the alphabet.
///
/// # Safety
/// `text` must cover `text_len` bytes; `positions` must be null or
/// cover `capacity` entries; `stats` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_search(
    searcher: *const MsSearcher,
    text: *const u8,
    text_len: usize,
    positions: *mut usize,
    capacity: usize,
    stats: *mut MsRunStats,
) -> MsStatus {
    let Some(s) = (unsafe { searcher.as_ref() }) else {
        return MsStatus::NullArgument;
    };
    let (Some(raw), false) = (unsafe { slice_arg(text, text_len) }, stats.is_null()) else {
        return MsStatus::NullArgument;
    };
    let encoded = match s.alphabet.encode(raw) {
        Ok(t) => t,
        Err(e) => return e.status(),
    };
    let report = match generic_run(&s.machine, &s.pattern, &encoded) {
        Ok(r) => r,
        Err(e) => return e.status(),
    };
    if !positions.is_null() {
        let n = report.occurrences.len().min(capacity);
        let dst = unsafe { std::slice::from_raw_parts_mut(positions, n) };
        dst.copy_from_slice(&report.occurrences[..n]);
    }
    unsafe {
        *stats = MsRunStats {
            occurrences: report.occurrences.len() as u64,
            accesses: report.accesses,
            average_speed: report.average_speed,
        }
    };
    MsStatus::Ok
}

/// Free a searcher handle (null is fine).
///
/// # Safety
/// `searcher` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ms_searcher_free(searcher: *mut MsSearcher) {
    if !searcher.is_null() {
        drop(unsafe { Box::from_raw(searcher) });
    }
}

/// Free a string returned by this library (null is fine).
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ms_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
