//! Exercises the C ABI from Rust the way a foreign caller would.

use std::ffi::{CStr, CString};

use matchspeed_ffi::*;

fn make(algo: &str, pattern: &[u8]) -> *mut MsSearcher {
    let name = CString::new(algo).unwrap();
    let mut out: *mut MsSearcher = std::ptr::null_mut();
    let status = unsafe {
        ms_searcher_from_algorithm(
            name.as_ptr(),
            pattern.as_ptr(),
            pattern.len(),
            std::ptr::null(),
            0,
            &mut out,
        )
    };
    assert_eq!(status, MsStatus::Ok);
    assert!(!out.is_null());
    out
}

#[test]
fn search_reports_occurrences_and_accesses() {
    let s = make("horspool", b"abb");
    let text = b"ababbababbxabb";
    let mut positions = [0usize; 8];
    let mut stats = MsRunStats {
        occurrences: 0,
        accesses: 0,
        average_speed: 0.0,
    };
    // 'x' is outside the alphabet inferred from the pattern.
    let status = unsafe {
        ms_searcher_search(
            s,
            text.as_ptr(),
            text.len(),
            positions.as_mut_ptr(),
            8,
            &mut stats,
        )
    };
    assert_eq!(status, MsStatus::AlphabetMismatch);

    let text = b"ababbababb";
    let status = unsafe {
        ms_searcher_search(
            s,
            text.as_ptr(),
            text.len(),
            positions.as_mut_ptr(),
            8,
            &mut stats,
        )
    };
    assert_eq!(status, MsStatus::Ok);
    assert_eq!(stats.occurrences, 2);
    assert_eq!(&positions[..2], &[2, 7]);
    assert!(stats.accesses > 0);
    unsafe { ms_searcher_free(s) };
}

#[test]
fn asymptotic_speed_matches_known_value() {
    let s = make("naive", b"ab");
    let mut speed = 0.0;
    let status = unsafe { ms_searcher_asymptotic_speed(s, std::ptr::null(), &mut speed) };
    assert_eq!(status, MsStatus::Ok);
    assert!((speed - 2.0 / 3.0).abs() < 1e-9);

    let mut est = MsSpeedEstimate {
        mean: 0.0,
        std_error: 0.0,
    };
    let status =
        unsafe { ms_searcher_monte_carlo_speed(s, std::ptr::null(), 100_000, 4, 9, &mut est) };
    assert_eq!(status, MsStatus::Ok);
    assert!((est.mean - speed).abs() < (4.0 * est.std_error).max(0.01));
    unsafe { ms_searcher_free(s) };
}

#[test]
fn fastest_handle_and_json_round_trip() {
    let pattern = b"abb";
    let alphabet = b"ab";
    let mut out: *mut MsSearcher = std::ptr::null_mut();
    let status = unsafe {
        ms_searcher_fastest(
            pattern.as_ptr(),
            pattern.len(),
            alphabet.as_ptr(),
            alphabet.len(),
            std::ptr::null(),
            0,
            &mut out,
        )
    };
    assert_eq!(status, MsStatus::Ok);
    let json = unsafe { ms_searcher_to_json(out) };
    assert!(!json.is_null());
    let text = unsafe { CStr::from_ptr(json) }.to_owned();
    let mut reloaded: *mut MsSearcher = std::ptr::null_mut();
    let status = unsafe { ms_searcher_from_json(text.as_ptr(), &mut reloaded) };
    assert_eq!(status, MsStatus::Ok);
    assert_eq!(unsafe { ms_searcher_state_count(out) }, unsafe {
        ms_searcher_state_count(reloaded)
    });
    let mut alpha_buf = [0u8; 4];
    let n = unsafe { ms_searcher_alphabet(reloaded, alpha_buf.as_mut_ptr(), 4) };
    assert_eq!(&alpha_buf[..n], b"ab");
    unsafe {
        ms_string_free(json);
        ms_searcher_free(out);
        ms_searcher_free(reloaded);
    }
}

#[test]
fn heuristic_handle_has_reasonable_order() {
    let pattern = b"abcadbca";
    let mut out: *mut MsSearcher = std::ptr::null_mut();
    let status = unsafe {
        ms_searcher_heuristic(
            pattern.as_ptr(),
            pattern.len(),
            std::ptr::null(),
            0,
            std::ptr::null(),
            2,
            &mut out,
        )
    };
    assert_eq!(status, MsStatus::Ok);
    assert_eq!(unsafe { ms_searcher_order(out) }, 7);
    unsafe { ms_searcher_free(out) };
}

#[test]
fn error_paths() {
    // Unknown algorithm name.
    let name = CString::new("boyer_moore").unwrap();
    let mut out: *mut MsSearcher = std::ptr::null_mut();
    let status = unsafe {
        ms_searcher_from_algorithm(
            name.as_ptr(),
            b"ab".as_ptr(),
            2,
            std::ptr::null(),
            0,
            &mut out,
        )
    };
    assert_eq!(status, MsStatus::Parse);
    // Brute force needs force beyond length 4.
    let status = unsafe {
        ms_searcher_fastest(
            b"aabab".as_ptr(),
            5,
            std::ptr::null(),
            0,
            std::ptr::null(),
            0,
            &mut out,
        )
    };
    assert_eq!(status, MsStatus::PatternTooLong);
    // Null handling.
    assert_eq!(
        unsafe { ms_searcher_from_json(std::ptr::null(), &mut out) },
        MsStatus::NullArgument
    );
    assert_eq!(unsafe { ms_searcher_state_count(std::ptr::null()) }, 0);
    unsafe { ms_searcher_free(std::ptr::null_mut()) };
    unsafe { ms_string_free(std::ptr::null_mut()) };
}
