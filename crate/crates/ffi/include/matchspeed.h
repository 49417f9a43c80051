/* C interface to the matchspeed pattern-matching analysis library. */

#pragma once

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes; nonzero values match the CLI exit codes.
typedef enum MsStatus {
  MS_STATUS_OK = 0,
  // Internal error (invalid machine, singular system, IO, ...).
  MS_STATUS_ERROR = 1,
  // Unparseable pattern, model, algorithm name or machine document.
  MS_STATUS_PARSE = 2,
  // Full-memory expansion exceeded its state cap.
  MS_STATUS_EXPLOSION = 3,
  // Pattern too long for the brute-force search (pass force).
  MS_STATUS_PATTERN_TOO_LONG = 4,
  // A byte fell outside the declared alphabet.
  MS_STATUS_ALPHABET_MISMATCH = 5,
  // Pattern too long for the dense position lattice.
  MS_STATUS_CAPACITY = 6,
  // A required pointer argument was null.
  MS_STATUS_NULL_ARGUMENT = 7,
} MsStatus;

// Opaque searcher: alphabet + pattern + matching machine.
typedef struct MsSearcher MsSearcher;

// Mean and standard error of a Monte-Carlo speed estimate.
typedef struct MsSpeedEstimate {
  double mean;
  // Standard error of the mean.
  double std_error;
} MsSpeedEstimate;

// Instrumentation from one search.
typedef struct MsRunStats {
  // Number of occurrences found.
  uint64_t occurrences;
  // Number of text reads performed.
  uint64_t accesses;
  // Text length divided by accesses (0 when nothing was read).
  double average_speed;
} MsRunStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Build a searcher for a named classic algorithm (`naive`,
// `morris_pratt`, `kmp`, `quicksearch`, `horspool`, `tvsbs`, `fjs`,
// `sma`). `alphabet`/`alphabet_len` may be null/0 to infer the
// alphabet from the pattern.
//
// # Safety
// `algorithm` must be a valid C string; buffer pointers must cover
// their stated lengths; `out` must be a valid pointer.
enum MsStatus ms_searcher_from_algorithm(const char *algorithm,
                                         const uint8_t *pattern,
                                         uintptr_t pattern_len,
                                         const uint8_t *alphabet,
                                         uintptr_t alphabet_len,
                                         struct MsSearcher **out);

// Build the brute-force fastest strategy for the pattern under an iid
// model (`probs` has one entry per alphabet symbol, null = uniform).
// Patterns longer than 4 are rejected unless `force` is nonzero.
//
// # Safety
// Buffer pointers must cover their stated lengths; `out` must be valid.
enum MsStatus ms_searcher_fastest(const uint8_t *pattern,
                                  uintptr_t pattern_len,
                                  const uint8_t *alphabet,
                                  uintptr_t alphabet_len,
                                  const double *probs,
                                  int32_t force,
                                  struct MsSearcher **out);

// Build a K-heuristic strategy (`order >= 1`).
//
// # Safety
// Buffer pointers must cover their stated lengths; `out` must be valid.
enum MsStatus ms_searcher_heuristic(const uint8_t *pattern,
                                    uintptr_t pattern_len,
                                    const uint8_t *alphabet,
                                    uintptr_t alphabet_len,
                                    const double *probs,
                                    uintptr_t order,
                                    struct MsSearcher **out);

// Load a searcher from a machine document in the canonical JSON
// format.
//
// # Safety
// `json` must be a valid C string; `out` must be valid.
enum MsStatus ms_searcher_from_json(const char *json, struct MsSearcher **out);

// Serialize the searcher's machine to the canonical JSON format. The
// returned string is owned by the caller (free with
// [`ms_string_free`]); null on null input.
//
// # Safety
// `searcher` must be a live handle from this library.
char *ms_searcher_to_json(const struct MsSearcher *searcher);

// Number of machine states (including the sink).
//
// # Safety
// `searcher` must be a live handle; null yields 0.
uintptr_t ms_searcher_state_count(const struct MsSearcher *searcher);

// Machine order: the furthest window offset any state reads.
//
// # Safety
// `searcher` must be a live handle; null yields 0.
uint32_t ms_searcher_order(const struct MsSearcher *searcher);

// Alphabet size of the searcher.
//
// # Safety
// `searcher` must be a live handle; null yields 0.
uintptr_t ms_searcher_alphabet_size(const struct MsSearcher *searcher);

// Copy the alphabet bytes (in symbol order, the order model
// probability arrays use) into `buf`, up to `capacity`. Returns the
// alphabet size regardless of how much was copied.
//
// # Safety
// `buf` must point to at least `capacity` writable bytes.
uintptr_t ms_searcher_alphabet(const struct MsSearcher *searcher, uint8_t *buf, uintptr_t capacity);

// Exact asymptotic speed of the searcher under an iid model (null
// `probs` = uniform).
//
// # Safety
// `probs` must be null or hold one entry per alphabet symbol;
// `out_speed` must be valid.
enum MsStatus ms_searcher_asymptotic_speed(const struct MsSearcher *searcher,
                                           const double *probs,
                                           double *out_speed);

// Monte-Carlo speed estimate over `replicates` iid texts of
// `text_length` symbols; deterministic in `seed`.
//
// # Safety
// `probs` must be null or hold one entry per alphabet symbol; `out`
// must be valid.
enum MsStatus ms_searcher_monte_carlo_speed(const struct MsSearcher *searcher,
                                            const double *probs,
                                            uintptr_t text_length,
                                            uint32_t replicates,
                                            uint64_t seed,
                                            struct MsSpeedEstimate *out);

// Search a text, optionally collecting occurrence positions into
// `positions` (up to `capacity`; `stats.occurrences` reports the full
// count either way). Text bytes must belong to the alphabet.
//
// # Safety
// `text` must cover `text_len` bytes; `positions` must be null or
// cover `capacity` entries; `stats` must be valid.
enum MsStatus ms_searcher_search(const struct MsSearcher *searcher,
                                 const uint8_t *text,
                                 uintptr_t text_len,
                                 uintptr_t *positions,
                                 uintptr_t capacity,
                                 struct MsRunStats *stats);

// Free a searcher handle (null is fine).
//
// # Safety
// `searcher` must come from this library and not be freed twice.
void ms_searcher_free(struct MsSearcher *searcher);

// Free a string returned by this library (null is fine).
//
// # Safety
// `s` must come from this library and not be freed twice.
void ms_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus
