#ifndef PTC_FORGE_H
#define PTC_FORGE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum PtcStatus {
  PTC_STATUS_OK = 0,
  PTC_STATUS_NULL_POINTER = 1,
  PTC_STATUS_INVALID_ARGUMENT = 2,
  PTC_STATUS_INFEASIBLE = 3,
  PTC_STATUS_INTERNAL = 4,
} PtcStatus;

/**
 * Manual design families.
 */
typedef enum PtcBaseline {
  PTC_BASELINE_MZI_CLEMENTS = 0,
  PTC_BASELINE_BUTTERFLY = 1,
  PTC_BASELINE_MMI_INTERLACED = 2,
} PtcBaseline;

/**
 * Opaque gene.
 */
typedef struct PtcGene PtcGene;

/**
 * Opaque process design kit.
 */
typedef struct PtcPdk PtcPdk;

typedef struct PtcCost {
  double area_optical;
  double area_electrical;
  double power;
  double latency;
  double insertion_loss;
  double cd;
  double ee;
  double aee;
} PtcCost;

/**
 * Closed ranges on total area (mm^2), power (mW) and latency (ps).
 */
typedef struct PtcConstraints {
  double area_min;
  double area_max;
  double power_min;
  double power_max;
  double latency_min;
  double latency_max;
} PtcConstraints;

typedef struct PtcScores {
  double s_zico;
  double s_param;
  double s_sparsity;
  double combined;
} PtcScores;

typedef struct PtcSearchParams {
  size_t k;
  size_t pop_size;
  size_t max_iters;
  size_t phase2_iters;
  double p_mu0;
  double p_co;
  uint64_t seed;
} PtcSearchParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * The pointer is valid until the next call on the same thread.
 */
const char *ptc_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void ptc_string_free(char *s);

/**
 * Load a preset (`gf`, `custom`) or a TOML/JSON file.
 *
 * # Safety
 * `name_or_path` must be a NUL-terminated string; `out` must be writable.
 */
enum PtcStatus ptc_pdk_load(const char *name_or_path, struct PtcPdk **out);

/**
 * # Safety
 * `pdk` must be NULL or a handle from [`ptc_pdk_load`].
 */
void ptc_pdk_free(struct PtcPdk *pdk);

/**
 * Parse a gene from its JSON object or single-line text form.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PtcStatus ptc_gene_parse(const char *text, struct PtcGene **out);

/**
 * # Safety
 * `out` must be writable.
 */
enum PtcStatus ptc_gene_baseline(enum PtcBaseline style, size_t k, struct PtcGene **out);

/**
 * # Safety
 * `gene` must be NULL or a gene handle.
 */
void ptc_gene_free(struct PtcGene *gene);

/**
 * Matrix size of a gene, or 0 for NULL.
 *
 * # Safety
 * `gene` must be NULL or a gene handle.
 */
size_t ptc_gene_k(const struct PtcGene *gene);

/**
 * Active block count, or 0 for NULL.
 *
 * # Safety
 * `gene` must be NULL or a gene handle.
 */
size_t ptc_gene_active_blocks(const struct PtcGene *gene);

/**
 * Text form of a gene; free with [`ptc_string_free`]. NULL on error.
 *
 * # Safety
 * `gene` must be NULL or a gene handle.
 */
char *ptc_gene_to_text(const struct PtcGene *gene);

/**
 * # Safety
 * Handles must be valid; `out` must be writable.
 */
enum PtcStatus ptc_cost(const struct PtcGene *gene, const struct PtcPdk *pdk, struct PtcCost *out);

/**
 * Default constraint window for `k` on this PDK.
 *
 * # Safety
 * `pdk` must be a valid handle; `out` must be writable.
 */
enum PtcStatus ptc_constraints_default(const struct PtcPdk *pdk,
                                       size_t k,
                                       struct PtcConstraints *out);

/**
 * Whether a gene satisfies `constraints`.
 *
 * # Safety
 * Handles must be valid; `feasible` must be writable.
 */
enum PtcStatus ptc_check_constraints(const struct PtcGene *gene,
                                     const struct PtcPdk *pdk,
                                     const struct PtcConstraints *constraints,
                                     bool *feasible);

/**
 * Proxy scores with the default weights.
 *
 * # Safety
 * `gene` must be valid; `out` must be writable.
 */
enum PtcStatus ptc_score(const struct PtcGene *gene, uint64_t seed, struct PtcScores *out);

/**
 * Default search parameters for matrix size `k`.
 */
struct PtcSearchParams ptc_search_params_default(size_t k);

/**
 * Run a search. `constraints` may be NULL for the default window and
 * `out_dir` may be NULL to skip writing files. On success `front_json`
 * receives the final front as a JSON array (free with
 * [`ptc_string_free`]).
 *
 * # Safety
 * Pointers must be valid or NULL where allowed.
 */
enum PtcStatus ptc_search(const struct PtcPdk *pdk,
                          const struct PtcSearchParams *params,
                          const struct PtcConstraints *constraints,
                          const char *out_dir,
                          char **front_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PTC_FORGE_H */
