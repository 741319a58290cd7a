#ifndef LATTICELAB_H
#define LATTICELAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of a fallible call. Parse and domain failures are separated the
 * same way the command-line tool separates its exit codes.
 */
typedef enum LlStatus {
  /**
   * Success; output parameters are valid.
   */
  LlStatus_Ok = 0,
  /**
   * Malformed input: spec strings, grid text, or rational encodings.
   */
  LlStatus_ParseError = 1,
  /**
   * Structurally valid input that violates a documented bound.
   */
  LlStatus_DomainError = 2,
  /**
   * A required pointer argument was null.
   */
  LlStatus_NullPointer = 3,
  /**
   * A string argument was not valid UTF-8.
   */
  LlStatus_InvalidUtf8 = 4,
  /**
   * An internal panic was caught at the boundary.
   */
  LlStatus_Panic = 5,
} LlStatus;

/**
 * Opaque configuration handle; create with [`ll_config_from_spec`] or
 * [`ll_config_from_grid_text`], release with [`ll_config_free`].
 */
typedef struct LlConfig LlConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the linked library as a static string; never freed.
 */
const char *ll_version(void);

/**
 * Message for the most recent failure on this thread, or null after a
 * success. The pointer is invalidated by the next library call on the
 * same thread; copy it before calling anything else.
 */
const char *ll_last_error_message(void);

/**
 * Builds a configuration from a catalog spec such as `"stripes:p=2"` or
 * `"grid:file=pattern.txt"`; see the catalog for the accepted names.
 *
 * # Safety
 * `spec` must be a nul-terminated string, `out` a valid pointer. On `Ok`
 * the caller owns the handle written to `*out` and must release it with
 * [`ll_config_free`].
 */
enum LlStatus ll_config_from_spec(const char *spec, struct LlConfig **out);

/**
 * Builds a configuration from grid text (`alphabet:` header plus rows,
 * top row first).
 *
 * # Safety
 * Same contract as [`ll_config_from_spec`].
 */
enum LlStatus ll_config_from_grid_text(const char *text, struct LlConfig **out);

/**
 * Releases a configuration handle. Null is a no-op.
 *
 * # Safety
 * `config` must be null or a handle obtained from this library that has
 * not been freed yet.
 */
void ll_config_free(struct LlConfig *config);

/**
 * Counts distinct colorings of the n-by-k rectangle over the inclusive
 * translate box [x0,x1]x[y0,y1]. Writes the count and whether the box
 * provably covers every translate class.
 *
 * # Safety
 * `config` must be a live handle; `out_count` and `out_exact` must be
 * valid pointers.
 */
enum LlStatus ll_complexity_rect(const struct LlConfig *config,
                                 int64_t n,
                                 int64_t k,
                                 int64_t x0,
                                 int64_t x1,
                                 int64_t y0,
                                 int64_t y1,
                                 uint64_t *out_count,
                                 bool *out_exact);

/**
 * Emits the rectangle complexity table for all sides up to n_max and
 * k_max as CSV with header `n,k,count,exact`. The caller frees the
 * string with [`ll_string_free`].
 *
 * # Safety
 * `config` must be a live handle and `out` a valid pointer.
 */
enum LlStatus ll_rectangle_table_csv(const struct LlConfig *config,
                                     int64_t n_max,
                                     int64_t k_max,
                                     int64_t x0,
                                     int64_t x1,
                                     int64_t y0,
                                     int64_t y1,
                                     char **out);

/**
 * Computes a directional entropy profile and returns it as JSON.
 * Thicknesses arrive as parallel numerator and denominator arrays of
 * length `t_len`; scales as an integer array of length `s_len`. The
 * caller frees the string with [`ll_string_free`].
 *
 * # Safety
 * `config` must be a live handle; `t_num` and `t_den` must point to
 * `t_len` readable values, `scales` to `s_len` readable values; `out`
 * must be a valid pointer.
 */
enum LlStatus ll_entropy_profile_json(const struct LlConfig *config,
                                      int64_t dir_p,
                                      int64_t dir_q,
                                      const int64_t *t_num,
                                      const int64_t *t_den,
                                      uintptr_t t_len,
                                      const int64_t *scales,
                                      uintptr_t s_len,
                                      int64_t x0,
                                      int64_t x1,
                                      int64_t y0,
                                      int64_t y1,
                                      char **out);

/**
 * Releases a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a string obtained from this library that has not
 * been freed yet.
 */
void ll_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LATTICELAB_H */
