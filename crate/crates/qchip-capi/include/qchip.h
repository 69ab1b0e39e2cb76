#ifndef QCHIP_H
#define QCHIP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every API call.
 */
typedef enum QchipStatus {
  QchipStatus_Ok = 0,
  /**
   * Malformed argument or input file.
   */
  QchipStatus_InvalidInput = 2,
  /**
   * Substrate cannot hold the components under the requested constraints.
   */
  QchipStatus_Capacity = 3,
  /**
   * Internal invariant breach; report it.
   */
  QchipStatus_Internal = 4,
  /**
   * A required pointer argument was null.
   */
  QchipStatus_NullPointer = 5,
  /**
   * A string argument was not valid UTF-8.
   */
  QchipStatus_Utf8 = 6,
  /**
   * The output buffer is too small; `*needed` holds the required size.
   */
  QchipStatus_BufferTooSmall = 7,
} QchipStatus;

/**
 * A placed or in-progress chip layout. Opaque.
 */
typedef struct QchipLayout QchipLayout;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fetches the message set by the last failing call on this thread.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes (or be null to only query the
 * needed size); `needed` may be null.
 */
enum QchipStatus qchip_last_error_message(char *buf, uintptr_t cap, uintptr_t *needed);

/**
 * Builds a layout for a named topology with a jittered synthetic global
 * placement (`noise_cells` Gaussian sigma, `seed` deterministic).
 *
 * # Safety
 * `topology` must be a NUL-terminated string; `out` must be a valid pointer.
 * On success `*out` owns the layout; release it with `qchip_layout_free`.
 */
enum QchipStatus qchip_layout_from_topology(const char *topology,
                                            uint64_t seed,
                                            double noise_cells,
                                            struct QchipLayout **out);

/**
 * Releases a layout handle. Null is a no-op.
 *
 * # Safety
 * `layout` must be a pointer previously returned by this library, not yet
 * freed.
 */
void qchip_layout_free(struct QchipLayout *layout);

/**
 * Legalizes the layout in place with the named engine (`qgdp`, `tetris`,
 * `abacus`, `q-tetris`, `q-abacus`); `with_dp` appends the detailed placer.
 *
 * # Safety
 * `layout` must be a live handle; `engine` a NUL-terminated string.
 */
enum QchipStatus qchip_legalize(struct QchipLayout *layout, const char *engine, bool with_dp);

/**
 * Counts legality violations at the layout's achieved qubit spacing.
 *
 * # Safety
 * `layout` must be a live handle; `count` a valid pointer.
 */
enum QchipStatus qchip_violation_count(const struct QchipLayout *layout, uint64_t *count);

/**
 * Serializes the metrics report as JSON into (`buf`, `cap`).
 *
 * # Safety
 * Buffer contract as in `qchip_last_error_message`.
 */
enum QchipStatus qchip_metrics_json(const struct QchipLayout *layout,
                                    char *buf,
                                    uintptr_t cap,
                                    uintptr_t *needed);

/**
 * Writes the current placement to `path` as a placement file (`stage` 0 =
 * gp, 1 = legalized, 2 = detailed-placed).
 *
 * # Safety
 * `layout` must be a live handle; `path` a NUL-terminated string.
 */
enum QchipStatus qchip_save_placement(const struct QchipLayout *layout,
                                      uint32_t stage,
                                      const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCHIP_H */
