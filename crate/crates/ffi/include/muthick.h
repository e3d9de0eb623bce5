#ifndef MUTHICK_H
#define MUTHICK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum MtStatus {
  MT_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  MT_STATUS_NULL_POINTER = 1,
  /*
   A string argument was not valid UTF-8, or a size did not match.
   */
  MT_STATUS_INVALID_ARGUMENT = 2,
  /*
   The scene text or its tolerances were rejected.
   */
  MT_STATUS_INVALID_SCENE = 3,
  /*
   The offset height exceeds `1/|mu'|`.
   */
  MT_STATUS_OUT_OF_W = 4,
  /*
   The arclength lies outside an open component.
   */
  MT_STATUS_OUT_OF_DOMAIN = 5,
  /*
   The direction has no part normal to the curve.
   */
  MT_STATUS_DEGENERATE_DIRECTION = 6,
  /*
   A numerical routine failed on valid input.
   */
  MT_STATUS_NUMERIC_FAILURE = 7,
  /*
   An internal panic was caught.
   */
  MT_STATUS_PANIC = 8,
} MtStatus;

/*
 Opaque scene handle.
 */
typedef struct MtScene MtScene;

/*
 Radii of a scene; infinite values are IEEE infinities.
 */
typedef struct MtRadii {
  double focrad0;
  double focradminus;
  double dcsd_half;
  double lr;
  double ur;
  double dir;
  double tir;
  double air;
  /*
   1 when TIR comes from a collapse arc, 0 when it is the infimum UR.
   */
  int32_t tir_attained;
  size_t collapse_count;
} MtRadii;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Parses a scene from JSON text and builds it.

 `overrides` holds `override_count` strings of the form `KEY=VALUE`; it may
 be null when the count is zero. On success `*out` receives a handle that
 must be released with `mt_scene_free`.

 # Safety
 `json` must be a nul-terminated string, `overrides` must point to
 `override_count` nul-terminated strings and `out` must be writable.
 */
enum MtStatus mt_scene_from_json(const char *json,
                                 const char *const *overrides,
                                 size_t override_count,
                                 struct MtScene **out);

/*
 Releases a scene handle. Null is accepted and ignored.

 # Safety
 `scene` must be null or a handle from `mt_scene_from_json` that has not
 been freed yet.
 */
void mt_scene_free(struct MtScene *scene);

/*
 Ambient dimension of the scene, or 0 for a null handle.

 # Safety
 `scene` must be null or a live handle.
 */
size_t mt_scene_dim(const struct MtScene *scene);

/*
 Number of components, or 0 for a null handle.

 # Safety
 `scene` must be null or a live handle.
 */
size_t mt_scene_component_count(const struct MtScene *scene);

/*
 Computes every radius of the scene.

 # Safety
 `scene` must be a live handle and `out` must be writable.
 */
enum MtStatus mt_radii_report(const struct MtScene *scene, struct MtRadii *out);

/*
 The radii report as a JSON document. On success `*out` receives a string
 that must be released with `mt_string_free`.

 # Safety
 `scene` must be a live handle and `out` must be writable.
 */
enum MtStatus mt_radii_report_json(const struct MtScene *scene, char **out);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must be null or a string from this library not yet freed.
 */
void mt_string_free(char *s);

/*
 Evaluates `exp(gamma(s), r v)` on component `component`.

 `v` holds `dim` coordinates; its tangential part is removed and the rest
 normalized. `out_point` receives `dim` coordinates.

 # Safety
 `scene` must be a live handle, `v` must point to `dim` readable doubles
 and `out_point` to `dim` writable doubles.
 */
enum MtStatus mt_exp_mu(const struct MtScene *scene,
                        size_t component,
                        double s,
                        const double *v,
                        size_t dim,
                        double r,
                        double *out_point);

/*
 Message of the last failure on this thread, or null if none occurred.
 The pointer stays valid until the next failing call on this thread.
 */
const char *mt_last_error_message(void);

/*
 Library version as a static nul-terminated string.
 */
const char *mt_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUTHICK_H */
