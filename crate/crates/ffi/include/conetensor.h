#ifndef CONETENSOR_H
#define CONETENSOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CtStatus {
  CT_STATUS_OK = 0,
  /**
   * Malformed input, unsupported request or internal failure.
   */
  CT_STATUS_ERROR = 1,
  /**
   * A verified negative: classical cone or invalid certificate.
   */
  CT_STATUS_NEGATIVE = 2,
  CT_STATUS_NULL_POINTER = 3,
  CT_STATUS_INVALID_UTF8 = 4,
  CT_STATUS_PANIC = 5,
} CtStatus;

/**
 * A certificate produced by [`ct_certify`] or parsed by [`ct_certificate_from_json`].
 */
typedef struct CtCertificate CtCertificate;

/**
 * A parsed cone.
 */
typedef struct CtCone CtCone;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. Valid until the next
 * call into the library on the same thread.
 */
const char *ct_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ct_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void ct_string_free(char *s);

/**
 * Parses a cone from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a writable pointer.
 */
enum CtStatus ct_cone_from_json(const char *json, struct CtCone **out);

/**
 * # Safety
 * `cone` must be NULL or a handle from this library, not yet freed.
 */
void ct_cone_free(struct CtCone *cone);

/**
 * # Safety
 * `cone` must be a live handle and `out` writable.
 */
enum CtStatus ct_cone_ambient_dim(const struct CtCone *cone, size_t *out);

/**
 * Writes 1 to `out` when the cone is isomorphic to an orthant, else 0.
 *
 * # Safety
 * `cone` must be a live handle and `out` writable.
 */
enum CtStatus ct_cone_is_classical(const struct CtCone *cone, int32_t *out);

/**
 * # Safety
 * `cone` must be a live handle and `out` writable.
 */
enum CtStatus ct_cone_dual(const struct CtCone *cone, struct CtCone **out);

/**
 * The cone in its JSON file format.
 *
 * # Safety
 * `cone` must be a live handle and `out` writable.
 */
enum CtStatus ct_cone_to_json(const struct CtCone *cone, char **out);

/**
 * Builds an entanglement certificate for the pair. Returns
 * `CT_STATUS_NEGATIVE` when either cone is classical.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` writable.
 */
enum CtStatus ct_certify(const struct CtCone *a,
                         const struct CtCone *b,
                         uint64_t seed,
                         struct CtCertificate **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum CtStatus ct_certificate_from_json(const char *json, struct CtCertificate **out);

/**
 * # Safety
 * `cert` must be NULL or a handle from this library, not yet freed.
 */
void ct_certificate_free(struct CtCertificate *cert);

/**
 * # Safety
 * `cert` must be a live handle and `out` writable.
 */
enum CtStatus ct_certificate_to_json(const struct CtCertificate *cert, char **out);

/**
 * The separation value as a `"p/q"` string.
 *
 * # Safety
 * `cert` must be a live handle and `out` writable.
 */
enum CtStatus ct_certificate_separation_value(const struct CtCertificate *cert, char **out);

/**
 * Replays the certificate against the cones. Returns `CT_STATUS_OK` when it
 * is valid and `CT_STATUS_NEGATIVE` when it is not.
 *
 * # Safety
 * `cert`, `a` and `b` must be live handles.
 */
enum CtStatus ct_verify(const struct CtCertificate *cert,
                        const struct CtCone *a,
                        const struct CtCone *b,
                        uint64_t seed);

/**
 * Injective and projective norms of a tensor, as
 * `{"epsilon": …, "pi": …}`. Spaces use the normed-space JSON format and the
 * tensor is a matrix of `"p/q"` strings.
 *
 * # Safety
 * All string arguments must be NUL-terminated and `out` writable.
 */
enum CtStatus ct_tensor_norms(const char *space_x,
                              const char *space_y,
                              const char *tensor,
                              char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONETENSOR_H */
