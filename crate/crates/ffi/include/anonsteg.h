/* SPDX-License-Identifier: Apache-2.0 */

#ifndef ANONSTEG_H
#define ANONSTEG_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * HE instantiation selector for [`as_params_new`].
 */
#define AS_HE_TRANSPARENT 0

#define AS_HE_ONEHOT 1

/**
 * Commitment instantiation selector for [`as_params_new`].
 */
#define AS_VC_MERKLE 0

#define AS_VC_SSB 1

/**
 * Result code of every entry point.
 */
typedef enum AsStatus {
  AS_STATUS_OK = 0,
  AS_STATUS_NULL_POINTER = 1,
  AS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Input bytes could not be parsed.
   */
  AS_STATUS_DECODE = 3,
  /**
   * Decoding returned ⊥.
   */
  AS_STATUS_BOTTOM = 4,
  /**
   * The output buffer is too small; the required size was written.
   */
  AS_STATUS_BUFFER_TOO_SMALL = 5,
  AS_STATUS_BUDGET = 6,
  AS_STATUS_PANIC = 7,
  AS_STATUS_INTERNAL = 8,
} AsStatus;

typedef struct AsDecodingKey AsDecodingKey;

typedef struct AsEncodingKey AsEncodingKey;

typedef struct AsParams AsParams;

/**
 * Seeded ChaCha20 generator.
 */
typedef struct AsRng AsRng;

typedef struct AsTranscript AsTranscript;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code; accepts any integer.
 */
const char *as_status_string(int32_t status);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into this library from the same thread.
 */
const char *as_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *as_version(void);

/**
 * # Safety
 * `out` must be writable.
 */
enum AsStatus as_rng_new(uint64_t seed, struct AsRng **out);

/**
 * # Safety
 * `rng` must be null or a handle from [`as_rng_new`], not yet freed.
 */
void as_rng_free(struct AsRng *rng);

/**
 * # Safety
 * `out` must be writable.
 */
enum AsStatus as_params_new(uint32_t security,
                            size_t doc_bits,
                            size_t docs,
                            uint32_t he,
                            uint32_t vc,
                            struct AsParams **out);

/**
 * # Safety
 * `params` must be null or a live handle.
 */
void as_params_free(struct AsParams *params);

/**
 * Samples an encoding key.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum AsStatus as_gen(const struct AsParams *params, struct AsRng *rng, struct AsEncodingKey **out);

/**
 * # Safety
 * `ek` must be null or a live handle.
 */
void as_encoding_key_free(struct AsEncodingKey *ek);

/**
 * Encodes a `doc_bits`-bit message into one document.
 *
 * # Safety
 * `message` must hold `ceil(doc_bits / 8)` bytes; `buf` must hold `buf_len`
 * bytes; `out_len` must be writable.
 */
enum AsStatus as_enc(const struct AsParams *params,
                     const struct AsEncodingKey *ek,
                     const uint8_t *message,
                     size_t message_len,
                     uint8_t *buf,
                     size_t buf_len,
                     size_t *out_len);

/**
 * Builds a transcript from `docs` packed documents of `doc_bits` bits each,
 * laid out back to back.
 *
 * # Safety
 * `rows` must hold `docs * ceil(doc_bits / 8)` bytes; `out` must be writable.
 */
enum AsStatus as_transcript_new(uint32_t security,
                                size_t doc_bits,
                                size_t docs,
                                const uint8_t *rows,
                                size_t rows_len,
                                struct AsTranscript **out);

/**
 * Parses the binary transcript format.
 *
 * # Safety
 * `bytes` must hold `len` bytes; `out` must be writable.
 */
enum AsStatus as_transcript_from_bytes(const uint8_t *bytes, size_t len, struct AsTranscript **out);

/**
 * # Safety
 * `t` must be live; `buf` must hold `buf_len` bytes; `out_len` writable.
 */
enum AsStatus as_transcript_to_bytes(const struct AsTranscript *t,
                                     uint8_t *buf,
                                     size_t buf_len,
                                     size_t *out_len);

/**
 * Replaces document `index` (1-based) with a packed document.
 *
 * # Safety
 * `t` must be live; `doc` must hold `doc_len` bytes.
 */
enum AsStatus as_transcript_set_document(struct AsTranscript *t,
                                         size_t index,
                                         const uint8_t *doc,
                                         size_t doc_len);

/**
 * # Safety
 * `t` must be null or a live handle.
 */
void as_transcript_free(struct AsTranscript *t);

/**
 * Derives a decoding key for the sender of document `index` (1-based).
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum AsStatus as_key_extract(const struct AsParams *params,
                             const struct AsEncodingKey *ek,
                             const struct AsTranscript *t,
                             size_t index,
                             struct AsRng *rng,
                             struct AsDecodingKey **out);

/**
 * # Safety
 * `bytes` must hold `len` bytes; `out` must be writable.
 */
enum AsStatus as_decoding_key_from_bytes(const uint8_t *bytes,
                                         size_t len,
                                         struct AsDecodingKey **out);

/**
 * # Safety
 * `dk` must be live; `buf` must hold `buf_len` bytes; `out_len` writable.
 */
enum AsStatus as_decoding_key_to_bytes(const struct AsDecodingKey *dk,
                                       uint8_t *buf,
                                       size_t buf_len,
                                       size_t *out_len);

/**
 * # Safety
 * `dk` must be null or a live handle.
 */
void as_decoding_key_free(struct AsDecodingKey *dk);

/**
 * Decodes the message. Returns [`AsStatus::Bottom`] when decoding yields ⊥.
 *
 * # Safety
 * Handles must be live; `buf` must hold `buf_len` bytes; `out_len` writable.
 */
enum AsStatus as_dec(const struct AsDecodingKey *dk,
                     const struct AsTranscript *t,
                     uint8_t *buf,
                     size_t buf_len,
                     size_t *out_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANONSTEG_H */
