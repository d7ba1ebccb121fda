#ifndef ROLLCALL_H
#define ROLLCALL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum RcStatus {
  RC_STATUS_OK = 0,
  RC_STATUS_NULL_POINTER = 1,
  RC_STATUS_INVALID_UTF8 = 2,
  RC_STATUS_IO = 3,
  RC_STATUS_PARSE = 4,
  RC_STATUS_INVALID_ARGUMENT = 5,
  RC_STATUS_NOT_FOUND = 6,
  RC_STATUS_NUMERIC = 7,
  RC_STATUS_CHECK_FAILED = 8,
  RC_STATUS_PANIC = 9,
} RcStatus;

/**
 * Processed corpus handle.
 */
typedef struct RcCorpus RcCorpus;

/**
 * Trained or loaded vote model handle.
 */
typedef struct RcModel RcModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *rc_version(void);

/**
 * Message for the most recent failure on this thread, or NULL if none.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *rc_last_error(void);

/**
 * Parses the three JSONL files and applies the standard preprocessing.
 *
 * # Safety
 * Path arguments must be NUL-terminated strings; `out` must be writable.
 */
enum RcStatus rc_corpus_ingest(const char *bills,
                               const char *legislators,
                               const char *votes,
                               struct RcCorpus **out);

/**
 * Loads a corpus cache written by `rollcall ingest`.
 *
 * # Safety
 * `cache` must be a NUL-terminated string; `out` must be writable.
 */
enum RcStatus rc_corpus_load(const char *cache, struct RcCorpus **out);

/**
 * Bill, vote and legislator counts. Any out pointer may be NULL.
 *
 * # Safety
 * `corpus` must come from this library and not have been freed.
 */
enum RcStatus rc_corpus_counts(const struct RcCorpus *corpus,
                               size_t *bills,
                               size_t *votes,
                               size_t *legislators);

/**
 * Share of yes votes after filtering.
 *
 * # Safety
 * `corpus` must be a live handle; `out` must be writable.
 */
enum RcStatus rc_corpus_yes_rate(const struct RcCorpus *corpus, double *out);

/**
 * Releases a corpus. NULL is ignored.
 *
 * # Safety
 * `corpus` must be NULL or a handle not yet freed.
 */
void rc_corpus_free(struct RcCorpus *corpus);

/**
 * Trains a neural model on every vote in `corpus`. `model_config` is a
 * preset name (`"cnn_meta"`) or a path to a JSON config.
 *
 * # Safety
 * `corpus` must be a live handle, `model_config` a NUL-terminated string
 * and `out` writable.
 */
enum RcStatus rc_model_train(const struct RcCorpus *corpus,
                             const char *model_config,
                             struct RcModel **out);

/**
 * Loads a checkpoint written by `rollcall train` or [`rc_model_save`].
 *
 * # Safety
 * `checkpoint` must be a NUL-terminated string; `out` must be writable.
 */
enum RcStatus rc_model_load(const char *checkpoint, struct RcModel **out);

/**
 * # Safety
 * `model` must be a live handle and `checkpoint` a NUL-terminated string.
 */
enum RcStatus rc_model_save(const struct RcModel *model, const char *checkpoint);

/**
 * Probability that `legislator_id` votes yes on `bill_id`, a bill of
 * `corpus`. The legislator must be known to the model.
 *
 * # Safety
 * Handles must be live, ids NUL-terminated and `out` writable.
 */
enum RcStatus rc_model_predict(const struct RcModel *model,
                               const struct RcCorpus *corpus,
                               const char *bill_id,
                               const char *legislator_id,
                               double *out);

/**
 * # Safety
 * `model` must be NULL or a handle not yet freed.
 */
void rc_model_free(struct RcModel *model);

/**
 * Pooled k-fold cross-validation accuracy of `model_config` on `corpus`.
 *
 * # Safety
 * `corpus` must be live, `model_config` NUL-terminated, `out` writable.
 */
enum RcStatus rc_eval_in_session(const struct RcCorpus *corpus,
                                 const char *model_config,
                                 size_t folds,
                                 uint64_t fold_seed,
                                 double *out);

/**
 * Writes a synthetic corpus for `spec_json` (a JSON object, may be `{}`)
 * into directory `dir`.
 *
 * # Safety
 * Both arguments must be NUL-terminated strings.
 */
enum RcStatus rc_synth_write(const char *spec_json, const char *dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROLLCALL_H */
