#ifndef MEMOED_MEMOED_H
#define MEMOED_MEMOED_H

#include <stddef.h>
#include <stdint.h>

#if defined(MEMOED_BUILDING_LIBRARY)
#define MEMOED_API __attribute__((visibility("default")))
#else
#define MEMOED_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum memo_status {
  MEMO_OK = 0,
  MEMO_INVALID_ARGUMENT = 1,
  MEMO_NOT_FOUND = 2,
  MEMO_IO = 3,
  MEMO_FORMAT = 4,
  MEMO_UNSUPPORTED = 5,
  MEMO_STATE = 6,
  MEMO_INTERNAL = 7
} memo_status;

typedef struct memo_index memo_index;

typedef struct memo_index_stats {
  uint64_t doc_count;
  uint64_t token_count;
  uint64_t vocabulary_size;
  uint64_t max_ngram_len;
} memo_index_stats;

/* Message of the last failure on the calling thread; "" after success. */
MEMOED_API const char* memo_last_error(void);
MEMOED_API const char* memo_version(void);
MEMOED_API const char* memo_status_name(memo_status status);

/* Builds from a JSONL corpus. max_ngram_len 0 selects the default. */
MEMOED_API memo_status memo_index_build(const char* corpus_path, size_t max_ngram_len, size_t threads,
                                        memo_index** out);
MEMOED_API memo_status memo_index_load(const char* path, memo_index** out);
MEMOED_API memo_status memo_index_save(const memo_index* index, const char* path);
MEMOED_API void memo_index_free(memo_index* index);

MEMOED_API memo_status memo_index_get_stats(const memo_index* index, memo_index_stats* out);
/* Unknown n-grams report zero counts. Either output pointer may be NULL. */
MEMOED_API memo_status memo_index_count(const memo_index* index, const char* ngram, uint64_t* doc_freq,
                                        uint64_t* total_occurrences);

/* Runs one pipeline stage: index, classify, label, report, correlate, topics.
 * config_path may be NULL; overrides_json (may be NULL) is a JSON object
 * applied on top of the file, with relative paths resolved against the
 * working directory. */
MEMOED_API memo_status memo_run(const char* command, const char* config_path, const char* overrides_json);

#ifdef __cplusplus
}
#endif

#endif /* MEMOED_MEMOED_H */
