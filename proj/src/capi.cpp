#include "memoed/memoed.h"

#include <exception>
#include <filesystem>
#include <new>
#include <string>

#include "memoed/error.hpp"
#include "memoed/index.hpp"
#include "memoed/pipeline.hpp"

struct memo_index {
  memoed::Index index;
};

namespace {

thread_local std::string last_error;

memo_status to_status(memoed::ErrorCode code) {
  switch (code) {
    case memoed::ErrorCode::kInvalidArgument: return MEMO_INVALID_ARGUMENT;
    case memoed::ErrorCode::kNotFound: return MEMO_NOT_FOUND;
    case memoed::ErrorCode::kIo: return MEMO_IO;
    case memoed::ErrorCode::kFormat: return MEMO_FORMAT;
    case memoed::ErrorCode::kUnsupported: return MEMO_UNSUPPORTED;
    case memoed::ErrorCode::kState: return MEMO_STATE;
  }
  return MEMO_INTERNAL;
}

template <typename Fn>
memo_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return MEMO_OK;
  } catch (const memoed::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return MEMO_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) memoed::fail(memoed::ErrorCode::kInvalidArgument, std::string(what) + " must not be null");
}

}  // namespace

extern "C" {

const char* memo_last_error(void) { return last_error.c_str(); }

const char* memo_version(void) { return "0.1.0"; }

const char* memo_status_name(memo_status status) {
  switch (status) {
    case MEMO_OK: return "ok";
    case MEMO_INVALID_ARGUMENT: return "invalid_argument";
    case MEMO_NOT_FOUND: return "not_found";
    case MEMO_IO: return "io";
    case MEMO_FORMAT: return "format";
    case MEMO_UNSUPPORTED: return "unsupported";
    case MEMO_STATE: return "state";
    case MEMO_INTERNAL: return "internal";
  }
  return "unknown";
}

memo_status memo_index_build(const char* corpus_path, size_t max_ngram_len, size_t threads, memo_index** out) {
  return guarded([&] {
    require(corpus_path != nullptr, "corpus_path");
    require(out != nullptr, "out");
    *out = nullptr;
    if (!std::filesystem::exists(corpus_path)) {
      memoed::fail(memoed::ErrorCode::kNotFound, std::string("corpus file not found: ") + corpus_path);
    }
    memoed::IndexOptions options;
    if (max_ngram_len != 0) options.max_ngram_len = max_ngram_len;
    options.threads = threads == 0 ? 1 : threads;
    memoed::CorpusReader reader(corpus_path);
    *out = new memo_index{memoed::Index::build(reader, options)};
  });
}

memo_status memo_index_load(const char* path, memo_index** out) {
  return guarded([&] {
    require(path != nullptr, "path");
    require(out != nullptr, "out");
    *out = nullptr;
    *out = new memo_index{memoed::Index::load(path)};
  });
}

memo_status memo_index_save(const memo_index* index, const char* path) {
  return guarded([&] {
    require(index != nullptr, "index");
    require(path != nullptr, "path");
    index->index.save(path);
  });
}

void memo_index_free(memo_index* index) { delete index; }

memo_status memo_index_get_stats(const memo_index* index, memo_index_stats* out) {
  return guarded([&] {
    require(index != nullptr, "index");
    require(out != nullptr, "out");
    out->doc_count = index->index.doc_count();
    out->token_count = index->index.token_count();
    out->vocabulary_size = index->index.vocabulary_size();
    out->max_ngram_len = index->index.max_ngram_len();
  });
}

memo_status memo_index_count(const memo_index* index, const char* ngram, uint64_t* doc_freq,
                             uint64_t* total_occurrences) {
  return guarded([&] {
    require(index != nullptr, "index");
    require(ngram != nullptr, "ngram");
    const auto rec = index->index.count(memoed::make_query(ngram));
    if (doc_freq != nullptr) *doc_freq = rec.doc_freq;
    if (total_occurrences != nullptr) *total_occurrences = rec.total_occurrences;
  });
}

memo_status memo_run(const char* command, const char* config_path, const char* overrides_json) {
  return guarded([&] {
    require(command != nullptr, "command");
    memoed::RunConfig config;
    if (config_path != nullptr) config = memoed::RunConfig::load(config_path);
    if (overrides_json != nullptr) config.apply_json(overrides_json, std::filesystem::current_path());
    memoed::run_stage(command, config);
  });
}

}  // extern "C"
