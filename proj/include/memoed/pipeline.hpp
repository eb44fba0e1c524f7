#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "memoed/associations.hpp"
#include "memoed/memorization.hpp"
#include "memoed/relevance.hpp"

namespace memoed {

struct LdaSettings {
  std::size_t topics = 5;
  std::optional<double> alpha;
  double beta = 0.01;
  std::size_t iterations = 500;
  std::size_t window = 2048;
  std::size_t stride = 2048;
  std::size_t top_words = 10;
  std::size_t keywords = 5;
  bool dump_topics = false;
  // Shell command run once per case with {symbol}, {culture_a}, {culture_b}
  // and {keywords} substituted; its stdout is stored as "interpretation".
  std::string interpret_command;
};

struct RunConfig {
  std::filesystem::path corpus;
  std::filesystem::path cultures;
  std::filesystem::path generations;
  std::filesystem::path definitions;
  std::optional<std::filesystem::path> external_counts;
  std::optional<std::filesystem::path> stopwords_file;
  std::optional<std::filesystem::path> index_path;  // defaults to out_dir/index.bin
  std::filesystem::path out_dir = "out";

  std::size_t threads = 1;
  std::uint64_t seed = 42;
  bool force = false;
  bool json = false;
  bool topic_filter = false;
  std::size_t max_ngram_len = kDefaultMaxNgramLen;

  RelevanceConfig relevance;
  MemorizationConfig memorization;
  AssociationConfig associations;
  LdaSettings lda;

  std::map<std::string, std::vector<std::string>> topic_keywords = default_topic_keywords();
  std::vector<std::string> exclude_cultures;

  /// Merges a JSON object into the config. Relative paths resolve against
  /// `base_dir`; unknown keys are rejected.
  void apply_json(std::string_view json_text, const std::filesystem::path& base_dir);
  static RunConfig load(const std::filesystem::path& path);

  void validate() const;
  std::filesystem::path resolved_index_path() const;

  static std::map<std::string, std::vector<std::string>> default_topic_keywords();
};

struct StageResult {
  std::vector<std::filesystem::path> written;
};

StageResult run_index(const RunConfig& config);
StageResult run_classify(const RunConfig& config);
StageResult run_label(const RunConfig& config);
StageResult run_report(const RunConfig& config);
StageResult run_correlate(const RunConfig& config);
StageResult run_topics(const RunConfig& config);

/// Dispatches by command name: index, classify, label, report, correlate, topics.
StageResult run_stage(std::string_view command, const RunConfig& config);

/// printf("%.6g"), with "-0" normalized to "0".
std::string format_real(double value);

}  // namespace memoed
