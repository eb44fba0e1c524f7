#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "memoed/relevance.hpp"

namespace memoed {

/// One culture-conditioned generation with the symbols extracted from it.
struct GenerationRecord {
  std::string generation_id;
  std::string culture;
  std::string topic;
  std::vector<std::string> symbols;
};

/// JSONL: {"generation_id", "culture", "topic", "symbols": [...]}. Symbols are
/// normalized to their folded query surface.
std::vector<GenerationRecord> read_generations(const std::filesystem::path& path);

/// Generations whose culture is not in the lexicon, sorted and unique.
std::vector<std::string> unknown_cultures(const std::vector<GenerationRecord>& generations,
                                          const CultureLexicon& lexicon);

struct SymbolKey {
  std::string topic;
  std::string symbol;

  auto operator<=>(const SymbolKey&) const = default;
};

/// C_G for every (topic, symbol): the cultures it was generated for.
std::map<SymbolKey, std::set<std::string>> generating_cultures(const std::vector<GenerationRecord>& generations);

struct CultureScore {
  std::string culture;
  std::uint64_t n_contributory = 0;
  double cs = 0.0;
  std::optional<double> z;
  // cs / sum(cs) over C_G; 0 when every cs is 0.
  double share = 0.0;
};

struct ContributionDistribution {
  std::string symbol;
  std::uint64_t n_symbol_docs = 0;
  std::vector<CultureScore> per_culture;  // sorted by culture name

  const CultureScore* find(std::string_view culture) const;
};

enum class MemorizationRule { kNone, kZScore, kSmallSampleFallback };

const char* to_string(MemorizationRule rule);
MemorizationRule parse_memorization_rule(std::string_view text);

struct MemorizationVerdict {
  std::string symbol;
  std::vector<std::string> memorized_for;  // sorted
  MemorizationRule rule = MemorizationRule::kNone;
};

struct MemorizationConfig {
  double z_threshold = 2.6;
  std::size_t small_sample_cutoff = 5;

  void validate() const;
};

struct ContributionCount {
  std::uint64_t n_contributory = 0;
  std::uint64_t n_symbol_docs = 0;
  double cs = 0.0;
};

/// Contributory documents among those where culture and symbol co-occur,
/// divided by the symbol's document frequency.
ContributionCount contribution_score(const DocumentClassifier& classifier, const NgramQuery& symbol,
                                     std::size_t culture);

/// Recomputes share and z from the cs fields. z is left empty when fewer
/// than two cultures are present or every cs is equal.
void assign_zscores(std::vector<CultureScore>& scores);

/// Fills cs, z (population standard deviation over the given cultures) and
/// share from raw contributory counts.
ContributionDistribution score_distribution(std::string symbol, std::uint64_t n_symbol_docs,
                                            const std::vector<std::pair<std::string, std::uint64_t>>& contributory);

ContributionDistribution build_distribution(const DocumentClassifier& classifier, const std::string& symbol,
                                            const std::set<std::string>& generating);

MemorizationVerdict classify_memorized(const ContributionDistribution& dist, const MemorizationConfig& config,
                                       std::size_t n_cultures);

struct SymbolAttribution {
  SymbolKey key;
  ContributionDistribution distribution;
  MemorizationVerdict verdict;
};

/// Runs build_distribution + classify_memorized for every generated symbol;
/// output is sorted by (symbol, topic) regardless of thread count.
std::vector<SymbolAttribution> attribute_symbols(const DocumentClassifier& classifier,
                                                 const std::vector<GenerationRecord>& generations,
                                                 const MemorizationConfig& config, std::size_t threads = 1);

}  // namespace memoed
