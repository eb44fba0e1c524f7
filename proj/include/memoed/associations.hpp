#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "memoed/memorization.hpp"

namespace memoed {

enum class AssociationKind {
  kMemorized,
  kCrossCulture,
  kDiffuse,
  kWeakFromMemorized,
  kWeakFromDiffuse,
  kUnclassified,
};

inline constexpr std::array<AssociationKind, 6> kAllAssociationKinds = {
    AssociationKind::kMemorized,         AssociationKind::kCrossCulture,    AssociationKind::kDiffuse,
    AssociationKind::kWeakFromMemorized, AssociationKind::kWeakFromDiffuse, AssociationKind::kUnclassified,
};

const char* to_string(AssociationKind kind);
AssociationKind parse_association_kind(std::string_view text);

struct DefinitionRecord {
  std::string symbol;
  std::string culture;
  std::string definition_text;
};

/// JSONL: {"symbol", "culture", "definition"}.
std::vector<DefinitionRecord> read_definitions(const std::filesystem::path& path);

/// What the labeler knows about one (topic, symbol): who generated it, each
/// generating culture's contribution score, and the memorization verdict.
struct SymbolVerdict {
  SymbolKey key;
  std::set<std::string> generating;
  std::map<std::string, double> cs;
  std::set<std::string> memorized_for;
  MemorizationRule rule = MemorizationRule::kNone;
};

std::vector<SymbolVerdict> to_symbol_verdicts(const std::vector<SymbolAttribution>& attributions,
                                              const std::vector<GenerationRecord>& generations);

struct AssociationConfig {
  double diffuse_ratio = 0.5;
  double f1_threshold = 0.7;

  void validate() const;
};

/// Minimum number of generating cultures for a diffuse symbol: ceil(N * ratio).
std::size_t diffuse_threshold(std::size_t n_cultures, double diffuse_ratio = 0.5);

bool classify_diffuse(std::size_t n_generating, std::size_t n_cultures, bool memorized_anywhere,
                      double diffuse_ratio = 0.5);

struct OvershadowResult {
  double r = 0.0;
  bool smoothed = false;  // at least one memorized count was 0 and replaced by 1
};

/// Mean over memorized symbols of count(diffuse) / count(memorized).
OvershadowResult overshadowing_ratio(std::uint64_t diffuse_count, std::span<const std::uint64_t> memorized_counts);
OvershadowResult overshadowing_ratio(const std::string& diffuse_symbol, const std::set<std::string>& memorized_symbols,
                                     const std::map<std::string, std::uint64_t>& counts);

/// Source culture A when the symbol is memorized for A but generated for a
/// different culture that does not itself memorize it. Highest cs wins, ties
/// break on name.
std::optional<std::string> detect_cross_culture(const std::string& culture, const SymbolVerdict& verdict);

struct WeakTrace {
  std::string symbol;
  std::string culture;
  double f1 = 0.0;
};

/// Token-bag F1 of the candidate against every window of the definition whose
/// length is within one token of the candidate's; punctuation tokens ignored.
double best_window_f1(std::span<const std::string> candidate, std::span<const std::string> definition);

std::optional<WeakTrace> trace_weak_from_memorized(const std::string& candidate,
                                                   std::span<const DefinitionRecord> definitions,
                                                   double f1_threshold);

/// Diffuse symbols that occur as contiguous token runs of the candidate.
std::optional<std::set<std::string>> trace_weak_from_diffuse(const std::string& candidate,
                                                             const std::set<std::string>& diffuse_symbols);

struct AssociationLabel {
  std::string culture;
  std::string topic;
  std::string symbol;
  AssociationKind kind = AssociationKind::kUnclassified;
  std::string evidence;
  std::optional<double> score;
};

struct OvershadowEntry {
  std::string topic;
  std::string diffuse_symbol;
  std::uint64_t count = 0;
  std::size_t n_cultures_generated = 0;
  std::optional<double> r;  // empty when the topic has no memorized symbol
  bool smoothed = false;
};

struct LabelingResult {
  std::vector<AssociationLabel> labels;     // sorted by (culture, symbol, topic)
  std::vector<OvershadowEntry> overshadow;  // sorted by (topic, symbol)
};

/// Applies Memorized > CrossCulture > Diffuse > WeakFromMemorized >
/// WeakFromDiffuse > Unclassified to every generated (culture, topic, symbol).
/// `counts` supplies corpus occurrence counts for overshadowing ratios.
LabelingResult label_all(const std::vector<GenerationRecord>& generations, const std::vector<SymbolVerdict>& verdicts,
                         const std::vector<DefinitionRecord>& definitions, const AssociationConfig& config,
                         std::size_t n_cultures, const std::map<std::string, std::uint64_t>& counts);

}  // namespace memoed
