#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "memoed/index.hpp"

namespace memoed {

/// Culture name -> alias n-grams (country and demonym). Names are kept in
/// lexicographic order; culture ordinals below index into that order.
class CultureLexicon {
 public:
  CultureLexicon() = default;
  explicit CultureLexicon(const std::map<std::string, std::vector<std::string>>& aliases);

  /// JSON object: {"Japan": ["japan", "japanese"], ...}
  static CultureLexicon load(const std::filesystem::path& path);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t culture) const { return names_.at(culture); }
  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t require(std::string_view name) const;
  const std::vector<NgramQuery>& aliases(std::size_t culture) const { return aliases_.at(culture); }
  std::size_t longest_alias() const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<NgramQuery>> aliases_;
};

/// Inclusive token range of one n-gram occurrence.
struct Occurrence {
  std::uint32_t first = 0;
  std::uint32_t last = 0;
};

struct RelevanceConfig {
  std::size_t max_seq_len = 2048;
  std::size_t sent_threshold = 2;
  double snr_low = -1.0;
  double epsilon = 1.0;

  void validate() const;
};

struct RelevanceMetrics {
  std::optional<std::size_t> d_tok;
  std::optional<std::size_t> d_sent;
  double d_snr = 0.0;
};

enum class RelevanceKind { kGlobal, kLocal, kNotContributory };

const char* to_string(RelevanceKind kind);

struct RelevanceVerdict {
  RelevanceKind kind = RelevanceKind::kNotContributory;
  RelevanceMetrics metrics;
};

// Distance between two occurrences is the token gap between their nearer
// edges, or 0 when they overlap. Both functions return the minimum over all
// pairs, nullopt if either side is empty. Occurrences must be sorted by first.
std::optional<std::size_t> min_token_distance(std::span<const Occurrence> a, std::span<const Occurrence> b);
std::optional<std::size_t> min_sentence_distance(std::span<const Occurrence> a, std::span<const Occurrence> b,
                                                 std::span<const std::uint32_t> sentence_of_token);

std::optional<std::size_t> min_token_distance(const Index& index, DocIndex doc, const NgramQuery& culture_alias,
                                              const NgramQuery& symbol);
std::optional<std::size_t> min_sentence_distance(const Index& index, DocIndex doc, const NgramQuery& culture_alias,
                                                 const NgramQuery& symbol);
std::optional<std::size_t> min_token_distance(const Document& doc, const NgramQuery& culture_alias,
                                              const NgramQuery& symbol);
std::optional<std::size_t> min_sentence_distance(const Document& doc, const NgramQuery& culture_alias,
                                                 const NgramQuery& symbol);

/// log2(target / (others + epsilon)); -infinity when target is 0.
double d_snr(std::uint64_t target_mentions, std::uint64_t other_mentions, double epsilon);

/// The Global / Local rules over precomputed metrics.
RelevanceKind classify_metrics(const RelevanceMetrics& metrics, const RelevanceConfig& config);

struct Mention {
  std::uint32_t culture;
  Occurrence span;
};

/// Finds culture mentions with leftmost-longest matching over all aliases, so
/// an alias nested inside a longer alias ("korea" in "south korea") is not
/// counted twice.
class CultureMatcher {
 public:
  CultureMatcher(const Index& index, const CultureLexicon& lexicon);

  std::vector<Mention> scan(DocIndex doc) const;

 private:
  struct Alias {
    std::vector<TermId> terms;
    std::uint32_t culture;
  };

  const Index* index_;
  // First term -> aliases starting with it, longest first.
  std::unordered_map<TermId, std::vector<Alias>> by_first_term_;
};

/// Per-document relevance verdicts against a built index. Culture mentions of
/// every document are computed once at construction; afterwards the object is
/// read-only and safe to share across threads.
class DocumentClassifier {
 public:
  DocumentClassifier(const Index& index, const CultureLexicon& lexicon, RelevanceConfig config,
                     std::size_t threads = 1);

  const Index& index() const { return *index_; }
  const CultureLexicon& lexicon() const { return *lexicon_; }
  const RelevanceConfig& config() const { return config_; }

  const std::vector<Mention>& mentions(DocIndex doc) const { return mentions_.at(doc); }
  /// Sorted documents with at least one mention of the culture.
  const std::vector<DocIndex>& docs_mentioning(std::size_t culture) const { return docs_by_culture_.at(culture); }

  RelevanceMetrics metrics(DocIndex doc, std::size_t culture, std::span<const TermId> symbol) const;
  RelevanceVerdict classify(DocIndex doc, std::size_t culture, std::span<const TermId> symbol) const;
  RelevanceVerdict classify(DocIndex doc, std::size_t culture, const NgramQuery& symbol) const;

  /// Documents mentioning the culture that also contain the symbol.
  std::vector<DocIndex> cooccurrence_docs(std::size_t culture, const NgramQuery& symbol) const;

 private:
  const Index* index_;
  const CultureLexicon* lexicon_;
  RelevanceConfig config_;
  std::vector<std::vector<Mention>> mentions_;
  std::vector<std::vector<DocIndex>> docs_by_culture_;
};

}  // namespace memoed
