#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "memoed/corpus.hpp"

namespace memoed {

using DocIndex = std::uint32_t;
using TermId = std::uint32_t;

inline constexpr std::size_t kDefaultMaxNgramLen = 8;

/// A case-folded n-gram expressed as the token sequence it must match.
struct NgramQuery {
  std::string surface;
  std::vector<std::string> terms;

  std::size_t token_len() const { return terms.size(); }
  bool operator==(const NgramQuery&) const = default;
};

/// Folds case, collapses whitespace and tokenizes. Throws kInvalidArgument
/// for text that produces no tokens.
NgramQuery make_query(std::string_view text, const Tokenizer& tokenizer = default_tokenizer());

struct CountRecord {
  std::string ngram;
  std::uint64_t doc_freq = 0;
  std::uint64_t total_occurrences = 0;

  bool operator==(const CountRecord&) const = default;
};

struct Posting {
  DocIndex doc = 0;
  std::vector<std::uint32_t> positions;
};

struct PostingList {
  NgramQuery ngram;
  std::vector<Posting> entries;
};

struct IndexOptions {
  std::size_t max_ngram_len = kDefaultMaxNgramLen;
  std::size_t threads = 1;
};

/// Token-level positional inverted index. Multi-token n-grams are answered by
/// scanning the rarest term's postings and verifying the phrase against the
/// stored token sequence of each candidate document. Immutable once built.
class Index {
 public:
  static Index build(std::span<const Document> docs, const IndexOptions& options = {},
                     const Tokenizer& tokenizer = default_tokenizer());
  static Index build(CorpusReader& reader, const IndexOptions& options = {},
                     const Tokenizer& tokenizer = default_tokenizer());

  void save(const std::filesystem::path& path) const;
  static Index load(const std::filesystem::path& path);

  std::size_t doc_count() const { return doc_ids_.size(); }
  std::uint64_t token_count() const { return tokens_.size(); }
  std::size_t vocabulary_size() const { return vocab_.size(); }
  std::size_t max_ngram_len() const { return max_ngram_len_; }
  const std::string& tokenizer_name() const { return tokenizer_name_; }

  const std::string& doc_id(DocIndex doc) const { return doc_ids_.at(doc); }
  std::optional<DocIndex> find_doc(std::string_view id) const;
  std::span<const TermId> doc_terms(DocIndex doc) const;
  /// Sentence ordinal of every token of the document.
  std::span<const std::uint32_t> doc_sentences(DocIndex doc) const;

  std::optional<TermId> term_id(std::string_view term) const;
  const std::string& term(TermId id) const { return vocab_.at(id); }

  /// Term ids of the query, or nullopt when some term never occurs. Throws
  /// kUnsupported when the query is longer than max_ngram_len().
  std::optional<std::vector<TermId>> resolve(const NgramQuery& query) const;

  PostingList postings(const NgramQuery& query) const;
  /// Start positions of every (possibly overlapping) match inside one document.
  std::vector<std::uint32_t> positions_in(DocIndex doc, std::span<const TermId> phrase) const;
  std::vector<std::uint32_t> positions_in(DocIndex doc, const NgramQuery& query) const;

  /// Sorted, unique.
  std::vector<DocIndex> docs_containing(const NgramQuery& query) const;
  std::vector<DocIndex> cooccurrence_docs(const NgramQuery& a, const NgramQuery& b) const;
  CountRecord count(const NgramQuery& query) const;

 private:
  struct Match {
    DocIndex doc;
    std::uint32_t start;
  };

  std::vector<Match> matches(std::span<const TermId> phrase) const;
  bool phrase_at(DocIndex doc, std::uint32_t start, std::span<const TermId> phrase) const;
  void finalize_postings();
  void rebuild_lookup();

  std::string tokenizer_name_;
  std::size_t max_ngram_len_ = kDefaultMaxNgramLen;

  std::vector<std::string> vocab_;
  std::unordered_map<std::string, TermId> vocab_lookup_;

  std::vector<std::string> doc_ids_;
  std::unordered_map<std::string, DocIndex> doc_lookup_;
  std::vector<std::uint64_t> token_offsets_{0};
  std::vector<TermId> tokens_;
  std::vector<std::uint32_t> sentences_;

  // Postings in CSR layout: occurrences of term t live in
  // [posting_offsets_[t], posting_offsets_[t + 1]), ordered by (doc, position).
  std::vector<std::uint64_t> posting_offsets_;
  std::vector<DocIndex> posting_docs_;
  std::vector<std::uint32_t> posting_positions_;
};

/// Parses a CSV with header `ngram,doc_freq,total_occurrences`. Keys are the
/// normalized query surfaces.
std::map<std::string, CountRecord> import_external_counts(const std::filesystem::path& path);

}  // namespace memoed
