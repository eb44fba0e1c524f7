#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "memoed/relevance.hpp"

namespace memoed {

struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const TokenRange&) const = default;
};

struct Chunk {
  DocIndex doc = 0;
  std::size_t chunk_index = 0;
  TokenRange tokens;
};

/// Windows start at 0, stride, 2*stride, ... and stop once a window reaches
/// the end of the document; the last one may be short.
std::vector<TokenRange> chunk_spans(std::size_t n_tokens, std::size_t window, std::size_t stride);

std::vector<Chunk> chunk_documents(const Index& index, std::span<const DocIndex> docs, std::size_t window = 2048,
                                   std::size_t stride = 2048);

/// Documents mentioning both cultures and containing the symbol that are
/// contributory for (culture_a, symbol).
std::vector<DocIndex> select_cooccurrence_set(const DocumentClassifier& classifier, std::size_t culture_a,
                                              std::size_t culture_b, const NgramQuery& symbol);

const std::unordered_set<std::string>& default_stopwords();
/// One word per line; blank lines and '#' comments ignored.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

/// Bag-of-words documents over a compact vocabulary.
struct LdaCorpus {
  std::vector<std::string> vocab;
  std::vector<std::vector<std::uint32_t>> docs;

  std::size_t token_count() const;
};

/// Drops stopwords and tokens made only of punctuation or digits. The
/// vocabulary is numbered in first-seen order.
LdaCorpus make_lda_corpus(const std::vector<std::vector<std::string>>& docs,
                          const std::unordered_set<std::string>& stopwords);
LdaCorpus make_lda_corpus(const Index& index, std::span<const Chunk> chunks,
                          const std::unordered_set<std::string>& stopwords);

struct LdaParams {
  std::size_t topics = 5;
  std::optional<double> alpha;  // defaults to 50 / topics
  double beta = 0.01;
  std::size_t iterations = 500;
  std::uint64_t seed = 42;

  double resolved_alpha() const { return alpha.value_or(50.0 / static_cast<double>(topics)); }
  void validate() const;
};

struct LdaModel {
  std::size_t topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::vector<std::string> vocab;
  std::vector<std::uint32_t> topic_word;    // topics x vocab, row-major
  std::vector<std::uint32_t> topic_totals;  // per topic
  std::vector<std::uint32_t> doc_topic;     // docs x topics, row-major
  std::vector<std::vector<std::uint32_t>> assignments;

  std::size_t vocab_size() const { return vocab.size(); }
  std::uint32_t word_count(std::size_t topic, std::size_t word) const { return topic_word[topic * vocab.size() + word]; }
  /// (n_kw + beta) / (n_k + V * beta)
  std::vector<double> topic_word_distribution(std::size_t topic) const;
  std::vector<std::pair<std::string, double>> top_words(std::size_t topic, std::size_t n) const;
};

using SweepObserver = std::function<void(const LdaModel&, std::size_t sweep)>;

/// Collapsed Gibbs sampling. Single-threaded; identical inputs and seed give
/// identical counts.
LdaModel fit_lda(const LdaCorpus& corpus, const LdaParams& params, const SweepObserver& on_sweep = {});

/// Union of each topic's top words, in first-seen order.
std::vector<std::string> topic_candidate_terms(const LdaModel& model, std::size_t top_words_per_topic);

struct WeightedTerm {
  std::string term;
  double weight = 0.0;
};

/// Smoothed idf: ln((1 + n) / (1 + df)) + 1.
double smoothed_idf(std::size_t n_docs, std::size_t doc_freq);

/// Ranks candidates by collection tf * smoothed idf over the corpus documents;
/// returns the top k distinct terms (ties by term).
std::vector<WeightedTerm> rank_tfidf(std::span<const std::string> candidates, const LdaCorpus& corpus, std::size_t k);

struct KeywordReport {
  std::string symbol;
  std::string culture_a;
  std::string culture_b;
  std::size_t n_docs = 0;
  std::size_t n_chunks = 0;
  std::vector<WeightedTerm> keywords;
};

KeywordReport extract_keywords(const LdaModel& model, const LdaCorpus& corpus, std::size_t k = 5,
                               std::size_t top_words_per_topic = 10);

}  // namespace memoed
