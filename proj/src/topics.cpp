#include "memoed/topics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_map>

#include "memoed/error.hpp"

namespace memoed {

std::vector<TokenRange> chunk_spans(std::size_t n_tokens, std::size_t window, std::size_t stride) {
  if (window == 0) fail(ErrorCode::kInvalidArgument, "chunk window must be at least 1");
  if (stride == 0 || stride > window) fail(ErrorCode::kInvalidArgument, "chunk stride must be in [1, window]");
  std::vector<TokenRange> out;
  for (std::size_t start = 0; start < n_tokens; start += stride) {
    out.push_back({start, std::min(n_tokens, start + window)});
    if (start + window >= n_tokens) break;
  }
  return out;
}

std::vector<Chunk> chunk_documents(const Index& index, std::span<const DocIndex> docs, std::size_t window,
                                   std::size_t stride) {
  std::vector<Chunk> out;
  for (DocIndex d : docs) {
    const auto spans = chunk_spans(index.doc_terms(d).size(), window, stride);
    for (std::size_t i = 0; i < spans.size(); ++i) out.push_back({d, i, spans[i]});
  }
  return out;
}

std::vector<DocIndex> select_cooccurrence_set(const DocumentClassifier& classifier, std::size_t culture_a,
                                              std::size_t culture_b, const NgramQuery& symbol) {
  const auto with_a = classifier.cooccurrence_docs(culture_a, symbol);
  const auto& with_b = classifier.docs_mentioning(culture_b);
  std::vector<DocIndex> candidates;
  std::set_intersection(with_a.begin(), with_a.end(), with_b.begin(), with_b.end(), std::back_inserter(candidates));
  std::vector<DocIndex> out;
  auto ids = classifier.index().resolve(symbol);
  if (!ids) return out;
  for (DocIndex d : candidates) {
    if (classifier.classify(d, culture_a, *ids).kind != RelevanceKind::kNotContributory) out.push_back(d);
  }
  return out;
}

const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> words = {
      "a",     "about",  "above", "after",  "again", "against", "all",   "also",  "am",     "an",    "and",
      "any",   "are",    "as",    "at",     "be",    "because", "been",  "before", "being", "below", "between",
      "both",  "but",    "by",    "can",    "could", "did",     "do",    "does",  "doing",  "down",  "during",
      "each",  "even",   "few",   "for",    "from",  "further", "had",   "has",   "have",   "having", "he",
      "her",   "here",   "hers",  "herself", "him",  "himself", "his",   "how",   "i",      "if",    "in",
      "into",  "is",     "it",    "its",    "itself", "just",   "like",  "many",  "may",    "me",    "more",
      "most",  "much",   "must",  "my",     "myself", "no",     "nor",   "not",   "now",    "of",    "off",
      "on",    "once",   "one",   "only",   "or",    "other",   "our",   "ours",  "ourselves", "out", "over",
      "own",   "s",      "same",  "she",    "should", "so",     "some",  "such",  "t",      "than",  "that",
      "the",   "their",  "theirs", "them",  "themselves", "then", "there", "these", "they", "this",  "those",
      "through", "to",   "too",   "under",  "until", "up",      "us",    "very",  "was",    "we",    "were",
      "what",  "when",   "where", "which",  "while", "who",     "whom",  "why",   "will",   "with",  "would",
      "you",   "your",   "yours", "yourself", "yourselves",
  };
  return words;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::kNotFound, "stopwords file not found: " + path.string());
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open stopwords file: " + path.string());
  std::unordered_set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.insert(fold_case(line.substr(first, last - first + 1)));
  }
  return out;
}

std::size_t LdaCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& d : docs) n += d.size();
  return n;
}

namespace {

bool is_content_term(const std::string& term, const std::unordered_set<std::string>& stopwords) {
  if (stopwords.contains(term)) return false;
  if (is_punctuation_token(term)) return false;
  return !std::all_of(term.begin(), term.end(), [](char c) { return c >= '0' && c <= '9'; });
}

class CorpusBuilder {
 public:
  explicit CorpusBuilder(const std::unordered_set<std::string>& stopwords) : stopwords_(stopwords) {}

  void begin_doc() { corpus_.docs.emplace_back(); }
  void add(const std::string& term) {
    if (!is_content_term(term, stopwords_)) return;
    auto [it, inserted] = ids_.try_emplace(term, static_cast<std::uint32_t>(corpus_.vocab.size()));
    if (inserted) corpus_.vocab.push_back(term);
    corpus_.docs.back().push_back(it->second);
  }
  LdaCorpus finish() { return std::move(corpus_); }

 private:
  const std::unordered_set<std::string>& stopwords_;
  std::unordered_map<std::string, std::uint32_t> ids_;
  LdaCorpus corpus_;
};

class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : engine_(seed) {}
  // 53 random mantissa bits; platform independent unlike uniform_real_distribution.
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

LdaCorpus make_lda_corpus(const std::vector<std::vector<std::string>>& docs,
                          const std::unordered_set<std::string>& stopwords) {
  CorpusBuilder builder(stopwords);
  for (const auto& doc : docs) {
    builder.begin_doc();
    for (const auto& t : doc) builder.add(t);
  }
  return builder.finish();
}

LdaCorpus make_lda_corpus(const Index& index, std::span<const Chunk> chunks,
                          const std::unordered_set<std::string>& stopwords) {
  CorpusBuilder builder(stopwords);
  for (const Chunk& c : chunks) {
    builder.begin_doc();
    const auto terms = index.doc_terms(c.doc);
    for (std::size_t i = c.tokens.begin; i < c.tokens.end; ++i) builder.add(index.term(terms[i]));
  }
  return builder.finish();
}

void LdaParams::validate() const {
  if (topics == 0) fail(ErrorCode::kInvalidArgument, "LDA needs at least one topic");
  if (!(resolved_alpha() > 0.0)) fail(ErrorCode::kInvalidArgument, "LDA alpha must be positive");
  if (!(beta > 0.0)) fail(ErrorCode::kInvalidArgument, "LDA beta must be positive");
}

std::vector<double> LdaModel::topic_word_distribution(std::size_t topic) const {
  const std::size_t v = vocab.size();
  const double denom = static_cast<double>(topic_totals.at(topic)) + static_cast<double>(v) * beta;
  std::vector<double> out(v);
  for (std::size_t w = 0; w < v; ++w) out[w] = (static_cast<double>(word_count(topic, w)) + beta) / denom;
  return out;
}

std::vector<std::pair<std::string, double>> LdaModel::top_words(std::size_t topic, std::size_t n) const {
  const auto phi = topic_word_distribution(topic);
  std::vector<std::size_t> order(phi.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (phi[a] != phi[b]) return phi[a] > phi[b];
    return vocab[a] < vocab[b];
  });
  order.resize(std::min(n, order.size()));
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t w : order) out.emplace_back(vocab[w], phi[w]);
  return out;
}

LdaModel fit_lda(const LdaCorpus& corpus, const LdaParams& params, const SweepObserver& on_sweep) {
  params.validate();
  if (corpus.docs.empty()) fail(ErrorCode::kInvalidArgument, "LDA needs at least one document");
  if (corpus.vocab.empty()) fail(ErrorCode::kInvalidArgument, "LDA vocabulary is empty after stopword removal");

  const std::size_t k_topics = params.topics;
  const std::size_t v = corpus.vocab.size();
  LdaModel m;
  m.topics = k_topics;
  m.alpha = params.resolved_alpha();
  m.beta = params.beta;
  m.vocab = corpus.vocab;
  m.topic_word.assign(k_topics * v, 0);
  m.topic_totals.assign(k_topics, 0);
  m.doc_topic.assign(corpus.docs.size() * k_topics, 0);
  m.assignments.resize(corpus.docs.size());

  Uniform rng(params.seed);
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    const auto& doc = corpus.docs[d];
    m.assignments[d].resize(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const auto k = std::min(k_topics - 1, static_cast<std::size_t>(rng.next() * static_cast<double>(k_topics)));
      m.assignments[d][i] = static_cast<std::uint32_t>(k);
      ++m.topic_word[k * v + doc[i]];
      ++m.topic_totals[k];
      ++m.doc_topic[d * k_topics + k];
    }
  }

  const double v_beta = static_cast<double>(v) * m.beta;
  std::vector<double> cumulative(k_topics);
  for (std::size_t sweep = 0; sweep < params.iterations; ++sweep) {
    for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
      const auto& doc = corpus.docs[d];
      std::uint32_t* dt = &m.doc_topic[d * k_topics];
      for (std::size_t i = 0; i < doc.size(); ++i) {
        const std::uint32_t w = doc[i];
        std::uint32_t k = m.assignments[d][i];
        --m.topic_word[k * v + w];
        --m.topic_totals[k];
        --dt[k];

        double total = 0.0;
        for (std::size_t t = 0; t < k_topics; ++t) {
          total += (static_cast<double>(dt[t]) + m.alpha) * (static_cast<double>(m.topic_word[t * v + w]) + m.beta) /
                   (static_cast<double>(m.topic_totals[t]) + v_beta);
          cumulative[t] = total;
        }
        const double u = rng.next() * total;
        k = static_cast<std::uint32_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        if (k >= k_topics) k = static_cast<std::uint32_t>(k_topics - 1);

        m.assignments[d][i] = k;
        ++m.topic_word[k * v + w];
        ++m.topic_totals[k];
        ++dt[k];
      }
    }
    if (on_sweep) on_sweep(m, sweep);
  }
  return m;
}

std::vector<std::string> topic_candidate_terms(const LdaModel& model, std::size_t top_words_per_topic) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (std::size_t k = 0; k < model.topics; ++k) {
    for (auto& [term, p] : model.top_words(k, top_words_per_topic)) {
      if (seen.insert(term).second) out.push_back(term);
    }
  }
  return out;
}

double smoothed_idf(std::size_t n_docs, std::size_t doc_freq) {
  return std::log((1.0 + static_cast<double>(n_docs)) / (1.0 + static_cast<double>(doc_freq))) + 1.0;
}

std::vector<WeightedTerm> rank_tfidf(std::span<const std::string> candidates, const LdaCorpus& corpus, std::size_t k) {
  std::unordered_map<std::string, std::uint32_t> id_of;
  for (std::uint32_t i = 0; i < corpus.vocab.size(); ++i) id_of.emplace(corpus.vocab[i], i);
  std::vector<std::size_t> tf(corpus.vocab.size(), 0);
  std::vector<std::size_t> df(corpus.vocab.size(), 0);
  std::vector<std::size_t> last_doc(corpus.vocab.size(), static_cast<std::size_t>(-1));
  for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
    for (std::uint32_t w : corpus.docs[d]) {
      ++tf[w];
      if (last_doc[w] != d) {
        ++df[w];
        last_doc[w] = d;
      }
    }
  }
  const double total = static_cast<double>(corpus.token_count());

  std::vector<WeightedTerm> scored;
  std::unordered_set<std::string> seen;
  for (const auto& term : candidates) {
    auto it = id_of.find(term);
    if (it == id_of.end() || !seen.insert(term).second || total == 0.0) continue;
    const double weight = static_cast<double>(tf[it->second]) / total * smoothed_idf(corpus.docs.size(), df[it->second]);
    scored.push_back({term, weight});
  }
  std::sort(scored.begin(), scored.end(), [](const WeightedTerm& a, const WeightedTerm& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.term < b.term;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

KeywordReport extract_keywords(const LdaModel& model, const LdaCorpus& corpus, std::size_t k,
                               std::size_t top_words_per_topic) {
  KeywordReport report;
  report.n_chunks = corpus.docs.size();
  const auto candidates = topic_candidate_terms(model, top_words_per_topic);
  report.keywords = rank_tfidf(candidates, corpus, k);
  return report;
}

}  // namespace memoed
