#include "memoed/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "memoed/error.hpp"
#include "parallel.hpp"

namespace memoed {

CultureLexicon::CultureLexicon(const std::map<std::string, std::vector<std::string>>& aliases) {
  std::map<std::string, std::string> owner;
  for (const auto& [name, list] : aliases) {
    if (name.empty()) fail(ErrorCode::kInvalidArgument, "culture with empty name");
    if (list.empty()) fail(ErrorCode::kInvalidArgument, "culture \"" + name + "\" has no aliases");
    std::vector<NgramQuery> queries;
    for (const auto& alias : list) {
      NgramQuery q = make_query(alias);
      auto [it, inserted] = owner.emplace(q.surface, name);
      if (!inserted) {
        if (it->second == name) continue;
        fail(ErrorCode::kInvalidArgument,
             "alias \"" + q.surface + "\" listed under both \"" + it->second + "\" and \"" + name + "\"");
      }
      queries.push_back(std::move(q));
    }
    std::sort(queries.begin(), queries.end(), [](const auto& x, const auto& y) { return x.surface < y.surface; });
    names_.push_back(name);
    aliases_.push_back(std::move(queries));
  }
}

CultureLexicon CultureLexicon::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::kNotFound, "cultures file not found: " + path.string());
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open cultures file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kFormat, path.string() + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::kFormat, path.string() + ": expected an object of culture -> aliases");
  std::map<std::string, std::vector<std::string>> aliases;
  for (const auto& [name, list] : doc.items()) {
    if (!list.is_array()) fail(ErrorCode::kFormat, path.string() + ": aliases of \"" + name + "\" must be an array");
    auto& out = aliases[name];
    for (const auto& a : list) {
      if (!a.is_string()) fail(ErrorCode::kFormat, path.string() + ": non-string alias under \"" + name + "\"");
      out.push_back(a.get<std::string>());
    }
  }
  try {
    return CultureLexicon(aliases);
  } catch (const Error& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
}

std::optional<std::size_t> CultureLexicon::find(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

std::size_t CultureLexicon::require(std::string_view name) const {
  auto idx = find(name);
  if (!idx) fail(ErrorCode::kInvalidArgument, "unknown culture \"" + std::string(name) + "\"");
  return *idx;
}

std::size_t CultureLexicon::longest_alias() const {
  std::size_t longest = 0;
  for (const auto& list : aliases_) {
    for (const auto& q : list) longest = std::max(longest, q.token_len());
  }
  return longest;
}

void RelevanceConfig::validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    fail(ErrorCode::kInvalidArgument, "epsilon must be a positive finite number");
  }
  if (!(snr_low < 0.0)) fail(ErrorCode::kInvalidArgument, "snr_low must be negative");
}

const char* to_string(RelevanceKind kind) {
  switch (kind) {
    case RelevanceKind::kGlobal:
      return "global";
    case RelevanceKind::kLocal:
      return "local";
    case RelevanceKind::kNotContributory:
      return "not_contributory";
  }
  return "unknown";
}

namespace {

// Sweep in order of first token: the nearest earlier occurrence of the other
// kind is the one reaching furthest right.
std::optional<std::size_t> min_interval_gap(std::span<const Occurrence> a, std::span<const Occurrence> b) {
  if (a.empty() || b.empty()) return std::nullopt;
  std::optional<std::uint32_t> reach[2];
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    const bool take_a = j >= b.size() || (i < a.size() && a[i].first <= b[j].first);
    const Occurrence& x = take_a ? a[i++] : b[j++];
    const int self = take_a ? 0 : 1;
    if (const auto& other = reach[1 - self]) {
      if (*other >= x.first) return 0;
      best = std::min<std::size_t>(best, x.first - *other);
    }
    reach[self] = reach[self] ? std::max(*reach[self], x.last) : x.last;
  }
  return best;
}

std::vector<Occurrence> to_occurrences(std::span<const std::uint32_t> starts, std::size_t len) {
  std::vector<Occurrence> out;
  out.reserve(starts.size());
  for (std::uint32_t s : starts) out.push_back({s, static_cast<std::uint32_t>(s + len - 1)});
  return out;
}

std::vector<Occurrence> find_occurrences(const Index& index, DocIndex doc, const NgramQuery& q) {
  return to_occurrences(index.positions_in(doc, q), q.token_len());
}

Index single_doc_index(const Document& doc, const NgramQuery& a, const NgramQuery& b) {
  IndexOptions options;
  options.max_ngram_len = std::max({std::size_t{1}, a.token_len(), b.token_len()});
  return Index::build(std::span<const Document>(&doc, 1), options);
}

}  // namespace

std::optional<std::size_t> min_token_distance(std::span<const Occurrence> a, std::span<const Occurrence> b) {
  return min_interval_gap(a, b);
}

std::optional<std::size_t> min_sentence_distance(std::span<const Occurrence> a, std::span<const Occurrence> b,
                                                 std::span<const std::uint32_t> sentence_of_token) {
  auto to_sentences = [&](std::span<const Occurrence> occ) {
    std::vector<Occurrence> out;
    out.reserve(occ.size());
    for (const Occurrence& o : occ) out.push_back({sentence_of_token[o.first], sentence_of_token[o.last]});
    return out;
  };
  const auto sa = to_sentences(a);
  const auto sb = to_sentences(b);
  return min_interval_gap(sa, sb);
}

std::optional<std::size_t> min_token_distance(const Index& index, DocIndex doc, const NgramQuery& culture_alias,
                                              const NgramQuery& symbol) {
  return min_token_distance(find_occurrences(index, doc, culture_alias), find_occurrences(index, doc, symbol));
}

std::optional<std::size_t> min_sentence_distance(const Index& index, DocIndex doc, const NgramQuery& culture_alias,
                                                 const NgramQuery& symbol) {
  return min_sentence_distance(find_occurrences(index, doc, culture_alias), find_occurrences(index, doc, symbol),
                               index.doc_sentences(doc));
}

std::optional<std::size_t> min_token_distance(const Document& doc, const NgramQuery& culture_alias,
                                              const NgramQuery& symbol) {
  const Index index = single_doc_index(doc, culture_alias, symbol);
  return min_token_distance(index, 0, culture_alias, symbol);
}

std::optional<std::size_t> min_sentence_distance(const Document& doc, const NgramQuery& culture_alias,
                                                 const NgramQuery& symbol) {
  const Index index = single_doc_index(doc, culture_alias, symbol);
  return min_sentence_distance(index, 0, culture_alias, symbol);
}

double d_snr(std::uint64_t target_mentions, std::uint64_t other_mentions, double epsilon) {
  if (!(epsilon > 0.0)) fail(ErrorCode::kInvalidArgument, "epsilon must be positive");
  if (target_mentions == 0) return -std::numeric_limits<double>::infinity();
  return std::log2(static_cast<double>(target_mentions) / (static_cast<double>(other_mentions) + epsilon));
}

RelevanceKind classify_metrics(const RelevanceMetrics& m, const RelevanceConfig& config) {
  if (m.d_tok && *m.d_tok <= config.max_seq_len && m.d_snr >= 0.0) return RelevanceKind::kGlobal;
  if (m.d_sent && *m.d_sent <= config.sent_threshold && m.d_snr >= config.snr_low && m.d_snr < 0.0) {
    return RelevanceKind::kLocal;
  }
  return RelevanceKind::kNotContributory;
}

CultureMatcher::CultureMatcher(const Index& index, const CultureLexicon& lexicon) : index_(&index) {
  for (std::size_t c = 0; c < lexicon.size(); ++c) {
    for (const NgramQuery& alias : lexicon.aliases(c)) {
      auto ids = index.resolve(alias);
      if (!ids) continue;
      by_first_term_[ids->front()].push_back({std::move(*ids), static_cast<std::uint32_t>(c)});
    }
  }
  for (auto& [term, list] : by_first_term_) {
    std::stable_sort(list.begin(), list.end(),
                     [](const Alias& x, const Alias& y) { return x.terms.size() > y.terms.size(); });
  }
}

std::vector<Mention> CultureMatcher::scan(DocIndex doc) const {
  std::vector<Mention> out;
  const auto terms = index_->doc_terms(doc);
  std::size_t pos = 0;
  while (pos < terms.size()) {
    auto it = by_first_term_.find(terms[pos]);
    std::size_t matched = 0;
    if (it != by_first_term_.end()) {
      for (const Alias& alias : it->second) {
        const std::size_t len = alias.terms.size();
        if (pos + len <= terms.size() && std::equal(alias.terms.begin(), alias.terms.end(), terms.begin() + pos)) {
          out.push_back({alias.culture, {static_cast<std::uint32_t>(pos), static_cast<std::uint32_t>(pos + len - 1)}});
          matched = len;
          break;
        }
      }
    }
    pos += matched > 0 ? matched : 1;
  }
  return out;
}

DocumentClassifier::DocumentClassifier(const Index& index, const CultureLexicon& lexicon, RelevanceConfig config,
                                       std::size_t threads)
    : index_(&index), lexicon_(&lexicon), config_(config) {
  config_.validate();
  const CultureMatcher matcher(index, lexicon);
  mentions_.resize(index.doc_count());
  parallel_for(index.doc_count(), threads,
               [&](std::size_t d) { mentions_[d] = matcher.scan(static_cast<DocIndex>(d)); });
  docs_by_culture_.resize(lexicon.size());
  for (DocIndex d = 0; d < mentions_.size(); ++d) {
    for (const Mention& m : mentions_[d]) {
      auto& docs = docs_by_culture_[m.culture];
      if (docs.empty() || docs.back() != d) docs.push_back(d);
    }
  }
}

RelevanceMetrics DocumentClassifier::metrics(DocIndex doc, std::size_t culture, std::span<const TermId> symbol) const {
  RelevanceMetrics m;
  std::uint64_t target = 0;
  std::uint64_t others = 0;
  std::vector<Occurrence> culture_occ;
  for (const Mention& mention : mentions_.at(doc)) {
    if (mention.culture == culture) {
      ++target;
      culture_occ.push_back(mention.span);
    } else {
      ++others;
    }
  }
  m.d_snr = d_snr(target, others, config_.epsilon);
  if (target == 0 || symbol.empty()) return m;
  const auto symbol_occ = to_occurrences(index_->positions_in(doc, symbol), symbol.size());
  m.d_tok = min_token_distance(culture_occ, symbol_occ);
  m.d_sent = min_sentence_distance(culture_occ, symbol_occ, index_->doc_sentences(doc));
  return m;
}

RelevanceVerdict DocumentClassifier::classify(DocIndex doc, std::size_t culture, std::span<const TermId> symbol) const {
  RelevanceVerdict v;
  v.metrics = metrics(doc, culture, symbol);
  v.kind = classify_metrics(v.metrics, config_);
  return v;
}

RelevanceVerdict DocumentClassifier::classify(DocIndex doc, std::size_t culture, const NgramQuery& symbol) const {
  auto ids = index_->resolve(symbol);
  RelevanceVerdict v;
  if (!ids) {
    v.metrics = metrics(doc, culture, {});
    v.kind = RelevanceKind::kNotContributory;
    return v;
  }
  return classify(doc, culture, *ids);
}

std::vector<DocIndex> DocumentClassifier::cooccurrence_docs(std::size_t culture, const NgramQuery& symbol) const {
  const auto symbol_docs = index_->docs_containing(symbol);
  const auto& culture_docs = docs_mentioning(culture);
  std::vector<DocIndex> out;
  std::set_intersection(culture_docs.begin(), culture_docs.end(), symbol_docs.begin(), symbol_docs.end(),
                        std::back_inserter(out));
  return out;
}

}  // namespace memoed
