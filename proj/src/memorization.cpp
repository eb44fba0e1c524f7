#include "memoed/memorization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

#include "memoed/error.hpp"
#include "parallel.hpp"

namespace memoed {

std::vector<GenerationRecord> read_generations(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::kNotFound, "generations file not found: " + path.string());
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open generations file: " + path.string());
  std::vector<GenerationRecord> out;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_number) + ": ";
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorCode::kFormat, where + "malformed JSON: " + e.what());
    }
    auto str_field = [&](const char* key) {
      auto it = obj.find(key);
      if (it == obj.end() || !it->is_string()) fail(ErrorCode::kFormat, where + "missing string field \"" + key + "\"");
      return it->get<std::string>();
    };
    if (!obj.is_object()) fail(ErrorCode::kFormat, where + "expected a JSON object");
    GenerationRecord rec;
    rec.generation_id = str_field("generation_id");
    rec.culture = str_field("culture");
    rec.topic = str_field("topic");
    auto symbols = obj.find("symbols");
    if (symbols == obj.end() || !symbols->is_array()) fail(ErrorCode::kFormat, where + "missing array \"symbols\"");
    for (const auto& s : *symbols) {
      if (!s.is_string()) fail(ErrorCode::kFormat, where + "non-string symbol");
      try {
        rec.symbols.push_back(make_query(s.get<std::string>()).surface);
      } catch (const Error&) {
        fail(ErrorCode::kFormat, where + "empty symbol");
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::string> unknown_cultures(const std::vector<GenerationRecord>& generations,
                                          const CultureLexicon& lexicon) {
  std::set<std::string> unknown;
  for (const auto& g : generations) {
    if (!lexicon.find(g.culture)) unknown.insert(g.culture);
  }
  return {unknown.begin(), unknown.end()};
}

std::map<SymbolKey, std::set<std::string>> generating_cultures(const std::vector<GenerationRecord>& generations) {
  std::map<SymbolKey, std::set<std::string>> out;
  for (const auto& g : generations) {
    for (const auto& s : g.symbols) out[{g.topic, s}].insert(g.culture);
  }
  return out;
}

const CultureScore* ContributionDistribution::find(std::string_view culture) const {
  auto it = std::lower_bound(per_culture.begin(), per_culture.end(), culture,
                             [](const CultureScore& s, std::string_view c) { return s.culture < c; });
  if (it == per_culture.end() || it->culture != culture) return nullptr;
  return &*it;
}

const char* to_string(MemorizationRule rule) {
  switch (rule) {
    case MemorizationRule::kNone:
      return "none";
    case MemorizationRule::kZScore:
      return "zscore";
    case MemorizationRule::kSmallSampleFallback:
      return "small_sample_fallback";
  }
  return "none";
}

MemorizationRule parse_memorization_rule(std::string_view text) {
  if (text == "none") return MemorizationRule::kNone;
  if (text == "zscore") return MemorizationRule::kZScore;
  if (text == "small_sample_fallback") return MemorizationRule::kSmallSampleFallback;
  fail(ErrorCode::kFormat, "unknown memorization rule \"" + std::string(text) + "\"");
}

void MemorizationConfig::validate() const {
  if (!std::isfinite(z_threshold)) fail(ErrorCode::kInvalidArgument, "z_threshold must be finite");
}

ContributionCount contribution_score(const DocumentClassifier& classifier, const NgramQuery& symbol,
                                     std::size_t culture) {
  if (culture >= classifier.lexicon().size()) fail(ErrorCode::kInvalidArgument, "unknown culture ordinal");
  ContributionCount out;
  const auto ids = classifier.index().resolve(symbol);
  if (!ids) return out;
  out.n_symbol_docs = classifier.index().count(symbol).doc_freq;
  for (DocIndex d : classifier.cooccurrence_docs(culture, symbol)) {
    if (classifier.classify(d, culture, *ids).kind != RelevanceKind::kNotContributory) ++out.n_contributory;
  }
  if (out.n_symbol_docs > 0) {
    out.cs = static_cast<double>(out.n_contributory) / static_cast<double>(out.n_symbol_docs);
  }
  return out;
}

void assign_zscores(std::vector<CultureScore>& scores) {
  double total = 0.0;
  for (const auto& s : scores) total += s.cs;
  for (auto& s : scores) {
    s.share = total > 0.0 ? s.cs / total : 0.0;
    s.z.reset();
  }
  const bool flat = std::all_of(scores.begin(), scores.end(),
                                [&](const CultureScore& s) { return s.cs == scores.front().cs; });
  if (scores.size() < 2 || flat) return;
  const double n = static_cast<double>(scores.size());
  const double mean = total / n;
  double ss = 0.0;
  for (const auto& s : scores) ss += (s.cs - mean) * (s.cs - mean);
  const double sd = std::sqrt(ss / n);
  if (sd > 0.0) {
    for (auto& s : scores) s.z = (s.cs - mean) / sd;
  }
}

ContributionDistribution score_distribution(std::string symbol, std::uint64_t n_symbol_docs,
                                            const std::vector<std::pair<std::string, std::uint64_t>>& contributory) {
  ContributionDistribution dist;
  dist.symbol = std::move(symbol);
  dist.n_symbol_docs = n_symbol_docs;
  for (const auto& [culture, n] : contributory) {
    CultureScore s;
    s.culture = culture;
    s.n_contributory = n;
    s.cs = n_symbol_docs > 0 ? static_cast<double>(n) / static_cast<double>(n_symbol_docs) : 0.0;
    dist.per_culture.push_back(std::move(s));
  }
  std::sort(dist.per_culture.begin(), dist.per_culture.end(),
            [](const CultureScore& a, const CultureScore& b) { return a.culture < b.culture; });

  assign_zscores(dist.per_culture);
  return dist;
}

ContributionDistribution build_distribution(const DocumentClassifier& classifier, const std::string& symbol,
                                            const std::set<std::string>& generating) {
  const NgramQuery query = make_query(symbol);
  std::vector<std::pair<std::string, std::uint64_t>> contributory;
  std::uint64_t n_symbol_docs = classifier.index().count(query).doc_freq;
  for (const auto& culture : generating) {
    const ContributionCount c = contribution_score(classifier, query, classifier.lexicon().require(culture));
    contributory.emplace_back(culture, c.n_contributory);
  }
  return score_distribution(query.surface, n_symbol_docs, contributory);
}

MemorizationVerdict classify_memorized(const ContributionDistribution& dist, const MemorizationConfig& config,
                                       std::size_t n_cultures) {
  MemorizationVerdict v;
  v.symbol = dist.symbol;
  const auto& scores = dist.per_culture;
  if (scores.size() > config.small_sample_cutoff) {
    for (const auto& s : scores) {
      if (s.z && *s.z >= config.z_threshold) v.memorized_for.push_back(s.culture);
    }
    if (!v.memorized_for.empty()) v.rule = MemorizationRule::kZScore;
    return v;
  }
  if (scores.empty() || n_cultures == 0) return v;
  // per_culture is name-sorted, so the first maximum wins ties lexicographically.
  const auto top = std::max_element(scores.begin(), scores.end(),
                                    [](const CultureScore& a, const CultureScore& b) { return a.cs < b.cs; });
  if (top->cs > 1.0 / static_cast<double>(n_cultures)) {
    v.memorized_for.push_back(top->culture);
    v.rule = MemorizationRule::kSmallSampleFallback;
  }
  return v;
}

std::vector<SymbolAttribution> attribute_symbols(const DocumentClassifier& classifier,
                                                 const std::vector<GenerationRecord>& generations,
                                                 const MemorizationConfig& config, std::size_t threads) {
  config.validate();
  const auto generating = generating_cultures(generations);
  std::vector<std::pair<SymbolKey, const std::set<std::string>*>> work;
  work.reserve(generating.size());
  for (const auto& [key, cultures] : generating) work.emplace_back(key, &cultures);

  std::vector<SymbolAttribution> out(work.size());
  parallel_for(work.size(), threads, [&](std::size_t i) {
    auto& slot = out[i];
    slot.key = work[i].first;
    slot.distribution = build_distribution(classifier, slot.key.symbol, *work[i].second);
    slot.verdict = classify_memorized(slot.distribution, config, classifier.lexicon().size());
  });
  std::sort(out.begin(), out.end(), [](const SymbolAttribution& a, const SymbolAttribution& b) {
    return std::tie(a.key.symbol, a.key.topic) < std::tie(b.key.symbol, b.key.topic);
  });
  return out;
}

}  // namespace memoed
