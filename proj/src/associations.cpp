#include "memoed/associations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <tuple>
#include <unordered_map>

#include "json.hpp"

#include "memoed/error.hpp"

namespace memoed {

const char* to_string(AssociationKind kind) {
  switch (kind) {
    case AssociationKind::kMemorized:
      return "memorized";
    case AssociationKind::kCrossCulture:
      return "cross_culture";
    case AssociationKind::kDiffuse:
      return "diffuse";
    case AssociationKind::kWeakFromMemorized:
      return "weak_from_memorized";
    case AssociationKind::kWeakFromDiffuse:
      return "weak_from_diffuse";
    case AssociationKind::kUnclassified:
      return "unclassified";
  }
  return "unclassified";
}

AssociationKind parse_association_kind(std::string_view text) {
  for (AssociationKind k : kAllAssociationKinds) {
    if (text == to_string(k)) return k;
  }
  fail(ErrorCode::kFormat, "unknown association kind \"" + std::string(text) + "\"");
}

std::vector<DefinitionRecord> read_definitions(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(ErrorCode::kNotFound, "definitions file not found: " + path.string());
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open definitions file: " + path.string());
  std::vector<DefinitionRecord> out;
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
    if (!obj.is_object()) fail(ErrorCode::kFormat, where + "expected a JSON object");
    auto field = [&](const char* key) {
      auto it = obj.find(key);
      if (it == obj.end() || !it->is_string()) fail(ErrorCode::kFormat, where + "missing string field \"" + key + "\"");
      return it->get<std::string>();
    };
    DefinitionRecord rec;
    try {
      rec.symbol = make_query(field("symbol")).surface;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInvalidArgument) throw;
      fail(ErrorCode::kFormat, where + "empty symbol");
    }
    rec.culture = field("culture");
    rec.definition_text = field("definition");
    if (rec.definition_text.find_first_not_of(" \t\r\n") == std::string::npos) {
      fail(ErrorCode::kFormat, where + "empty definition");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<SymbolVerdict> to_symbol_verdicts(const std::vector<SymbolAttribution>& attributions,
                                              const std::vector<GenerationRecord>& generations) {
  const auto generating = generating_cultures(generations);
  std::vector<SymbolVerdict> out;
  out.reserve(attributions.size());
  for (const auto& a : attributions) {
    SymbolVerdict v;
    v.key = a.key;
    if (auto it = generating.find(a.key); it != generating.end()) v.generating = it->second;
    for (const auto& s : a.distribution.per_culture) {
      v.cs[s.culture] = s.cs;
      v.generating.insert(s.culture);
    }
    v.memorized_for.insert(a.verdict.memorized_for.begin(), a.verdict.memorized_for.end());
    v.rule = a.verdict.rule;
    out.push_back(std::move(v));
  }
  return out;
}

void AssociationConfig::validate() const {
  if (!(diffuse_ratio > 0.0 && diffuse_ratio <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "diffuse_ratio must be in (0, 1]");
  }
  if (!(f1_threshold > 0.0 && f1_threshold <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "f1_threshold must be in (0, 1]");
  }
}

std::size_t diffuse_threshold(std::size_t n_cultures, double diffuse_ratio) {
  return static_cast<std::size_t>(std::ceil(static_cast<double>(n_cultures) * diffuse_ratio - 1e-12));
}

bool classify_diffuse(std::size_t n_generating, std::size_t n_cultures, bool memorized_anywhere,
                      double diffuse_ratio) {
  return !memorized_anywhere && n_generating >= diffuse_threshold(n_cultures, diffuse_ratio);
}

OvershadowResult overshadowing_ratio(std::uint64_t diffuse_count, std::span<const std::uint64_t> memorized_counts) {
  if (memorized_counts.empty()) {
    fail(ErrorCode::kInvalidArgument, "overshadowing ratio needs at least one memorized symbol");
  }
  OvershadowResult out;
  double sum = 0.0;
  for (std::uint64_t c : memorized_counts) {
    if (c == 0) out.smoothed = true;
    sum += static_cast<double>(diffuse_count) / static_cast<double>(std::max<std::uint64_t>(c, 1));
  }
  out.r = sum / static_cast<double>(memorized_counts.size());
  return out;
}

OvershadowResult overshadowing_ratio(const std::string& diffuse_symbol, const std::set<std::string>& memorized_symbols,
                                     const std::map<std::string, std::uint64_t>& counts) {
  auto lookup = [&](const std::string& s) -> std::uint64_t {
    auto it = counts.find(s);
    return it == counts.end() ? 0 : it->second;
  };
  std::vector<std::uint64_t> memorized;
  memorized.reserve(memorized_symbols.size());
  for (const auto& s : memorized_symbols) memorized.push_back(lookup(s));
  return overshadowing_ratio(lookup(diffuse_symbol), memorized);
}

std::optional<std::string> detect_cross_culture(const std::string& culture, const SymbolVerdict& verdict) {
  if (verdict.memorized_for.contains(culture)) return std::nullopt;
  std::optional<std::string> best;
  double best_cs = -1.0;
  for (const auto& source : verdict.memorized_for) {
    auto it = verdict.cs.find(source);
    const double cs = it == verdict.cs.end() ? 0.0 : it->second;
    if (cs > best_cs) {
      best = source;
      best_cs = cs;
    }
  }
  return best;
}

namespace {

std::vector<std::string> content_tokens(std::string_view text) {
  const std::string folded = fold_case(text);
  std::vector<std::string> out;
  for (const TokenSpan& t : tokenize(folded)) {
    std::string tok = folded.substr(t.byte_start, t.byte_end - t.byte_start);
    if (!is_punctuation_token(tok)) out.push_back(std::move(tok));
  }
  return out;
}

std::vector<std::string> all_tokens(std::string_view text) {
  const std::string folded = fold_case(text);
  std::vector<std::string> out;
  for (const TokenSpan& t : tokenize(folded)) out.push_back(folded.substr(t.byte_start, t.byte_end - t.byte_start));
  return out;
}

bool contains_run(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

}  // namespace

double best_window_f1(std::span<const std::string> candidate, std::span<const std::string> definition) {
  if (candidate.empty() || definition.empty()) return 0.0;
  std::unordered_map<std::string, int> bag;
  for (const auto& t : candidate) ++bag[t];

  const std::size_t len = candidate.size();
  const std::size_t min_w = std::max<std::size_t>(1, len - 1);
  const std::size_t max_w = std::min(definition.size(), len + 1);
  double best = 0.0;
  for (std::size_t w = min_w; w <= max_w; ++w) {
    for (std::size_t start = 0; start + w <= definition.size(); ++start) {
      std::unordered_map<std::string, int> remaining = bag;
      std::size_t overlap = 0;
      for (std::size_t i = start; i < start + w; ++i) {
        auto it = remaining.find(definition[i]);
        if (it != remaining.end() && it->second > 0) {
          --it->second;
          ++overlap;
        }
      }
      if (overlap == 0) continue;
      const double precision = static_cast<double>(overlap) / static_cast<double>(w);
      const double recall = static_cast<double>(overlap) / static_cast<double>(len);
      best = std::max(best, 2.0 * precision * recall / (precision + recall));
    }
  }
  return best;
}

std::optional<WeakTrace> trace_weak_from_memorized(const std::string& candidate,
                                                   std::span<const DefinitionRecord> definitions,
                                                   double f1_threshold) {
  if (!(f1_threshold > 0.0 && f1_threshold <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "f1_threshold must be in (0, 1]");
  }
  const auto cand = content_tokens(candidate);
  std::optional<WeakTrace> best;
  for (const auto& def : definitions) {
    const auto def_tokens = content_tokens(def.definition_text);
    const double f1 = best_window_f1(cand, def_tokens);
    if (f1 < f1_threshold) continue;
    const bool better = !best || f1 > best->f1 ||
                        (f1 == best->f1 && std::tie(def.symbol, def.culture) < std::tie(best->symbol, best->culture));
    if (better) best = WeakTrace{def.symbol, def.culture, f1};
  }
  return best;
}

std::optional<std::set<std::string>> trace_weak_from_diffuse(const std::string& candidate,
                                                             const std::set<std::string>& diffuse_symbols) {
  const auto cand = all_tokens(candidate);
  std::set<std::string> found;
  for (const auto& d : diffuse_symbols) {
    if (contains_run(cand, all_tokens(d))) found.insert(d);
  }
  if (found.empty()) return std::nullopt;
  return found;
}

namespace {

std::string format_symbol_culture(const std::string& symbol, const std::string& culture) {
  return symbol + " (" + culture + ")";
}

std::string join(const std::set<std::string>& items, const char* sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

}  // namespace

LabelingResult label_all(const std::vector<GenerationRecord>& generations, const std::vector<SymbolVerdict>& verdicts,
                         const std::vector<DefinitionRecord>& definitions, const AssociationConfig& config,
                         std::size_t n_cultures, const std::map<std::string, std::uint64_t>& counts) {
  config.validate();
  std::map<SymbolKey, const SymbolVerdict*> by_key;
  for (const auto& v : verdicts) by_key[v.key] = &v;

  std::map<std::string, std::set<std::string>> diffuse_by_topic;
  std::map<std::string, std::set<std::string>> memorized_by_topic;
  for (const auto& v : verdicts) {
    if (!v.memorized_for.empty()) memorized_by_topic[v.key.topic].insert(v.key.symbol);
    if (classify_diffuse(v.generating.size(), n_cultures, !v.memorized_for.empty(), config.diffuse_ratio)) {
      diffuse_by_topic[v.key.topic].insert(v.key.symbol);
    }
  }

  // Only definitions of symbols memorized for the defining culture, matched
  // within the same topic.
  std::map<std::string, std::vector<DefinitionRecord>> definitions_by_topic;
  for (const auto& def : definitions) {
    for (const auto& v : verdicts) {
      if (v.key.symbol == def.symbol && v.memorized_for.contains(def.culture)) {
        definitions_by_topic[v.key.topic].push_back(def);
      }
    }
  }

  LabelingResult result;
  for (const auto& [topic, diffuse] : diffuse_by_topic) {
    const auto mem = memorized_by_topic.find(topic);
    for (const auto& symbol : diffuse) {
      OvershadowEntry e;
      e.topic = topic;
      e.diffuse_symbol = symbol;
      if (auto it = counts.find(symbol); it != counts.end()) e.count = it->second;
      e.n_cultures_generated = by_key.at({topic, symbol})->generating.size();
      if (mem != memorized_by_topic.end()) {
        const OvershadowResult r = overshadowing_ratio(symbol, mem->second, counts);
        e.r = r.r;
        e.smoothed = r.smoothed;
      }
      result.overshadow.push_back(std::move(e));
    }
  }

  std::set<std::tuple<std::string, std::string, std::string>> pairs;
  for (const auto& g : generations) {
    for (const auto& s : g.symbols) pairs.emplace(g.culture, s, g.topic);
  }

  std::map<SymbolKey, const OvershadowEntry*> overshadow_by_key;
  for (const auto& e : result.overshadow) overshadow_by_key[{e.topic, e.diffuse_symbol}] = &e;

  static const std::set<std::string> kNone;
  static const std::vector<DefinitionRecord> kNoDefinitions;
  for (const auto& [culture, symbol, topic] : pairs) {
    AssociationLabel label{culture, topic, symbol, AssociationKind::kUnclassified, "", std::nullopt};
    auto vit = by_key.find({topic, symbol});
    if (vit == by_key.end()) {
      fail(ErrorCode::kState, "no memorization verdict for symbol \"" + symbol + "\" (" + topic + ")");
    }
    const SymbolVerdict& v = *vit->second;
    const auto& diffuse = diffuse_by_topic.contains(topic) ? diffuse_by_topic.at(topic) : kNone;

    if (v.memorized_for.contains(culture)) {
      label.kind = AssociationKind::kMemorized;
      label.evidence = to_string(v.rule);
      label.score = v.cs.contains(culture) ? v.cs.at(culture) : 0.0;
    } else if (auto source = detect_cross_culture(culture, v)) {
      label.kind = AssociationKind::kCrossCulture;
      label.evidence = *source;
      label.score = v.cs.contains(*source) ? v.cs.at(*source) : 0.0;
    } else if (diffuse.contains(symbol)) {
      label.kind = AssociationKind::kDiffuse;
      label.score = overshadow_by_key.at({topic, symbol})->r;
    } else if (auto trace = trace_weak_from_memorized(
                   symbol, definitions_by_topic.contains(topic) ? definitions_by_topic.at(topic) : kNoDefinitions,
                   config.f1_threshold)) {
      label.kind = AssociationKind::kWeakFromMemorized;
      label.evidence = format_symbol_culture(trace->symbol, trace->culture);
      label.score = trace->f1;
    } else if (auto parts = trace_weak_from_diffuse(symbol, diffuse)) {
      label.kind = AssociationKind::kWeakFromDiffuse;
      label.evidence = join(*parts, "|");
    }
    result.labels.push_back(std::move(label));
  }
  return result;
}

}  // namespace memoed
