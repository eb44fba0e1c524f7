// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "golden_support.hpp"
#include "json.hpp"
#include "memoed/associations.hpp"
#include "memoed/error.hpp"
#include "memoed/memorization.hpp"
#include "memoed/pipeline.hpp"
#include "memoed/relevance.hpp"
#include "memoed/stats.hpp"
#include "memoed/topics.hpp"
#include "support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace memoed;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// A criterion returns an empty string on success, otherwise the reason.
using Check = std::function<std::string()>;

int failures = 0;

void run(int id, const std::string& name, const Check& check) {
  std::string reason;
  try {
    reason = check();
  } catch (const std::exception& e) {
    reason = std::string("exception: ") + e.what();
  }
  if (reason.empty()) {
    std::printf("PASS %d %s\n", id, name.c_str());
  } else {
    ++failures;
    std::printf("FAIL %d %s: %s\n", id, name.c_str(), reason.c_str());
  }
  std::fflush(stdout);
}

bool is_delimiter(const std::string& t) { return t == "." || t == "!" || t == "?"; }

// ---- 1 ----

std::string distance_oracle() {
  const auto start = Clock::now();
  const std::vector<std::string> words = {"rice", "tea", "silk", "japan", "japanese", "kimono", "a", "b",
                                          "c",    "d",   "e",    ".",     "!",        "?",      ","};
  std::mt19937_64 rng(2024);
  std::size_t compared = 0;
  for (int d = 0; d < 1000; ++d) {
    const std::size_t n = 1 + rng() % 5000;
    std::vector<std::string> tokens(n);
    std::string text;
    for (auto& t : tokens) {
      t = words[rng() % words.size()];
      text += t + ' ';
    }
    // Sentence of each token: a run of delimiters closes the sentence.
    std::vector<std::uint32_t> sentence(n);
    std::uint32_t sid = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && is_delimiter(tokens[i - 1]) && !is_delimiter(tokens[i])) ++sid;
      sentence[i] = sid;
    }
    auto random_phrase = [&] {
      std::vector<std::string> p(1 + rng() % 2);
      for (auto& w : p) w = words[rng() % 11];
      return p;
    };
    const auto pa = random_phrase();
    const auto pb = random_phrase();
    auto join = [](const std::vector<std::string>& p) {
      std::string s;
      for (const auto& w : p) s += (s.empty() ? "" : " ") + w;
      return s;
    };
    const Document doc{"d" + std::to_string(d), text, ""};
    const auto a = testing::naive_occurrences(tokens, pa);
    const auto b = testing::naive_occurrences(tokens, pb);
    const auto tok = min_token_distance(doc, make_query(join(pa)), make_query(join(pb)));
    const auto sent = min_sentence_distance(doc, make_query(join(pa)), make_query(join(pb)));
    if (tok != testing::oracle_token_distance(a, b)) return "token distance differs in doc " + std::to_string(d);
    if (sent != testing::oracle_sentence_distance(a, b, sentence)) {
      return "sentence distance differs in doc " + std::to_string(d);
    }
    if (tok) ++compared;
  }
  const double elapsed = seconds_since(start);
  if (compared < 500) return "too few documents with both phrases (" + std::to_string(compared) + ")";
  if (elapsed >= 30.0) return "took " + std::to_string(elapsed) + " s";
  return "";
}

// ---- 2 ----

RelevanceMetrics metrics(double snr, std::optional<std::size_t> tok, std::optional<std::size_t> sent) {
  RelevanceMetrics m;
  m.d_snr = snr;
  m.d_tok = tok;
  m.d_sent = sent;
  return m;
}

std::string figure_verdicts() {
  const RelevanceConfig cfg;
  struct Case {
    RelevanceMetrics m;
    RelevanceKind want;
    const char* label;
  };
  const std::vector<Case> cases = {
      {metrics(6.599, 4, 3), RelevanceKind::kGlobal, "(6.599, tok 4)"},
      {metrics(-0.982, 30, 0), RelevanceKind::kLocal, "(-0.982, sent 0)"},
      {metrics(5.584, 17, 3), RelevanceKind::kGlobal, "(5.584, tok 17)"},
      {metrics(-0.841, 30, 0), RelevanceKind::kLocal, "(-0.841, sent 0)"},
      {metrics(0.0, 10, 5), RelevanceKind::kGlobal, "snr 0"},
      {metrics(-1.0, 3000, 2), RelevanceKind::kLocal, "snr -1"},
      {metrics(-0.5, 3, 3), RelevanceKind::kNotContributory, "sent 3, snr -0.5"},
  };
  for (const auto& c : cases) {
    if (classify_metrics(c.m, cfg) != c.want) return std::string("wrong verdict for ") + c.label;
  }
  return "";
}

// ---- 3 and 6 ----

struct PlantedResult {
  std::string recovery;  // criterion 3
  std::string overshadow;  // criterion 6, planted half
};

std::string pair_letters(std::size_t i) {
  return std::string(1, static_cast<char>('a' + i / 26)) + static_cast<char>('a' + i % 26);
}

PlantedResult planted_corpus() {
  constexpr std::size_t kCultures = 30;
  constexpr std::size_t kSymbols = 50;
  constexpr std::size_t kPlanted = 10;
  constexpr std::size_t kDocs = 10000;
  const std::size_t diffuse_a = kSymbols - 2;
  const std::size_t diffuse_b = kSymbols - 1;

  std::vector<std::string> culture(kCultures);
  std::vector<std::string> demonym(kCultures);
  nlohmann::json lexicon = nlohmann::json::object();
  for (std::size_t c = 0; c < kCultures; ++c) {
    culture[c] = "Land" + pair_letters(c + 100);
    demonym[c] = pair_letters(c + 100) + "ish";
    lexicon[culture[c]] = {demonym[c], pair_letters(c + 100) + "land"};
  }
  std::vector<std::string> symbol(kSymbols);
  for (std::size_t s = 0; s < kSymbols; ++s) symbol[s] = pair_letters(s + 300) + "dish";

  const std::vector<std::string> filler = {"market", "evening", "family", "table", "recipe", "street", "friends",
                                           "kitchen", "served",  "warm",   "spicy", "sweet",  "plate",  "festival"};
  std::mt19937_64 rng(99);
  auto fill = [&](std::string& text, int n) {
    for (int i = 0; i < n; ++i) text += filler[rng() % filler.size()] + ' ';
  };
  std::vector<std::string> docs;
  auto four_cultures = [&](std::size_t first) {
    std::string t;
    std::set<std::size_t> used = {first};
    while (used.size() < 4) used.insert(rng() % kCultures);
    for (auto c : used) t += demonym[c] + " and ";
    return t;
  };

  std::map<std::size_t, std::set<std::size_t>> generators;
  std::set<std::pair<std::string, std::string>> planted;
  for (std::size_t s = 0; s < kPlanted; ++s) {
    const std::size_t owner = s * 3;
    planted.insert({symbol[s], culture[owner]});
    generators[s].insert(owner);
    while (generators[s].size() < 11) generators[s].insert(rng() % kCultures);
    for (int i = 0; i < 12; ++i) {
      std::string t;
      fill(t, 10);
      t += "the " + demonym[owner] + " " + symbol[s] + " . ";
      fill(t, 10);
      docs.push_back(t);
    }
    // Mentions next to other cultures that never pass either rule.
    for (auto c : generators[s]) {
      if (c == owner) continue;
      std::string t = four_cultures(c);
      fill(t, 5);
      t += symbol[s] + " .";
      docs.push_back(t);
    }
  }
  for (std::size_t s = kPlanted; s < diffuse_a; ++s) {
    const bool spread = s < 30;
    const std::size_t n_gen = spread ? 6 + rng() % 7 : 1 + rng() % 5;
    while (generators[s].size() < n_gen) generators[s].insert(rng() % kCultures);
    for (auto c : generators[s]) {
      // Spread symbols get one Global document per generating culture, so
      // their scores are flat; the rest only appear beside four cultures.
      std::string t = spread ? "the " + demonym[c] + " " + symbol[s] + " . " : four_cultures(c) + symbol[s] + " . ";
      fill(t, 8);
      docs.push_back(t);
    }
    for (int i = 0; i < 5; ++i) {
      std::string t = symbol[s] + " ";
      fill(t, 8);
      docs.push_back(t);
    }
  }
  for (std::size_t s : {diffuse_a, diffuse_b}) {
    while (generators[s].size() < 20) generators[s].insert(rng() % kCultures);
  }
  // Background: culture chatter without symbols, and diffuse symbols with no
  // culture nearby.
  for (int i = 0; i < 300; ++i) {
    std::string t = demonym[rng() % kCultures] + " ";
    fill(t, 15);
    docs.push_back(t);
  }
  while (docs.size() < kDocs) {
    std::string t;
    fill(t, 6);
    for (int k = 0; k < 3; ++k) t += symbol[diffuse_a] + " " + symbol[diffuse_b] + " ";
    fill(t, 6);
    docs.push_back(t);
  }

  testing::TempDir dir;
  {
    std::ofstream out(dir / "corpus.jsonl");
    for (std::size_t i = 0; i < docs.size(); ++i) {
      out << nlohmann::json{{"id", "doc" + std::to_string(i)}, {"text", docs[i]}}.dump() << '\n';
    }
    std::ofstream(dir / "cultures.json") << lexicon.dump();
    std::ofstream gens(dir / "generations.jsonl");
    for (const auto& [s, cs] : generators) {
      for (auto c : cs) {
        gens << nlohmann::json{{"generation_id", symbol[s] + "-" + culture[c]},
                               {"culture", culture[c]},
                               {"topic", "food"},
                               {"symbols", {symbol[s]}}}
                    .dump()
             << '\n';
      }
    }
  }

  RunConfig cfg;
  cfg.corpus = dir / "corpus.jsonl";
  cfg.cultures = dir / "cultures.json";
  cfg.generations = dir / "generations.jsonl";
  cfg.out_dir = dir / "out";
  cfg.threads = 1;
  const auto start = Clock::now();
  run_index(cfg);
  run_classify(cfg);
  const double elapsed = seconds_since(start);
  run_label(cfg);

  PlantedResult result;
  std::set<std::pair<std::string, std::string>> found;
  std::istringstream memorized(testing::read_file(cfg.out_dir / "memorized.csv"));
  std::string line;
  std::getline(memorized, line);
  bool low_z = false;
  while (std::getline(memorized, line)) {
    const auto f = csv::split_row(line, "memorized.csv: ");
    // symbol,topic,culture,n_contributory,n_symbol_docs,cs,z,rule
    if (f.at(7) == "none") continue;
    found.insert({f[0], f[2]});
    if (f[7] != "zscore" || f[6].empty() || std::stod(f[6]) < 2.6) low_z = true;
  }
  if (found != planted) {
    result.recovery = "recovered " + std::to_string(found.size()) + " pairs, planted " + std::to_string(planted.size());
  } else if (low_z) {
    result.recovery = "a recovered pair lacks z >= 2.6";
  } else if (elapsed >= 60.0) {
    result.recovery = "took " + std::to_string(elapsed) + " s";
  }

  std::istringstream over(testing::read_file(cfg.out_dir / "overshadowing.csv"));
  std::getline(over, line);
  std::set<std::string> diffuse_seen;
  while (std::getline(over, line)) {
    const auto f = csv::split_row(line, "overshadowing.csv: ");
    diffuse_seen.insert(f.at(1));
    if (f.at(4).empty() || std::stod(f[4]) < 1000.0) result.overshadow = f[1] + " has r " + f[4];
  }
  if (result.overshadow.empty() && diffuse_seen != std::set<std::string>{symbol[diffuse_a], symbol[diffuse_b]}) {
    result.overshadow = "unexpected diffuse set (" + std::to_string(diffuse_seen.size()) + " symbols)";
  }
  return result;
}

// ---- 4 ----

ContributionDistribution distribution(const std::vector<double>& cs) {
  ContributionDistribution d;
  d.symbol = "s";
  for (std::size_t i = 0; i < cs.size(); ++i) d.per_culture.push_back({"c" + std::to_string(i), 0, cs[i], std::nullopt, 0.0});
  assign_zscores(d.per_culture);
  return d;
}

std::string small_sample() {
  const MemorizationConfig cfg;
  const auto yes = classify_memorized(distribution({0.2, 0.05, 0.0}), cfg, 110);
  if (yes.memorized_for != std::vector<std::string>{"c0"} || yes.rule != MemorizationRule::kSmallSampleFallback) {
    return "top cs 0.2 not selected";
  }
  const auto no = classify_memorized(distribution({0.005, 0.001, 0.0}), cfg, 110);
  if (!no.memorized_for.empty()) return "top cs 0.005 selected with N = 110";
  return "";
}

// ---- 5 ----

std::string diffuse_threshold_check() {
  if (!classify_diffuse(55, 110, false)) return "55 of 110 not diffuse";
  if (classify_diffuse(54, 110, false)) return "54 of 110 diffuse";
  return "";
}

// ---- 6 ----

std::string overshadow_constructed() {
  const std::vector<std::uint64_t> counts = {10, 100};
  const auto r = overshadowing_ratio(10000, counts);
  if (r.r != 550.0) return "r = " + format_real(r.r);
  return "";
}

// ---- 7 ----

std::string correlation_oracles() {
  std::mt19937_64 rng(77);
  int checked = 0;
  while (checked < 100) {
    const std::size_t n = 2 + rng() % 49;
    const auto levels = 2 + rng() % 10;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = static_cast<double>(rng() % levels);
    for (auto& v : y) v = static_cast<double>(rng() % levels);
    auto flat = [](const std::vector<double>& v) { return std::ranges::all_of(v, [&](double a) { return a == v[0]; }); };
    if (flat(x) || flat(y)) continue;
    ++checked;
    if (std::abs(spearman(x, y) - testing::oracle_spearman(x, y)) > 1e-12) return "spearman differs from oracle";
    if (std::abs(kendall_tau(x, y) - testing::oracle_kendall(x, y)) > 1e-12) return "kendall differs from oracle";
    std::vector<double> fx(n);
    for (std::size_t i = 0; i < n; ++i) fx[i] = std::exp(x[i]) * 3.0 - 1.0;
    if (average_ranks(fx) != average_ranks(x)) return "ranks change under a monotone transform";
    if (spearman(fx, y) != spearman(x, y) || kendall_tau(fx, y) != kendall_tau(x, y)) {
      return "correlation changes under a monotone transform";
    }
  }
  return "";
}

// ---- 8 ----

std::string weak_fixtures() {
  const std::vector<DefinitionRecord> defs = {
      {"kimono", "Japan", "A traditional Japanese garment: a wrapped-front robe with wide sleeves, tied with an obi."},
      {"salwar", "India", "Loose pleated trousers worn under a long loose top such as a kameez."},
  };
  const auto robe = trace_weak_from_memorized("robe", defs, 0.7);
  if (!robe || robe->symbol != "kimono" || robe->f1 < 0.7) return "robe does not trace to kimono";
  const auto top = trace_weak_from_memorized("long top", defs, 0.7);
  if (!top || top->symbol != "salwar" || top->f1 < 0.7) return "long top does not trace to salwar";
  if (trace_weak_from_memorized("pickled herring", defs, 0.7)) return "no-overlap candidate traced";
  return "";
}

// ---- 9 ----

LdaCorpus two_vocabularies(std::uint64_t seed) {
  const std::vector<std::string> a = {"silk", "sash", "sleeve", "robe", "obi", "kimono", "collar", "hem"};
  const std::vector<std::string> b = {"rice", "fish", "vinegar", "nori", "wasabi", "sushi", "broth", "noodle"};
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> docs;
  for (int d = 0; d < 60; ++d) {
    const auto& src = d % 2 == 0 ? a : b;
    std::vector<std::string> doc;
    for (int t = 0; t < 50; ++t) doc.push_back(src[rng() % src.size()]);
    docs.push_back(std::move(doc));
  }
  return make_lda_corpus(docs, {});
}

std::string lda_properties() {
  const auto corpus = two_vocabularies(5);
  LdaParams p;
  p.topics = 2;
  p.alpha = 0.1;
  p.iterations = 200;
  std::string conservation;
  const std::uint64_t n = corpus.token_count();
  const auto m = fit_lda(corpus, p, [&](const LdaModel& model, std::size_t sweep) {
    std::uint64_t words = 0, totals = 0, docs = 0;
    for (auto c : model.topic_word) words += c;
    for (auto c : model.topic_totals) totals += c;
    for (auto c : model.doc_topic) docs += c;
    if ((words != n || totals != n || docs != n) && conservation.empty()) {
      conservation = "counts not conserved at sweep " + std::to_string(sweep);
    }
  });
  if (!conservation.empty()) return conservation;
  const auto again = fit_lda(corpus, p);
  if (again.topic_word != m.topic_word || again.doc_topic != m.doc_topic || again.assignments != m.assignments) {
    return "rerun with the same seed differs";
  }

  const std::set<std::string> a = {"silk", "sash", "sleeve", "robe", "obi", "kimono", "collar", "hem"};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto phi = m.topic_word_distribution(k);
    double mass = 0;
    for (std::size_t w = 0; w < phi.size(); ++w) mass += a.contains(m.vocab[w]) ? phi[w] : 0.0;
    if (std::max(mass, 1.0 - mass) < 0.9) return "topic " + std::to_string(k) + " purity " + format_real(std::max(mass, 1.0 - mass));
  }

  LdaParams one = p;
  one.topics = 1;
  one.iterations = 10;
  const auto single = fit_lda(corpus, one);
  std::vector<double> counts(corpus.vocab.size(), 0.0);
  for (const auto& d : corpus.docs) {
    for (auto w : d) counts[w] += 1;
  }
  const double denom = static_cast<double>(n) + one.beta * static_cast<double>(counts.size());
  const auto phi = single.topic_word_distribution(0);
  double tv = 0;
  for (std::size_t w = 0; w < phi.size(); ++w) tv += std::abs(phi[w] - (counts[w] + one.beta) / denom);
  if (tv / 2 >= 1e-6) return "K=1 total variation " + format_real(tv / 2);
  return "";
}

// ---- 10 ----

std::string golden_pipeline() {
  testing::TempDir dir;
  const auto cfg = testing::mini_config(dir.path());
  const auto start = Clock::now();
  testing::run_all_stages(cfg);
  const double elapsed = seconds_since(start);
  for (auto name : testing::kGoldenFiles) {
    const std::string file(name);
    const std::string golden = testing::read_file(fs::path(MEMOED_GOLDEN_DIR) / file);
    if (golden.empty()) return "golden " + file + " is missing or empty";
    if (testing::read_file(dir / file) != golden) return file + " differs from golden";
  }
  if (elapsed >= 10.0) return "took " + std::to_string(elapsed) + " s";
  return "";
}

}  // namespace

int main() {
  std::optional<PlantedResult> planted;
  auto planted_once = [&]() -> const PlantedResult& {
    if (!planted) planted = planted_corpus();
    return *planted;
  };
  run(1, "distance oracle equivalence", distance_oracle);
  run(2, "figure-anchored verdicts", figure_verdicts);
  run(3, "planted memorization recovery", [&] { return planted_once().recovery; });
  run(4, "small-sample fallback", small_sample);
  run(5, "diffuse threshold", diffuse_threshold_check);
  run(6, "overshadowing ratio", [&] {
    const std::string constructed = overshadow_constructed();
    return constructed.empty() ? planted_once().overshadow : constructed;
  });
  run(7, "correlation oracles", correlation_oracles);
  run(8, "weak-association fixtures", weak_fixtures);
  run(9, "LDA properties", lda_properties);
  run(10, "golden pipeline", golden_pipeline);
  return failures == 0 ? 0 : 1;
}
