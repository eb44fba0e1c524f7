#include "memoed/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "memoed/error.hpp"
#include "memoed/stats.hpp"
#include "memoed/topics.hpp"
#include "parallel.hpp"
#include "pipeline_io.hpp"

namespace memoed {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string> kMemorizedColumns = {"symbol", "topic", "culture", "n_contributory",
                                                    "n_symbol_docs", "cs", "z", "rule"};
const std::vector<std::string> kAssociationColumns = {"culture", "topic", "symbol", "kind", "evidence", "score"};

// ---- config ----------------------------------------------------------------

template <typename T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::kInvalidArgument, "config key \"" + key + "\" has the wrong type");
  }
}

std::size_t get_size(const json& value, const std::string& key) {
  if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
    fail(ErrorCode::kInvalidArgument, "config key \"" + key + "\" must be a nonnegative integer");
  }
  return value.get<std::size_t>();
}

double get_real(const json& value, const std::string& key) {
  if (!value.is_number()) fail(ErrorCode::kInvalidArgument, "config key \"" + key + "\" must be a number");
  return value.get<double>();
}

fs::path get_path(const json& value, const std::string& key, const fs::path& base_dir) {
  fs::path p = get_as<std::string>(value, key);
  if (p.empty() || p.is_absolute()) return p;
  return base_dir / p;
}

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
  fail(ErrorCode::kInvalidArgument, "unknown config key \"" + (section.empty() ? key : section + "." + key) + "\"");
}

const json& require_object(const json& value, const std::string& key) {
  if (!value.is_object()) fail(ErrorCode::kInvalidArgument, "config key \"" + key + "\" must be an object");
  return value;
}

void apply_relevance(RelevanceConfig& c, const json& obj) {
  for (const auto& [k, v] : require_object(obj, "relevance").items()) {
    if (k == "max_seq_len") c.max_seq_len = get_size(v, k);
    else if (k == "sent_threshold") c.sent_threshold = get_size(v, k);
    else if (k == "snr_low") c.snr_low = get_real(v, k);
    else if (k == "epsilon") c.epsilon = get_real(v, k);
    else unknown_key("relevance", k);
  }
}

void apply_memorization(MemorizationConfig& c, const json& obj) {
  for (const auto& [k, v] : require_object(obj, "memorization").items()) {
    if (k == "z_threshold") c.z_threshold = get_real(v, k);
    else if (k == "small_sample_cutoff") c.small_sample_cutoff = get_size(v, k);
    else unknown_key("memorization", k);
  }
}

void apply_associations(AssociationConfig& c, const json& obj) {
  for (const auto& [k, v] : require_object(obj, "associations").items()) {
    if (k == "diffuse_ratio") c.diffuse_ratio = get_real(v, k);
    else if (k == "f1_threshold") c.f1_threshold = get_real(v, k);
    else unknown_key("associations", k);
  }
}

void apply_lda(LdaSettings& c, const json& obj) {
  for (const auto& [k, v] : require_object(obj, "lda").items()) {
    if (k == "topics") c.topics = get_size(v, k);
    else if (k == "alpha") c.alpha = v.is_null() ? std::nullopt : std::optional<double>(get_real(v, k));
    else if (k == "beta") c.beta = get_real(v, k);
    else if (k == "iterations") c.iterations = get_size(v, k);
    else if (k == "window") c.window = get_size(v, k);
    else if (k == "stride") c.stride = get_size(v, k);
    else if (k == "top_words") c.top_words = get_size(v, k);
    else if (k == "keywords") c.keywords = get_size(v, k);
    else if (k == "dump_topics") c.dump_topics = get_as<bool>(v, k);
    else if (k == "interpret_command") c.interpret_command = get_as<std::string>(v, k);
    else unknown_key("lda", k);
  }
}

// ---- shared loading --------------------------------------------------------

std::size_t worker_count(const RunConfig& config) {
  if (config.threads > 0) return config.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

void require_file(const fs::path& path, const std::string& what) {
  if (path.empty()) fail(ErrorCode::kInvalidArgument, "no " + what + " path configured");
  if (!fs::exists(path)) fail(ErrorCode::kNotFound, what + " not found: " + path.string());
}

fs::path prepare_out_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create output directory " + config.out_dir.string() + ": " + ec.message());
  return config.out_dir;
}

Index load_index(const RunConfig& config) {
  const fs::path path = config.resolved_index_path();
  if (!fs::exists(path)) fail(ErrorCode::kNotFound, path.string() + " not found; run `memoed index` first");
  return Index::load(path);
}

CultureLexicon load_lexicon(const RunConfig& config) {
  require_file(config.cultures, "cultures file");
  CultureLexicon lexicon = CultureLexicon::load(config.cultures);
  for (const auto& name : config.exclude_cultures) {
    if (!lexicon.find(name)) fail(ErrorCode::kInvalidArgument, "excluded culture \"" + name + "\" is not in the lexicon");
  }
  return lexicon;
}

bool excluded(const RunConfig& config, const std::string& culture) {
  return std::find(config.exclude_cultures.begin(), config.exclude_cultures.end(), culture) !=
         config.exclude_cultures.end();
}

// Cultures taking part in the analysis. Excluded cultures stay in the lexicon
// so their mentions still count as "other" mentions.
std::size_t active_culture_count(const RunConfig& config, const CultureLexicon& lexicon) {
  return lexicon.size() - config.exclude_cultures.size();
}

std::vector<GenerationRecord> load_generations(const RunConfig& config, const CultureLexicon& lexicon) {
  require_file(config.generations, "generations file");
  auto generations = read_generations(config.generations);
  std::erase_if(generations, [&](const GenerationRecord& g) { return excluded(config, g.culture); });
  const auto unknown = unknown_cultures(generations, lexicon);
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    fail(ErrorCode::kInvalidArgument, "generations reference cultures missing from the lexicon: " + list);
  }
  return generations;
}

std::uint64_t parse_u64(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used == s.size() && !s.empty() && s[0] != '-') return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kFormat, where + "invalid count \"" + s + "\"");
}

double parse_real(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kFormat, where + "invalid number \"" + s + "\"");
}

std::vector<SymbolAttribution> read_memorized(const RunConfig& config) {
  const auto file = io::read_upstream_csv(config.out_dir / "memorized.csv", kMemorizedColumns, "classify");
  std::map<SymbolKey, SymbolAttribution> by_key;
  std::size_t row_no = 1;
  for (const auto& r : file.rows) {
    const std::string where = file.path.string() + ": row " + std::to_string(++row_no) + ": ";
    SymbolKey key{r[1], r[0]};
    auto& a = by_key[key];
    a.key = key;
    a.distribution.symbol = r[0];
    a.distribution.n_symbol_docs = parse_u64(r[4], where);
    CultureScore s;
    s.culture = r[2];
    s.n_contributory = parse_u64(r[3], where);
    s.cs = parse_real(r[5], where);
    if (!r[6].empty()) s.z = parse_real(r[6], where);
    a.distribution.per_culture.push_back(std::move(s));
    const MemorizationRule rule = parse_memorization_rule(r[7]);
    if (rule != MemorizationRule::kNone) {
      a.verdict.memorized_for.push_back(r[2]);
      a.verdict.rule = rule;
    }
    a.verdict.symbol = r[0];
  }
  std::vector<SymbolAttribution> out;
  for (auto& [key, a] : by_key) out.push_back(std::move(a));
  return out;
}

std::vector<AssociationLabel> read_associations(const RunConfig& config) {
  const auto file = io::read_upstream_csv(config.out_dir / "associations.csv", kAssociationColumns, "label");
  std::vector<AssociationLabel> out;
  std::size_t row_no = 1;
  for (const auto& r : file.rows) {
    const std::string where = file.path.string() + ": row " + std::to_string(++row_no) + ": ";
    AssociationLabel l;
    l.culture = r[0];
    l.topic = r[1];
    l.symbol = r[2];
    l.kind = parse_association_kind(r[3]);
    l.evidence = r[4];
    if (!r[5].empty()) l.score = parse_real(r[5], where);
    out.push_back(std::move(l));
  }
  return out;
}

io::Cell optional_real(const std::optional<double>& v) {
  if (!v) return std::monostate{};
  return *v;
}

// ---- topics helpers --------------------------------------------------------

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  return out + "'";
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

std::string run_interpret_hook(const std::string& tmpl, const KeywordReport& report) {
  std::string keywords;
  for (const auto& k : report.keywords) keywords += (keywords.empty() ? "" : " ") + k.term;
  std::string cmd = tmpl;
  cmd = replace_all(cmd, "{symbol}", shell_quote(report.symbol));
  cmd = replace_all(cmd, "{culture_a}", shell_quote(report.culture_a));
  cmd = replace_all(cmd, "{culture_b}", shell_quote(report.culture_b));
  cmd = replace_all(cmd, "{keywords}", shell_quote(keywords));
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) fail(ErrorCode::kIo, "cannot run interpret command");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = ::pclose(pipe);
  if (status != 0) fail(ErrorCode::kIo, "interpret command exited with status " + std::to_string(status));
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return out;
}

struct TopicCase {
  std::string topic;
  std::string symbol;
  std::string culture_a;  // memorizing culture
  std::string culture_b;  // culture the symbol was generated for

  auto operator<=>(const TopicCase&) const = default;
};

}  // namespace

// ---- RunConfig ---------------------------------------------------------------

std::map<std::string, std::vector<std::string>> RunConfig::default_topic_keywords() {
  return {
      {"food",
       {"food", "foods", "cuisine", "cuisines", "dish", "dishes", "meal", "meals", "recipe", "recipes", "menu",
        "menus", "breakfast", "lunch", "dinner", "snack", "snacks"}},
      {"clothing",
       {"clothing", "clothes", "apparel", "garment", "garments", "outfit", "outfits", "attire", "attires", "dress",
        "dresses", "suit", "suits", "uniform", "uniforms"}},
  };
}

void RunConfig::apply_json(std::string_view json_text, const fs::path& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::kFormat, std::string("malformed config JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(ErrorCode::kFormat, "config must be a JSON object");
  for (const auto& [k, v] : doc.items()) {
    if (k == "corpus") corpus = get_path(v, k, base_dir);
    else if (k == "cultures") cultures = get_path(v, k, base_dir);
    else if (k == "generations") generations = get_path(v, k, base_dir);
    else if (k == "definitions") definitions = get_path(v, k, base_dir);
    else if (k == "external_counts") external_counts = v.is_null() ? std::nullopt : std::optional(get_path(v, k, base_dir));
    else if (k == "stopwords_file") stopwords_file = v.is_null() ? std::nullopt : std::optional(get_path(v, k, base_dir));
    else if (k == "index_path") index_path = v.is_null() ? std::nullopt : std::optional(get_path(v, k, base_dir));
    else if (k == "out_dir") out_dir = get_path(v, k, base_dir);
    else if (k == "threads") threads = get_size(v, k);
    else if (k == "seed") seed = get_as<std::uint64_t>(v, k);
    else if (k == "force") force = get_as<bool>(v, k);
    else if (k == "json") json = get_as<bool>(v, k);
    else if (k == "topic_filter") topic_filter = get_as<bool>(v, k);
    else if (k == "max_ngram_len") max_ngram_len = get_size(v, k);
    else if (k == "relevance") apply_relevance(relevance, v);
    else if (k == "memorization") apply_memorization(memorization, v);
    else if (k == "associations") apply_associations(associations, v);
    else if (k == "lda") apply_lda(lda, v);
    else if (k == "topic_keywords") topic_keywords = get_as<std::map<std::string, std::vector<std::string>>>(v, k);
    else if (k == "exclude_cultures") exclude_cultures = get_as<std::vector<std::string>>(v, k);
    else unknown_key("", k);
  }
}

RunConfig RunConfig::load(const fs::path& path) {
  if (!fs::exists(path)) fail(ErrorCode::kNotFound, "config file not found: " + path.string());
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig config;
  config.apply_json(buf.str(), path.parent_path());
  return config;
}

void RunConfig::validate() const {
  relevance.validate();
  memorization.validate();
  associations.validate();
  if (max_ngram_len == 0) fail(ErrorCode::kInvalidArgument, "max_ngram_len must be at least 1");
  if (lda.window == 0) fail(ErrorCode::kInvalidArgument, "lda.window must be at least 1");
  if (lda.stride == 0 || lda.stride > lda.window) fail(ErrorCode::kInvalidArgument, "lda.stride must be in [1, window]");
  if (lda.keywords == 0 || lda.top_words == 0) fail(ErrorCode::kInvalidArgument, "lda.keywords and lda.top_words must be positive");
  LdaParams params{lda.topics, lda.alpha, lda.beta, lda.iterations, seed};
  params.validate();
  if (out_dir.empty()) fail(ErrorCode::kInvalidArgument, "out_dir must not be empty");
  std::set<std::string> seen;
  for (const auto& c : exclude_cultures) {
    if (!seen.insert(c).second) fail(ErrorCode::kInvalidArgument, "culture \"" + c + "\" excluded twice");
  }
}

fs::path RunConfig::resolved_index_path() const { return index_path.value_or(out_dir / "index.bin"); }

// ---- stages ------------------------------------------------------------------

StageResult run_index(const RunConfig& config) {
  config.validate();
  require_file(config.corpus, "corpus file");
  const fs::path dir = prepare_out_dir(config);
  const fs::path path = config.resolved_index_path();
  if (fs::exists(path) && !config.force) {
    fail(ErrorCode::kState, "refusing to overwrite existing index " + path.string() + " (pass --force to rebuild)");
  }
  const auto started = std::chrono::steady_clock::now();
  CorpusReader reader(config.corpus);
  const Index index = Index::build(reader, IndexOptions{config.max_ngram_len, worker_count(config)});
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  index.save(path);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  json manifest = {
      {"schema_version", 1},
      {"corpus", config.corpus.string()},
      {"index", path.string()},
      {"doc_count", index.doc_count()},
      {"token_count", index.token_count()},
      {"vocabulary_size", index.vocabulary_size()},
      {"max_ngram_len", index.max_ngram_len()},
      {"tokenizer", index.tokenizer_name()},
      {"elapsed_seconds", io::json_real(elapsed)},
  };
  const fs::path manifest_path = dir / "index_manifest.json";
  io::write_text(manifest_path, io::dump_json(manifest));
  io::log("indexed " + std::to_string(index.doc_count()) + " documents, " + std::to_string(index.token_count()) +
          " tokens in " + format_real(elapsed) + " s");
  return {{path, manifest_path}};
}

StageResult run_classify(const RunConfig& config) {
  config.validate();
  const CultureLexicon lexicon = load_lexicon(config);
  const auto generations = load_generations(config, lexicon);
  const Index index = load_index(config);
  const fs::path dir = prepare_out_dir(config);

  const DocumentClassifier classifier(index, lexicon, config.relevance, worker_count(config));
  const auto attributions = attribute_symbols(classifier, generations, config.memorization, worker_count(config));

  io::Table table{kMemorizedColumns, {}};
  std::size_t memorized_pairs = 0;
  for (const auto& a : attributions) {
    for (const auto& s : a.distribution.per_culture) {
      const bool memorized = std::binary_search(a.verdict.memorized_for.begin(), a.verdict.memorized_for.end(), s.culture);
      memorized_pairs += memorized ? 1 : 0;
      table.rows.push_back({a.key.symbol, a.key.topic, s.culture, s.n_contributory, a.distribution.n_symbol_docs, s.cs,
                            optional_real(s.z), std::string(to_string(memorized ? a.verdict.rule : MemorizationRule::kNone))});
    }
  }
  io::log("classified " + std::to_string(attributions.size()) + " symbols, " + std::to_string(memorized_pairs) +
          " memorized pairs");
  return {io::write_table(dir, "memorized", table, config.json)};
}

StageResult run_label(const RunConfig& config) {
  config.validate();
  const CultureLexicon lexicon = load_lexicon(config);
  const auto attributions = read_memorized(config);
  const auto generations = load_generations(config, lexicon);
  std::vector<DefinitionRecord> definitions;
  if (config.definitions.empty()) {
    io::log("no definitions file configured; weak associations to memorized symbols are disabled");
  } else {
    require_file(config.definitions, "definitions file");
    definitions = read_definitions(config.definitions);
  }
  const Index index = load_index(config);
  const fs::path dir = prepare_out_dir(config);

  std::map<std::string, CountRecord> external;
  if (config.external_counts) {
    require_file(*config.external_counts, "external counts file");
    external = import_external_counts(*config.external_counts);
  }
  std::map<std::string, std::uint64_t> counts;
  for (const auto& g : generations) {
    for (const auto& s : g.symbols) {
      if (counts.contains(s)) continue;
      if (auto it = external.find(s); it != external.end()) {
        counts[s] = it->second.total_occurrences;
        continue;
      }
      const NgramQuery q = make_query(s);
      if (q.token_len() > index.max_ngram_len()) {
        io::log("symbol \"" + s + "\" is longer than the index n-gram limit; counted as 0");
        counts[s] = 0;
      } else {
        counts[s] = index.count(q).total_occurrences;
      }
    }
  }

  const auto verdicts = to_symbol_verdicts(attributions, generations);
  const auto result = label_all(generations, verdicts, definitions, config.associations,
                                active_culture_count(config, lexicon), counts);

  io::Table labels{kAssociationColumns, {}};
  for (const auto& l : result.labels) {
    labels.rows.push_back({l.culture, l.topic, l.symbol, std::string(to_string(l.kind)), l.evidence, optional_real(l.score)});
  }
  io::Table overshadow{{"topic", "diffuse_symbol", "count", "n_cultures_generated", "r", "smoothed"}, {}};
  for (const auto& o : result.overshadow) {
    overshadow.rows.push_back({o.topic, o.diffuse_symbol, o.count, static_cast<std::uint64_t>(o.n_cultures_generated),
                               optional_real(o.r), std::string(o.smoothed ? "true" : "false")});
  }
  auto written = io::write_table(dir, "associations", labels, config.json);
  auto more = io::write_table(dir, "overshadowing", overshadow, config.json);
  written.insert(written.end(), more.begin(), more.end());
  io::log("labeled " + std::to_string(result.labels.size()) + " (culture, topic, symbol) pairs");
  return {written};
}

StageResult run_report(const RunConfig& config) {
  config.validate();
  const CultureLexicon lexicon = load_lexicon(config);
  const auto labels = read_associations(config);
  const auto generations = load_generations(config, lexicon);
  const fs::path dir = prepare_out_dir(config);

  const auto dashboards = build_dashboard(labels, generations);
  json kinds = json::array();
  for (auto k : kAllAssociationKinds) kinds.push_back(to_string(k));
  json rows = json::array();
  for (const auto& d : dashboards) {
    json fractions = json::object();
    for (auto k : kAllAssociationKinds) fractions[to_string(k)] = io::json_real(d.fraction(k));
    rows.push_back({{"culture", d.culture}, {"topic", d.topic}, {"n_responses", d.n_responses}, {"fractions", fractions}});
  }
  json doc = {{"schema_version", 1}, {"kinds", kinds}, {"dashboards", rows}};
  const fs::path path = dir / "dashboard.json";
  io::write_text(path, io::dump_json(doc));
  return {{path}};
}

StageResult run_correlate(const RunConfig& config) {
  config.validate();
  const CultureLexicon lexicon = load_lexicon(config);
  const auto attributions = read_memorized(config);
  const Index index = load_index(config);
  const fs::path dir = prepare_out_dir(config);
  const DocumentClassifier classifier(index, lexicon, config.relevance, worker_count(config));

  std::set<std::string> topics;
  for (const auto& a : attributions) topics.insert(a.key.topic);

  auto memorized_counts = [&](const std::string* topic) {
    std::map<std::string, double> out;
    for (const auto& name : lexicon.names()) {
      if (!excluded(config, name)) out[name] = 0.0;
    }
    for (const auto& a : attributions) {
      if (topic != nullptr && a.key.topic != *topic) continue;
      for (const auto& c : a.verdict.memorized_for) {
        if (auto it = out.find(c); it != out.end()) it->second += 1.0;
      }
    }
    return out;
  };
  auto document_counts = [&](const std::vector<std::string>* keywords) {
    const auto counts = culture_document_counts(classifier, keywords);
    std::map<std::string, double> out;
    for (std::size_t c = 0; c < lexicon.size(); ++c) {
      if (!excluded(config, lexicon.name(c))) out[lexicon.name(c)] = static_cast<double>(counts[c]);
    }
    return out;
  };

  io::Table table{{"analysis", "rho", "tau", "n"}, {}};
  auto add = [&](const std::string& name, const std::map<std::string, double>& mem,
                 const std::map<std::string, double>& docs) {
    try {
      const auto r = correlate_memorization_frequency(mem, docs);
      table.rows.push_back({name, r.spearman_rho, r.kendall_tau, static_cast<std::uint64_t>(r.n)});
    } catch (const Error& e) {
      if (mem.size() < 2) throw;
      io::log("skipping correlation \"" + name + "\": " + e.what());
    }
  };

  add("all/unfiltered", memorized_counts(nullptr), document_counts(nullptr));
  for (const auto& topic : topics) {
    if (config.topic_filter) {
      auto it = config.topic_keywords.find(topic);
      if (it == config.topic_keywords.end()) {
        fail(ErrorCode::kInvalidArgument, "topic filter requested but no keyword list is configured for topic \"" + topic + "\"");
      }
      add(topic + "/topic_filtered", memorized_counts(&topic), document_counts(&it->second));
    } else {
      add(topic + "/unfiltered", memorized_counts(&topic), document_counts(nullptr));
    }
  }
  return {io::write_table(dir, "correlations", table, config.json)};
}

StageResult run_topics(const RunConfig& config) {
  config.validate();
  const CultureLexicon lexicon = load_lexicon(config);
  const auto labels = read_associations(config);
  const Index index = load_index(config);
  const fs::path dir = prepare_out_dir(config);
  const DocumentClassifier classifier(index, lexicon, config.relevance, worker_count(config));

  auto stopwords = default_stopwords();
  if (config.stopwords_file) {
    const auto extra = load_stopwords(*config.stopwords_file);
    stopwords.insert(extra.begin(), extra.end());
  }

  std::set<TopicCase> unique_cases;
  for (const auto& l : labels) {
    if (l.kind == AssociationKind::kCrossCulture) unique_cases.insert({l.topic, l.symbol, l.evidence, l.culture});
  }
  const std::vector<TopicCase> cases(unique_cases.begin(), unique_cases.end());

  const LdaParams params{config.lda.topics, config.lda.alpha, config.lda.beta, config.lda.iterations, config.seed};
  struct CaseResult {
    KeywordReport report;
    std::optional<LdaModel> model;
  };
  std::vector<CaseResult> results(cases.size());
  parallel_for(cases.size(), worker_count(config), [&](std::size_t i) {
    const TopicCase& c = cases[i];
    CaseResult& out = results[i];
    const NgramQuery symbol = make_query(c.symbol);
    std::vector<DocIndex> docs;
    if (symbol.token_len() <= index.max_ngram_len()) {
      docs = select_cooccurrence_set(classifier, lexicon.require(c.culture_a), lexicon.require(c.culture_b), symbol);
    }
    const auto chunks = chunk_documents(index, docs, config.lda.window, config.lda.stride);
    const LdaCorpus corpus = make_lda_corpus(index, chunks, stopwords);
    if (!corpus.vocab.empty() && corpus.token_count() > 0) {
      out.model = fit_lda(corpus, params);
      out.report = extract_keywords(*out.model, corpus, config.lda.keywords, config.lda.top_words);
    }
    out.report.symbol = c.symbol;
    out.report.culture_a = c.culture_a;
    out.report.culture_b = c.culture_b;
    out.report.n_docs = docs.size();
    out.report.n_chunks = chunks.size();
  });

  json rows = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& r = results[i].report;
    if (r.keywords.empty()) {
      io::log("warning: no keywords for " + r.symbol + " (" + r.culture_a + " -> " + r.culture_b + "), " +
              std::to_string(r.n_docs) + " co-occurrence documents");
    }
    json keywords = json::array();
    for (const auto& k : r.keywords) keywords.push_back({{"term", k.term}, {"weight", io::json_real(k.weight)}});
    json row = {{"topic", cases[i].topic},   {"symbol", r.symbol},   {"culture_a", r.culture_a},
                {"culture_b", r.culture_b},  {"n_docs", r.n_docs},   {"n_chunks", r.n_chunks},
                {"keywords", keywords}};
    if (config.lda.dump_topics && results[i].model) {
      json tables = json::array();
      for (std::size_t k = 0; k < results[i].model->topics; ++k) {
        json words = json::array();
        for (const auto& [term, p] : results[i].model->top_words(k, config.lda.top_words)) {
          words.push_back({{"term", term}, {"p", io::json_real(p)}});
        }
        tables.push_back(words);
      }
      row["topics"] = tables;
    }
    if (!config.lda.interpret_command.empty() && !r.keywords.empty()) {
      row["interpretation"] = run_interpret_hook(config.lda.interpret_command, r);
    }
    rows.push_back(std::move(row));
  }
  json lda = {{"topics", params.topics},
              {"alpha", io::json_real(params.resolved_alpha())},
              {"beta", io::json_real(params.beta)},
              {"iterations", params.iterations},
              {"seed", params.seed},
              {"window", config.lda.window},
              {"stride", config.lda.stride}};
  json doc = {{"schema_version", 1}, {"lda", lda}, {"cases", rows}};
  const fs::path path = dir / "topics.json";
  io::write_text(path, io::dump_json(doc));
  io::log("fitted topic models for " + std::to_string(cases.size()) + " cross-culture cases");
  return {{path}};
}

StageResult run_stage(std::string_view command, const RunConfig& config) {
  if (command == "index") return run_index(config);
  if (command == "classify") return run_classify(config);
  if (command == "label") return run_label(config);
  if (command == "report") return run_report(config);
  if (command == "correlate") return run_correlate(config);
  if (command == "topics") return run_topics(config);
  fail(ErrorCode::kInvalidArgument, "unknown command \"" + std::string(command) + "\"");
}

}  // namespace memoed
