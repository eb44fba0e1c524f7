// memoed: command-line frontend over the C API.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "memoed/memoed.h"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> threads;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> external_counts;
  bool force = false;
  bool json = false;
  bool topic_filter = false;
  bool dump_topics = false;
};

std::string absolute(const std::string& path) { return std::filesystem::absolute(path).lexically_normal().string(); }

nlohmann::json overrides(const Flags& f) {
  nlohmann::json o = nlohmann::json::object();
  if (f.out_dir) o["out_dir"] = absolute(*f.out_dir);
  if (f.threads) o["threads"] = *f.threads;
  if (f.seed) o["seed"] = *f.seed;
  if (f.external_counts) o["external_counts"] = absolute(*f.external_counts);
  if (f.force) o["force"] = true;
  if (f.json) o["json"] = true;
  if (f.topic_filter) o["topic_filter"] = true;
  if (f.dump_topics) o["lda"] = {{"dump_topics", true}};
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attribute culture-conditioned generations to pretraining-corpus memorization"};
  app.set_version_flag("--version", std::string(memo_version()));
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("-c,--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out-dir", flags.out_dir, "Output directory (overrides config)");
  app.add_option("--threads", flags.threads, "Worker threads; 0 uses every core");
  app.add_option("--seed", flags.seed, "Seed for topic modeling");
  app.add_option("--external-counts", flags.external_counts,
                 "CSV of n-gram counts used for overshadowing ratios");
  app.add_flag("--force", flags.force, "Overwrite an existing index");
  app.add_flag("--json", flags.json, "Also write every CSV as JSON");
  app.add_flag("--topic-filter", flags.topic_filter, "Count only topic-relevant documents when correlating");

  app.add_subcommand("index", "Build the n-gram index from the corpus");
  app.add_subcommand("classify", "Score contributions and find memorized symbols (memorized.csv)");
  app.add_subcommand("label", "Label every generated symbol (associations.csv, overshadowing.csv)");
  app.add_subcommand("report", "Per-culture association breakdown (dashboard.json)");
  app.add_subcommand("correlate", "Memorization vs. document frequency correlations (correlations.csv)");
  auto* topics = app.add_subcommand("topics", "Topic keywords for cross-culture cases (topics.json)");
  topics->add_flag("--dump-topics", flags.dump_topics, "Include raw topic-word tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  const std::string extra = overrides(flags).dump();
  const memo_status status =
      memo_run(command.c_str(), flags.config.empty() ? nullptr : flags.config.c_str(), extra.c_str());
  if (status != MEMO_OK) {
    std::fprintf(stderr, "memoed %s: %s\n", command.c_str(), memo_last_error());
    return status == MEMO_NOT_FOUND ? 2 : 1;
  }
  return 0;
}
