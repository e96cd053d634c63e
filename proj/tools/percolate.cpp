// percolate: command line front end for the group-analysis pipeline.
//
//   percolate run --config run.toml [--jobs N] [...overrides]
//   percolate ingest|build-graphs|detect|track|report --config run.toml
//   percolate compare report_a.json report_b.json [--out diff.csv]
//
// Options can also come from PERCOLATE_<OPTION> environment variables
// (e.g. PERCOLATE_W_MIN). Command line beats environment beats config file.
// Exit codes: 0 success, 2 configuration or usage error, 3 stage failure.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "percolate/metrics.hpp"
#include "percolate/pipeline.hpp"
#include "percolate/util.hpp"

namespace {

using namespace percolate;

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;
constexpr const char* kPipelineFooter = "Takes the pipeline options listed by 'percolate --help'.";

struct CliOptions {
  std::string input;
  std::string output_dir = "out";
  std::string lexicon;
  std::string period_start;
  std::string period_end;
  int slot_days = 30;
  std::string overlap = "1/2";
  std::string thresholds = "0.0,0.3";
  std::string combine_rule = "mean";
  std::string models = "post,comment";
  std::string k_values = "3..5";
  std::int64_t w_min = 2;
  std::string prune_scope = "slot";
  bool include_self_directed = false;
  double min_intensity = 0.0;
  double jaccard = 0.5;
  int ltmin = 3;
  unsigned jobs = 1;
};

std::string env_name(const std::string& option) {
  std::string out = "PERCOLATE_";
  for (char c : option) out.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  return out;
}

// Names (without dashes) of the options that can also come from the environment.
std::vector<std::string> add_run_options(CLI::App* app, CliOptions& o) {
  std::vector<std::string> names = {"config"};
  app->set_config("--config", "", "TOML config file; environment and command line override it");
  auto opt = [&](const std::string& name, auto& target, const std::string& help) {
    names.push_back(name);
    return app->add_option("--" + name, target, help)->capture_default_str();
  };
  opt("input", o.input, "Events file (.ndjson or .csv)");
  opt("out", o.output_dir, "Output directory");
  opt("lexicon", o.lexicon, "Sentiment lexicon CSV (word,weight)");
  opt("period-start", o.period_start, "Start of the analysed period (RFC 3339 or YYYY-MM-DD)");
  opt("period-end", o.period_end, "End of the analysed period, exclusive");
  opt("slot-days", o.slot_days, "Slot length in days");
  opt("overlap", o.overlap, "Overlap of consecutive slots, e.g. 1/2 or 0.5");
  opt("thresholds", o.thresholds, "Neutral band as neutral_low,neutral_high");
  opt("combine-rule", o.combine_rule, "Sentiment combining rule: mean, sum or sqrt");
  opt("models", o.models, "Relation models, comma separated, or 'all'");
  opt("k", o.k_values, "Clique sizes: range 3..5 or list 3,4,5");
  opt("w-min", o.w_min, "Minimum edge weight kept");
  opt("prune-scope", o.prune_scope, "Apply w-min per 'slot' graph or to the whole 'period'");
  names.push_back("include-self-directed");
  app->add_flag("--include-self-directed", o.include_self_directed, "Use self-directed comments when building graphs");
  opt("min-intensity", o.min_intensity, "Minimum clique intensity (0 disables)");
  opt("jaccard", o.jaccard, "Modified Jaccard threshold for matching groups across slots");
  opt("ltmin", o.ltmin, "Minimum lifespan (slots) of a stable group");
  opt("jobs", o.jobs, "Worker threads");
  return names;
}

// CLI11 reads the config file before the environment, so environment values are
// passed as leading arguments instead: the file only fills what is still unset,
// and later command line values replace them.
std::vector<std::string> with_environment(int argc, char** argv, const std::vector<std::string>& names) {
  std::vector<std::string> args;
  for (const auto& name : names)
    if (const char* value = std::getenv(env_name(name).c_str())) args.push_back("--" + name + "=" + value);
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  std::reverse(args.begin(), args.end());
  return args;
}

RunConfig to_run_config(const CliOptions& o) {
  if (o.period_start.empty() || o.period_end.empty())
    throw ConfigError("--period-start and --period-end are required");
  RunConfig c;
  c.input = o.input;
  c.output_dir = o.output_dir;
  c.lexicon = o.lexicon;
  try {
    c.slots.period_start = parse_timestamp(o.period_start);
    c.slots.period_end = parse_timestamp(o.period_end);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  c.slots.slot_length = std::chrono::days{o.slot_days};
  c.slots.overlap = parse_fraction(o.overlap);
  c.thresholds = PolarityThresholds::parse(o.thresholds);
  c.combine_rule = parse_combine_rule(o.combine_rule);
  c.models = parse_models(o.models);
  c.k_values = parse_k_values(o.k_values);
  c.w_min = o.w_min;
  c.prune_scope = parse_prune_scope(o.prune_scope);
  c.include_self_directed = o.include_self_directed;
  c.clique.min_intensity = o.min_intensity;
  c.match.jaccard_threshold = o.jaccard;
  c.match.ltmin = o.ltmin;
  c.jobs = o.jobs;
  return c;
}

int run_compare(const std::string& a_path, const std::string& b_path, const std::string& out_path) {
  const auto a = parse_report_json(read_file(a_path));
  const auto b = parse_report_json(read_file(b_path));
  const auto csv = deltas_csv(compare_reports(a, b));
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    write_file(out_path, csv);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Overlapping group detection and tracking for comment networks"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.footer("Every option can also be set through PERCOLATE_<NAME>, e.g. PERCOLATE_W_MIN=3.");

  // Pipeline options live on the top-level app so that one config file serves
  // every subcommand; subcommands let them fall through.
  CliOptions options;
  const auto env_options = add_run_options(&app, options);
  app.fallthrough();

  struct Stage {
    const char* name;
    const char* help;
    std::vector<std::filesystem::path> (*fn)(const RunConfig&);
  };
  const Stage stages[] = {
      {"ingest", "Parse events, score sentiment, assign slots", &run_ingest},
      {"build-graphs", "Build and prune per-slot relation graphs", &run_build_graphs},
      {"detect", "Find temporary groups with directed clique percolation", &run_detect},
      {"track", "Chain temporary groups into stable groups", &run_track},
      {"report", "Compute group measures and corpus statistics", &run_report},
  };
  std::vector<std::pair<CLI::App*, const Stage*>> stage_commands;
  for (const auto& s : stages) {
    auto* sub = app.add_subcommand(s.name, s.help);
    sub->footer(kPipelineFooter);
    stage_commands.emplace_back(sub, &s);
  }
  auto* run_cmd = app.add_subcommand("run", "Run every stage and write manifest.json");
  run_cmd->footer(kPipelineFooter);

  std::string report_a, report_b, diff_out;
  auto* compare_cmd = app.add_subcommand("compare", "Side-by-side deltas of two reports");
  compare_cmd->footer("");
  compare_cmd->add_option("report_a", report_a, "Baseline report JSON")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("report_b", report_b, "Report JSON to compare")->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("--out", diff_out, "Write the delta table here instead of stdout");

  try {
    app.parse(with_environment(argc, argv, env_options));
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (compare_cmd->parsed()) return run_compare(report_a, report_b, diff_out);

    auto config = to_run_config(options);
    if (run_cmd->parsed()) {
      const auto manifest = run(config);
      if (!manifest.ok) {
        std::cerr << "error: stage " << manifest.failed_stage << " failed: " << manifest.error << '\n';
        return kExitStage;
      }
      std::cout << "wrote " << manifest.outputs.size() << " files to " << config.output_dir.string() << '\n';
      return 0;
    }
    for (const auto& [sub, stage] : stage_commands) {
      if (!sub->parsed()) continue;
      config.validate(std::string_view(stage->name) == "ingest");
      const auto written = stage->fn(config);
      std::cout << stage->name << ": wrote " << written.size() << " files to " << config.output_dir.string() << '\n';
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StageError& e) {
    std::cerr << "error: stage " << e.stage() << " failed: " << e.what() << '\n';
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStage;
  }
}
