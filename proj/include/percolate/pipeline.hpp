#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "percolate/cpm.hpp"
#include "percolate/relations.hpp"
#include "percolate/sentiment.hpp"
#include "percolate/sgci.hpp"
#include "percolate/slots.hpp"

namespace percolate {

enum class PruneScope {
  PerSlot,     // w_min applied to each slot graph
  WholePeriod  // w_min applied to the whole-period graph, survivors restricted to each slot
};

PruneScope parse_prune_scope(std::string_view name);
std::string_view prune_scope_name(PruneScope scope);

struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir;
  std::filesystem::path lexicon;
  SlotConfig slots;
  PolarityThresholds thresholds;
  CombineRule combine_rule = CombineRule::MeanPolar;
  std::vector<RelationModel> models{RelationModel::PostNoSentiment, RelationModel::CommentNoSentiment};
  std::vector<int> k_values{3, 4, 5};
  std::int64_t w_min = 2;
  PruneScope prune_scope = PruneScope::PerSlot;
  bool include_self_directed = false;
  CliqueOptions clique;
  MatchConfig match;
  unsigned jobs = 1;

  /// Throws ConfigError. Input and lexicon are checked only when `check_inputs`.
  void validate(bool check_inputs = true) const;
  /// Canonical JSON of everything that affects outputs (not jobs, not output_dir).
  std::string canonical_json() const;
};

/// Parses "3..5" or "3,4,5" (or a single value).
std::vector<int> parse_k_values(std::string_view text);
/// Comma-separated model names, or "all".
std::vector<RelationModel> parse_models(std::string_view text);

/// A pipeline stage failed; `stage` names it.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& cause)
      : std::runtime_error(stage + ": " + cause), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct StageTiming {
  std::string name;
  double wall_ms = 0.0;
};

struct RunManifest {
  bool ok = true;
  std::string failed_stage;
  std::string error;
  std::string config_hash;
  std::string input_digest;
  std::string started_at;
  std::vector<StageTiming> timings;
  std::vector<std::filesystem::path> outputs;  // relative to output_dir, sorted
};

// Output layout under output_dir.
namespace layout {
std::filesystem::path interactions();
std::filesystem::path ingest_stats();
std::filesystem::path slot_table();
std::filesystem::path graph(int slot, RelationModel model);
std::filesystem::path pruning_stats();
std::filesystem::path groups(int slot, RelationModel model, int k);
std::filesystem::path stable_groups(RelationModel model, int k);
std::filesystem::path report_json(RelationModel model, int k);
std::filesystem::path report_csv(RelationModel model, int k);
std::filesystem::path series_csv(RelationModel model, int k);
std::filesystem::path manifest();
}  // namespace layout

// Individual stages. Each reads only what earlier stages wrote under
// config.output_dir plus the config itself, and returns the files it wrote
// (relative to output_dir).
std::vector<std::filesystem::path> run_ingest(const RunConfig& config);
std::vector<std::filesystem::path> run_build_graphs(const RunConfig& config);
std::vector<std::filesystem::path> run_detect(const RunConfig& config);
std::vector<std::filesystem::path> run_track(const RunConfig& config);
std::vector<std::filesystem::path> run_report(const RunConfig& config);

/// All stages, then manifest.json. Stage failures are reported through the
/// returned manifest (ok == false) and also written to disk.
RunManifest run(const RunConfig& config);

std::string manifest_json(const RunManifest& manifest, const RunConfig& config);

}  // namespace percolate
