#include "percolate/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "percolate/ingest.hpp"
#include "percolate/metrics.hpp"
#include "percolate/util.hpp"

namespace percolate {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

PruneScope parse_prune_scope(std::string_view name) {
  if (name == "slot") return PruneScope::PerSlot;
  if (name == "period") return PruneScope::WholePeriod;
  throw ConfigError("unknown prune scope '" + std::string(name) + "' (expected slot or period)");
}

std::string_view prune_scope_name(PruneScope scope) {
  return scope == PruneScope::PerSlot ? "slot" : "period";
}

std::vector<int> parse_k_values(std::string_view raw) {
  const auto text = trim(raw);
  auto to_int = [&](std::string_view s) {
    s = trim(s);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
      throw ConfigError("invalid k value in '" + std::string(text) + "'");
    return v;
  };
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string_view::npos) {
    const int lo = to_int(text.substr(0, dots));
    const int hi = to_int(text.substr(dots + 2));
    if (lo > hi) throw ConfigError("empty k range '" + std::string(text) + "'");
    for (int k = lo; k <= hi; ++k) out.push_back(k);
  } else {
    std::size_t start = 0;
    while (start <= text.size()) {
      const auto comma = text.find(',', start);
      out.push_back(to_int(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<RelationModel> parse_models(std::string_view raw) {
  const auto text = trim(raw);
  if (text == "all") return {kAllRelationModels.begin(), kAllRelationModels.end()};
  std::set<RelationModel> models;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto name = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (!name.empty()) models.insert(parse_model(name));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return {models.begin(), models.end()};
}

void RunConfig::validate(bool check_inputs) const {
  slots.validate();
  thresholds.validate();
  match.validate();
  if (models.empty()) throw ConfigError("at least one relation model is required");
  if (k_values.empty()) throw ConfigError("at least one k value is required");
  for (int k : k_values)
    if (k < 3) throw ConfigError("k must be at least 3, got " + std::to_string(k));
  if (w_min < 1) throw ConfigError("w_min must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  if (!(clique.min_intensity >= 0.0)) throw ConfigError("min intensity must be non-negative");
  if (output_dir.empty()) throw ConfigError("an output directory is required");
  if (check_inputs) {
    if (input.empty() || !fs::is_regular_file(input)) throw ConfigError("input file not found: " + input.string());
    if (lexicon.empty() || !fs::is_regular_file(lexicon))
      throw ConfigError("lexicon file not found: " + lexicon.string());
  }
}

std::string RunConfig::canonical_json() const {
  ordered_json j;
  j["period_start"] = format_timestamp(slots.period_start);
  j["period_end"] = format_timestamp(slots.period_end);
  j["slot_length_seconds"] = slots.slot_length.count();
  j["overlap"] = format_fraction(slots.overlap);
  j["thresholds"] = {thresholds.neutral_low, thresholds.neutral_high};
  j["combine_rule"] = combine_rule_name(combine_rule);
  auto& m = j["models"] = ordered_json::array();
  for (auto model : models) m.push_back(model_name(model));
  j["k"] = k_values;
  j["w_min"] = w_min;
  j["prune_scope"] = prune_scope_name(prune_scope);
  j["include_self_directed"] = include_self_directed;
  j["min_intensity"] = clique.min_intensity;
  j["jaccard_threshold"] = match.jaccard_threshold;
  j["ltmin"] = match.ltmin;
  j["lexicon_sha256"] = fs::is_regular_file(lexicon) ? sha256_file(lexicon) : std::string();
  return j.dump();
}

namespace layout {
fs::path interactions() { return "interactions.ndjson"; }
fs::path ingest_stats() { return "ingest_stats.json"; }
fs::path slot_table() { return "slots.json"; }
fs::path graph(int slot, RelationModel model) {
  return fs::path("graphs") / ("slot_" + std::to_string(slot) + "_" + std::string(model_name(model)) + ".csv");
}
fs::path pruning_stats() { return fs::path("graphs") / "pruning_stats.json"; }
fs::path groups(int slot, RelationModel model, int k) {
  return fs::path("groups") /
         ("groups_" + std::to_string(slot) + "_" + std::string(model_name(model)) + "_k" + std::to_string(k) + ".ndjson");
}
fs::path stable_groups(RelationModel model, int k) {
  return fs::path("stable") / ("stable_groups_" + std::string(model_name(model)) + "_k" + std::to_string(k) + ".ndjson");
}
fs::path report_json(RelationModel model, int k) {
  return fs::path("reports") / ("report_" + std::string(model_name(model)) + "_k" + std::to_string(k) + ".json");
}
fs::path report_csv(RelationModel model, int k) {
  return fs::path("reports") / ("report_" + std::string(model_name(model)) + "_k" + std::to_string(k) + ".csv");
}
fs::path series_csv(RelationModel model, int k) {
  return fs::path("reports") / ("series_" + std::string(model_name(model)) + "_k" + std::to_string(k) + ".csv");
}
fs::path manifest() { return "manifest.json"; }
}  // namespace layout

namespace {

struct SlotTable {
  std::vector<TimeSlot> slots;
  std::string input_digest;
};

std::string slot_table_json(std::span<const TimeSlot> slots, const SlotConfig& config, const std::string& digest) {
  ordered_json j;
  j["input_digest"] = digest;
  j["period_start"] = format_timestamp(config.period_start);
  j["period_end"] = format_timestamp(config.period_end);
  j["slot_length_seconds"] = config.slot_length.count();
  j["overlap"] = format_fraction(config.overlap);
  auto& arr = j["slots"] = ordered_json::array();
  for (const auto& s : slots)
    arr.push_back({{"index", s.index}, {"start", format_timestamp(s.start)}, {"end", format_timestamp(s.end)}});
  return j.dump(2) + "\n";
}

SlotTable read_slot_table(const fs::path& out_dir) {
  const auto path = out_dir / layout::slot_table();
  if (!fs::exists(path)) throw ParseError("missing " + path.string() + " (run the ingest stage first)");
  try {
    const auto j = json::parse(read_file(path));
    SlotTable t;
    t.input_digest = j.at("input_digest").get<std::string>();
    for (const auto& s : j.at("slots"))
      t.slots.push_back({s.at("index").get<int>(), parse_timestamp(s.at("start").get<std::string>()),
                         parse_timestamp(s.at("end").get<std::string>())});
    return t;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

SlotGraph load_graph(const fs::path& out_dir, int slot, RelationModel model) {
  auto in = open_input(out_dir / layout::graph(slot, model));
  return read_edge_list(in, slot, model);
}

std::vector<TemporaryGroup> load_groups(const fs::path& out_dir, int slot, RelationModel model, int k) {
  auto in = open_input(out_dir / layout::groups(slot, model, k));
  return read_groups_ndjson(in);
}

ordered_json prune_stats_json(const PruneStats& s) {
  return {{"edges_before", s.edges_before},
          {"edges_after", s.edges_after},
          {"nodes_before", s.nodes_before},
          {"nodes_after", s.nodes_after},
          {"weight_before", s.weight_before},
          {"weight_after", s.weight_after},
          {"edges_removed_fraction", s.edges_removed_fraction()},
          {"nodes_removed_fraction", s.nodes_removed_fraction()},
          {"weight_removed_fraction", s.weight_removed_fraction()}};
}

}  // namespace

std::vector<fs::path> run_ingest(const RunConfig& config) {
  return with_stage("ingest", [&] {
    std::vector<std::string> warnings;
    auto lexicon = Lexicon::load_csv(config.lexicon, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    const SentimentScorer scorer(std::move(lexicon), config.combine_rule);
    const auto slots = generate_slots(config.slots);
    const auto records = read_events(config.input);
    const auto result = resolve_interactions(records, slots, std::cref(scorer), config.jobs);

    std::ostringstream interactions;
    write_interactions_ndjson(interactions, result.interactions);
    write_file(config.output_dir / layout::interactions(), interactions.str());
    write_file(config.output_dir / layout::ingest_stats(), ingest_stats_json(result));
    write_file(config.output_dir / layout::slot_table(),
               slot_table_json(slots, config.slots, sha256_file(config.input)));
    return std::vector<fs::path>{layout::interactions(), layout::ingest_stats(), layout::slot_table()};
  });
}

std::vector<fs::path> run_build_graphs(const RunConfig& config) {
  return with_stage("build-graphs", [&] {
    const auto table = read_slot_table(config.output_dir);
    auto in = open_input(config.output_dir / layout::interactions());
    const auto interactions = read_interactions_ndjson(in);

    const auto slot_count = table.slots.size();
    std::vector<std::vector<Interaction>> by_slot(slot_count);
    for (const auto& i : interactions) {
      for (int s : i.slot_ids) {
        if (s < 0 || static_cast<std::size_t>(s) >= slot_count)
          throw ParseError("interaction " + i.event_id + " refers to unknown slot " + std::to_string(s));
        by_slot[static_cast<std::size_t>(s)].push_back(i);
      }
    }

    const BuildOptions options{config.thresholds, config.include_self_directed};
    const auto& models = config.models;
    std::vector<SlotGraph> whole;
    std::vector<PruneStats> whole_stats;
    for (auto model : models) {
      whole.push_back(build_graph(SlotGraph::kWholePeriod, interactions, model, options));
      whole_stats.push_back(prune(whole.back(), config.w_min).stats);
    }

    const std::size_t units = slot_count * models.size();
    std::vector<PruneStats> stats(units);
    parallel_for(units, config.jobs, [&](std::size_t u) {
      const auto slot = static_cast<int>(u / models.size());
      const auto m = u % models.size();
      const auto graph = build_graph(slot, by_slot[static_cast<std::size_t>(slot)], models[m], options);
      auto pruned = config.prune_scope == PruneScope::PerSlot ? prune(graph, config.w_min)
                                                             : prune_by_reference(graph, whole[m], config.w_min);
      stats[u] = pruned.stats;
      std::ostringstream out;
      write_edge_list(out, pruned.graph);
      write_file(config.output_dir / layout::graph(slot, models[m]), out.str());
    });

    ordered_json j;
    j["w_min"] = config.w_min;
    j["scope"] = prune_scope_name(config.prune_scope);
    auto& per_model = j["models"] = ordered_json::object();
    for (std::size_t m = 0; m < models.size(); ++m) {
      auto& entry = per_model[std::string(model_name(models[m]))];
      entry["whole_period"] = prune_stats_json(whole_stats[m]);
      auto& slots = entry["slots"] = ordered_json::array();
      for (std::size_t s = 0; s < slot_count; ++s) {
        auto row = prune_stats_json(stats[s * models.size() + m]);
        row["slot"] = s;
        slots.push_back(std::move(row));
      }
    }
    write_file(config.output_dir / layout::pruning_stats(), j.dump(2) + "\n");

    std::vector<fs::path> written;
    for (std::size_t s = 0; s < slot_count; ++s)
      for (auto model : models) written.push_back(layout::graph(static_cast<int>(s), model));
    written.push_back(layout::pruning_stats());
    return written;
  });
}

std::vector<fs::path> run_detect(const RunConfig& config) {
  return with_stage("detect", [&] {
    const auto table = read_slot_table(config.output_dir);
    struct Unit {
      int slot;
      RelationModel model;
      int k;
    };
    std::vector<Unit> units;
    for (std::size_t s = 0; s < table.slots.size(); ++s)
      for (auto model : config.models)
        for (int k : config.k_values) units.push_back({static_cast<int>(s), model, k});
    parallel_for(units.size(), config.jobs, [&](std::size_t u) {
      const auto& unit = units[u];
      const auto graph = load_graph(config.output_dir, unit.slot, unit.model);
      const auto groups = detect(graph, unit.k, config.clique);
      std::ostringstream out;
      write_groups_ndjson(out, groups);
      write_file(config.output_dir / layout::groups(unit.slot, unit.model, unit.k), out.str());
    });
    std::vector<fs::path> written;
    for (const auto& unit : units) written.push_back(layout::groups(unit.slot, unit.model, unit.k));
    return written;
  });
}

std::vector<fs::path> run_track(const RunConfig& config) {
  return with_stage("track", [&] {
    const auto table = read_slot_table(config.output_dir);
    std::vector<std::pair<RelationModel, int>> units;
    for (auto model : config.models)
      for (int k : config.k_values) units.emplace_back(model, k);
    parallel_for(units.size(), config.jobs, [&](std::size_t u) {
      const auto [model, k] = units[u];
      std::vector<std::vector<TemporaryGroup>> per_slot;
      for (std::size_t s = 0; s < table.slots.size(); ++s)
        per_slot.push_back(load_groups(config.output_dir, static_cast<int>(s), model, k));
      const auto stable = build_stable_groups(per_slot, config.match);
      std::ostringstream out;
      write_stable_groups_ndjson(out, stable);
      write_file(config.output_dir / layout::stable_groups(model, k), out.str());
    });
    std::vector<fs::path> written;
    for (const auto& [model, k] : units) written.push_back(layout::stable_groups(model, k));
    return written;
  });
}

std::vector<fs::path> run_report(const RunConfig& config) {
  return with_stage("report", [&] {
    const auto table = read_slot_table(config.output_dir);
    std::vector<std::pair<RelationModel, int>> units;
    for (auto model : config.models)
      for (int k : config.k_values) units.emplace_back(model, k);
    parallel_for(units.size(), config.jobs, [&](std::size_t u) {
      const auto [model, k] = units[u];
      std::vector<SlotGraph> graphs;
      std::vector<std::vector<TemporaryGroup>> per_slot;
      for (std::size_t s = 0; s < table.slots.size(); ++s) {
        graphs.push_back(load_graph(config.output_dir, static_cast<int>(s), model));
        per_slot.push_back(load_groups(config.output_dir, static_cast<int>(s), model, k));
      }
      auto in = open_input(config.output_dir / layout::stable_groups(model, k));
      const auto stable = read_stable_groups_ndjson(in);
      const auto report = corpus_stats(per_slot, stable, graphs, model, k, table.input_digest);
      write_file(config.output_dir / layout::report_json(model, k), report_json(report));
      write_file(config.output_dir / layout::report_csv(model, k), report_tables_csv(report));
      write_file(config.output_dir / layout::series_csv(model, k), report_series_csv(report));
    });
    std::vector<fs::path> written;
    for (const auto& [model, k] : units) {
      written.push_back(layout::report_json(model, k));
      written.push_back(layout::report_csv(model, k));
      written.push_back(layout::series_csv(model, k));
    }
    return written;
  });
}

std::string manifest_json(const RunManifest& manifest, const RunConfig& config) {
  ordered_json j;
  j["tool"] = "percolate";
  j["status"] = manifest.ok ? "ok" : "invalid";
  j["failed_stage"] = manifest.ok ? ordered_json(nullptr) : ordered_json(manifest.failed_stage);
  j["error"] = manifest.ok ? ordered_json(nullptr) : ordered_json(manifest.error);
  j["config_hash"] = manifest.config_hash;
  j["input_digest"] = manifest.input_digest;
  j["config"] = ordered_json::parse(config.canonical_json());
  j["paths"] = {{"input", config.input.string()}, {"lexicon", config.lexicon.string()}};
  auto& outputs = j["outputs"] = ordered_json::array();
  for (const auto& p : manifest.outputs) {
    const auto full = config.output_dir / p;
    outputs.push_back({{"path", p.generic_string()},
                       {"sha256", fs::is_regular_file(full) ? sha256_file(full) : std::string()}});
  }
  ordered_json timings;
  timings["started_at"] = manifest.started_at;
  auto& stages = timings["stages"] = ordered_json::array();
  for (const auto& t : manifest.timings) stages.push_back({{"name", t.name}, {"wall_ms", t.wall_ms}});
  j["timings"] = std::move(timings);
  return j.dump(2) + "\n";
}

RunManifest run(const RunConfig& config) {
  config.validate();
  RunManifest manifest;
  manifest.started_at = format_timestamp(std::chrono::time_point_cast<Seconds>(std::chrono::system_clock::now()));
  manifest.config_hash = sha256_hex(config.canonical_json());
  manifest.input_digest = sha256_file(config.input);
  fs::create_directories(config.output_dir);

  using StageFn = std::vector<fs::path> (*)(const RunConfig&);
  const std::pair<const char*, StageFn> stages[] = {
      {"ingest", &run_ingest}, {"build-graphs", &run_build_graphs}, {"detect", &run_detect},
      {"track", &run_track},   {"report", &run_report},
  };
  for (const auto& [name, fn] : stages) {
    const auto begin = std::chrono::steady_clock::now();
    try {
      auto written = fn(config);
      manifest.outputs.insert(manifest.outputs.end(), written.begin(), written.end());
    } catch (const StageError& e) {
      manifest.ok = false;
      manifest.failed_stage = e.stage();
      manifest.error = e.what();
    }
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - begin;
    manifest.timings.push_back({name, elapsed.count()});
    if (!manifest.ok) break;
  }
  std::sort(manifest.outputs.begin(), manifest.outputs.end());
  write_file(config.output_dir / layout::manifest(), manifest_json(manifest, config));
  return manifest;
}

}  // namespace percolate
