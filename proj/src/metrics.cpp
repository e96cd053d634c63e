#include "percolate/metrics.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "percolate/util.hpp"

namespace percolate {

using nlohmann::ordered_json;

namespace {

bool contains(std::span<const UserId> sorted, const UserId& id) {
  return std::binary_search(sorted.begin(), sorted.end(), id);
}

MemberSet sorted_copy(std::span<const UserId> members) {
  return make_member_set(std::vector<UserId>(members.begin(), members.end()));
}

}  // namespace

double density(std::span<const UserId> raw_members, const SlotGraph& graph) {
  const auto members = sorted_copy(raw_members);
  const auto n = members.size();
  if (n < 2) throw DomainError("density needs at least two members");
  for (const auto& m : members)
    if (!graph.nodes().contains(m)) throw DomainError("member '" + m.str() + "' is not in the graph");
  std::size_t internal = 0;
  for (const auto& src : members)
    for (const auto& dst : members)
      if (src != dst && graph.weight(src, dst) > 0) ++internal;
  return static_cast<double>(internal) / static_cast<double>(n * (n - 1));
}

std::optional<double> stability(const StableGroup& group) {
  if (group.chain.size() < 2) return std::nullopt;
  double sum = 0.0;
  for (std::size_t i = 1; i < group.chain.size(); ++i) {
    const auto& a = group.chain[i - 1].members;
    const auto& b = group.chain[i].members;
    sum += static_cast<double>(intersection_size(a, b)) / static_cast<double>(union_size(a, b));
  }
  return sum / static_cast<double>(group.chain.size() - 1);
}

Cohesion cohesion(std::span<const UserId> raw_members, const SlotGraph& graph) {
  const auto members = sorted_copy(raw_members);
  std::int64_t internal_weight = 0;
  std::int64_t internal_edges = 0;
  std::int64_t boundary_weight = 0;
  std::int64_t boundary_edges = 0;
  for (const auto& [edge, w] : graph.edges()) {
    const bool src_in = contains(members, edge.first);
    const bool dst_in = contains(members, edge.second);
    if (src_in && dst_in) {
      internal_weight += w;
      ++internal_edges;
    } else if (src_in != dst_in) {
      boundary_weight += w;
      ++boundary_edges;
    }
  }
  if (internal_edges == 0) return {0.0, false};
  if (boundary_edges == 0) return {0.0, true};
  const double internal_mean = static_cast<double>(internal_weight) / static_cast<double>(internal_edges);
  const double boundary_mean = static_cast<double>(boundary_weight) / static_cast<double>(boundary_edges);
  return {internal_mean / boundary_mean, false};
}

GroupMetrics measure(const StableGroup& group, const GraphLookup& graphs) {
  if (group.chain.empty()) throw DomainError("empty stable group chain");
  GroupMetrics m;
  m.lifespan = group.lifespan();
  m.stability = stability(group);
  double density_sum = 0.0;
  double cohesion_sum = 0.0;
  int cohesion_count = 0;
  std::int64_t size_sum = 0;
  for (const auto& g : group.chain) {
    const SlotGraph& graph = graphs(g.slot_index);
    density_sum += density(g.members, graph);
    const auto c = cohesion(g.members, graph);
    if (c.separated) {
      ++m.separated_slots;
    } else {
      cohesion_sum += c.value;
      ++cohesion_count;
    }
    size_sum += static_cast<std::int64_t>(g.members.size());
  }
  const auto len = static_cast<std::int64_t>(group.chain.size());
  m.density = density_sum / static_cast<double>(len);
  if (cohesion_count) m.cohesion = cohesion_sum / cohesion_count;
  m.size = static_cast<int>((2 * size_sum + len) / (2 * len));
  return m;
}

std::size_t SizeHistogram::bin_of(int size) noexcept {
  if (size <= 3) return 0;
  if (size <= 10) return static_cast<std::size_t>(size - 3);
  if (size <= 50) return 8;
  if (size <= 100) return 9;
  if (size <= 200) return 10;
  return 11;
}

std::int64_t SizeHistogram::total() const noexcept {
  std::int64_t t = 0;
  for (auto c : counts_) t += c;
  return t;
}

StatsReport corpus_stats(const std::vector<std::vector<TemporaryGroup>>& per_slot_groups,
                         std::span<const StableGroup> stable, std::span<const SlotGraph> graphs,
                         RelationModel model, int k, std::string corpus_digest) {
  if (per_slot_groups.size() != graphs.size())
    throw DomainError("corpus_stats: one graph per slot is required");
  StatsReport report;
  report.model = std::string(model_name(model));
  report.k = k;
  report.corpus_digest = std::move(corpus_digest);
  report.stable_group_count = static_cast<std::int64_t>(stable.size());

  const auto slot_count = graphs.size();
  std::vector<std::unordered_map<UserId, int>> memberships(slot_count);
  std::vector<std::int64_t> chains_in_slot(slot_count, 0);
  for (const auto& sg : stable) {
    if (sg.model != model || sg.k != k) throw DomainError("stable group from a different (model, k)");
    for (const auto& g : sg.chain) {
      const auto t = static_cast<std::size_t>(g.slot_index);
      if (g.slot_index < 0 || t >= slot_count) throw DomainError("stable group slot out of range");
      ++chains_in_slot[t];
      for (const auto& m : g.members) {
        if (!graphs[t].nodes().contains(m))
          throw DomainError("stable group member '" + m.str() + "' missing from slot graph");
        ++memberships[t][m];
      }
    }
  }

  for (std::size_t t = 0; t < slot_count; ++t) {
    SlotStats s;
    s.slot_index = static_cast<int>(t);
    s.temporary_groups = static_cast<std::int64_t>(per_slot_groups[t].size());
    s.stable_groups = chains_in_slot[t];
    s.nodes = static_cast<std::int64_t>(graphs[t].nodes().size());
    for (const auto& [user, count] : memberships[t]) ++s.membership[static_cast<std::size_t>(std::min(count, 4))];
    s.membership[0] = s.nodes - static_cast<std::int64_t>(memberships[t].size());
    s.percent_not_in_stable =
        s.nodes ? 100.0 * static_cast<double>(s.membership[0]) / static_cast<double>(s.nodes) : 0.0;
    report.slots.push_back(s);
  }

  double stability_sum = 0.0, density_sum = 0.0, cohesion_sum = 0.0;
  std::int64_t stability_n = 0, cohesion_n = 0;
  auto lookup = [&](int slot) -> const SlotGraph& { return graphs[static_cast<std::size_t>(slot)]; };
  for (const auto& sg : stable) {
    auto m = measure(sg, lookup);
    report.histogram.add(m.size);
    density_sum += m.density;
    if (m.stability) {
      stability_sum += *m.stability;
      ++stability_n;
    }
    if (m.cohesion) {
      cohesion_sum += *m.cohesion;
      ++cohesion_n;
    }
    if (m.separated_slots > 0) ++report.cohesion_separated;
    report.groups.emplace_back(sg.stable_id(), m);
  }
  if (!stable.empty()) report.mean_density = density_sum / static_cast<double>(stable.size());
  if (stability_n) report.mean_stability = stability_sum / static_cast<double>(stability_n);
  if (cohesion_n) report.mean_cohesion = cohesion_sum / static_cast<double>(cohesion_n);
  return report;
}

namespace {

ordered_json optional_number(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

std::optional<double> read_optional(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

constexpr std::array<std::string_view, 5> kMembershipLabels = {"0", "1", "2", "3", "4+"};

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

std::string report_json(const StatsReport& r) {
  ordered_json j;
  j["model"] = r.model;
  j["k"] = r.k;
  j["corpus_digest"] = r.corpus_digest;
  j["stable_group_count"] = r.stable_group_count;
  j["means"] = {{"stability", optional_number(r.mean_stability)},
                {"density", optional_number(r.mean_density)},
                {"cohesion", optional_number(r.mean_cohesion)},
                {"cohesion_separated", r.cohesion_separated}};
  auto& hist = j["size_histogram"] = ordered_json::object();
  for (std::size_t b = 0; b < SizeHistogram::kLabels.size(); ++b)
    hist[std::string(SizeHistogram::kLabels[b])] = r.histogram.count(b);
  auto& slots = j["slots"] = ordered_json::array();
  for (const auto& s : r.slots) {
    ordered_json membership;
    for (std::size_t m = 0; m < kMembershipLabels.size(); ++m)
      membership[std::string(kMembershipLabels[m])] = s.membership[m];
    slots.push_back({{"slot", s.slot_index},
                     {"temporary_groups", s.temporary_groups},
                     {"stable_groups", s.stable_groups},
                     {"nodes", s.nodes},
                     {"membership", membership},
                     {"percent_not_in_stable", s.percent_not_in_stable}});
  }
  auto& groups = j["groups"] = ordered_json::array();
  for (const auto& [id, m] : r.groups) {
    groups.push_back({{"stable_id", id},
                      {"size", m.size},
                      {"lifespan", m.lifespan},
                      {"density", m.density},
                      {"stability", optional_number(m.stability)},
                      {"cohesion", optional_number(m.cohesion)},
                      {"separated_slots", m.separated_slots}});
  }
  return j.dump(2) + "\n";
}

StatsReport parse_report_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    StatsReport r;
    r.model = j.at("model").get<std::string>();
    r.k = j.at("k").get<int>();
    r.corpus_digest = j.at("corpus_digest").get<std::string>();
    r.stable_group_count = j.at("stable_group_count").get<std::int64_t>();
    const auto& means = j.at("means");
    r.mean_stability = read_optional(means, "stability");
    r.mean_density = read_optional(means, "density");
    r.mean_cohesion = read_optional(means, "cohesion");
    r.cohesion_separated = means.at("cohesion_separated").get<std::int64_t>();
    const auto& hist = j.at("size_histogram");
    for (std::size_t b = 0; b < SizeHistogram::kLabels.size(); ++b) {
      const auto n = hist.at(std::string(SizeHistogram::kLabels[b])).get<std::int64_t>();
      const int representative = b < 8 ? static_cast<int>(b) + 3 : (b == 8 ? 11 : b == 9 ? 51 : b == 10 ? 101 : 201);
      for (std::int64_t i = 0; i < n; ++i) r.histogram.add(representative);
    }
    for (const auto& s : j.at("slots")) {
      SlotStats st;
      st.slot_index = s.at("slot").get<int>();
      st.temporary_groups = s.at("temporary_groups").get<std::int64_t>();
      st.stable_groups = s.at("stable_groups").get<std::int64_t>();
      st.nodes = s.at("nodes").get<std::int64_t>();
      for (std::size_t m = 0; m < kMembershipLabels.size(); ++m)
        st.membership[m] = s.at("membership").at(std::string(kMembershipLabels[m])).get<std::int64_t>();
      st.percent_not_in_stable = s.at("percent_not_in_stable").get<double>();
      r.slots.push_back(st);
    }
    for (const auto& g : j.at("groups")) {
      GroupMetrics m;
      m.size = g.at("size").get<int>();
      m.lifespan = g.at("lifespan").get<int>();
      m.density = g.at("density").get<double>();
      m.stability = read_optional(g, "stability");
      m.cohesion = read_optional(g, "cohesion");
      m.separated_slots = g.at("separated_slots").get<int>();
      r.groups.emplace_back(g.at("stable_id").get<std::string>(), m);
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
}

std::string report_tables_csv(const StatsReport& r) {
  std::ostringstream out;
  write_csv_row(out, {"section", "label", "value"});
  for (std::size_t b = 0; b < SizeHistogram::kLabels.size(); ++b)
    write_csv_row(out, {"size_histogram", std::string(SizeHistogram::kLabels[b]), std::to_string(r.histogram.count(b))});
  write_csv_row(out, {"mean", "stability", cell(r.mean_stability)});
  write_csv_row(out, {"mean", "density", cell(r.mean_density)});
  write_csv_row(out, {"mean", "cohesion", cell(r.mean_cohesion)});
  write_csv_row(out, {"total", "stable_groups", std::to_string(r.stable_group_count)});
  write_csv_row(out, {"total", "cohesion_separated", std::to_string(r.cohesion_separated)});
  std::int64_t temporary = 0;
  for (const auto& s : r.slots) temporary += s.temporary_groups;
  write_csv_row(out, {"total", "temporary_groups", std::to_string(temporary)});
  return out.str();
}

std::string report_series_csv(const StatsReport& r) {
  std::ostringstream out;
  write_csv_row(out, {"slot", "temporary_groups", "stable_groups", "nodes", "in_0", "in_1", "in_2", "in_3", "in_4plus",
                      "percent_not_in_stable"});
  for (const auto& s : r.slots) {
    std::vector<std::string> row = {std::to_string(s.slot_index), std::to_string(s.temporary_groups),
                                    std::to_string(s.stable_groups), std::to_string(s.nodes)};
    for (auto m : s.membership) row.push_back(std::to_string(m));
    row.push_back(format_double(s.percent_not_in_stable));
    write_csv_row(out, row);
  }
  return out.str();
}

std::vector<ReportDelta> compare_reports(const StatsReport& a, const StatsReport& b) {
  if (a.k != b.k) throw UsageError("reports differ in k (" + std::to_string(a.k) + " vs " + std::to_string(b.k) + ")");
  if (a.corpus_digest != b.corpus_digest) throw UsageError("reports come from different corpora");
  if (a.slots.size() != b.slots.size()) throw UsageError("reports have different slot counts");

  std::vector<ReportDelta> out;
  auto num = [](auto v) { return std::optional<double>(static_cast<double>(v)); };
  auto total_temporary = [](const StatsReport& r) {
    std::int64_t n = 0;
    for (const auto& s : r.slots) n += s.temporary_groups;
    return n;
  };
  auto mean_outside = [](const StatsReport& r) -> std::optional<double> {
    if (r.slots.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& s : r.slots) sum += s.percent_not_in_stable;
    return sum / static_cast<double>(r.slots.size());
  };
  auto users_in_groups = [](const StatsReport& r) {
    std::int64_t n = 0;
    for (const auto& s : r.slots) n += s.nodes - s.membership[0];
    return n;
  };
  out.push_back({"temporary_groups", num(total_temporary(a)), num(total_temporary(b))});
  out.push_back({"stable_groups", num(a.stable_group_count), num(b.stable_group_count)});
  out.push_back({"user_slots_in_stable_groups", num(users_in_groups(a)), num(users_in_groups(b))});
  out.push_back({"mean_percent_not_in_stable", mean_outside(a), mean_outside(b)});
  out.push_back({"mean_stability", a.mean_stability, b.mean_stability});
  out.push_back({"mean_density", a.mean_density, b.mean_density});
  out.push_back({"mean_cohesion", a.mean_cohesion, b.mean_cohesion});
  for (std::size_t bin = 0; bin < SizeHistogram::kLabels.size(); ++bin)
    out.push_back({"size_" + std::string(SizeHistogram::kLabels[bin]), num(a.histogram.count(bin)),
                   num(b.histogram.count(bin))});
  for (std::size_t t = 0; t < a.slots.size(); ++t) {
    const auto prefix = "slot_" + std::to_string(t) + "_";
    const auto& sa = a.slots[t];
    const auto& sb = b.slots[t];
    out.push_back({prefix + "temporary_groups", num(sa.temporary_groups), num(sb.temporary_groups)});
    out.push_back({prefix + "stable_groups", num(sa.stable_groups), num(sb.stable_groups)});
    out.push_back({prefix + "percent_not_in_stable", sa.percent_not_in_stable, sb.percent_not_in_stable});
    for (std::size_t m = 1; m < kMembershipLabels.size(); ++m)
      out.push_back({prefix + "in_" + std::string(kMembershipLabels[m]), num(sa.membership[m]), num(sb.membership[m])});
  }
  return out;
}

std::string deltas_csv(std::span<const ReportDelta> deltas) {
  std::ostringstream out;
  write_csv_row(out, {"metric", "a", "b", "delta"});
  for (const auto& d : deltas) write_csv_row(out, {d.metric, cell(d.a), cell(d.b), cell(d.delta())});
  return out.str();
}

}  // namespace percolate
