#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "percolate/core.hpp"
#include "percolate/cpm.hpp"
#include "percolate/relations.hpp"
#include "percolate/sgci.hpp"

namespace percolate {

/// Internal directed edges over n(n-1). DomainError for fewer than 2 members or
/// members missing from the graph.
double density(std::span<const UserId> members, const SlotGraph& graph);

/// Mean over chain transitions of |A∩B| / |A∪B|; nullopt for a single-slot chain.
std::optional<double> stability(const StableGroup& group);

struct Cohesion {
  double value = 0.0;      // meaningful when !separated
  bool separated = false;  // internal edges but no boundary edges: infinite ratio

  friend bool operator==(const Cohesion&, const Cohesion&) = default;
};

/// Mean internal edge weight over mean boundary edge weight. Boundary edges have
/// exactly one endpoint in the group, either direction. No internal edges -> 0.
Cohesion cohesion(std::span<const UserId> members, const SlotGraph& graph);

struct GroupMetrics {
  double density = 0.0;
  std::optional<double> stability;
  std::optional<double> cohesion;  // mean over chain entries with a finite value
  int separated_slots = 0;         // chain entries whose cohesion was infinite
  int size = 0;                    // mean member count over the chain, rounded half up
  int lifespan = 0;
};

/// Lookup of the slot graph a chain entry was detected on.
using GraphLookup = std::function<const SlotGraph&(int slot_index)>;

/// Density and cohesion are averaged over the chain's slots.
GroupMetrics measure(const StableGroup& group, const GraphLookup& graphs);

class SizeHistogram {
 public:
  static constexpr std::array<std::string_view, 12> kLabels = {"3", "4", "5", "6", "7", "8", "9", "10",
                                                               "11-50", "51-100", "101-200", ">200"};
  /// Bin index for a group size; sizes below 3 land in the first bin.
  static std::size_t bin_of(int size) noexcept;

  void add(int size) { ++counts_[bin_of(size)]; }
  std::int64_t count(std::size_t bin) const { return counts_.at(bin); }
  std::int64_t total() const noexcept;
  const std::array<std::int64_t, 12>& counts() const noexcept { return counts_; }

 private:
  std::array<std::int64_t, 12> counts_{};
};

struct SlotStats {
  int slot_index = 0;
  std::int64_t temporary_groups = 0;
  std::int64_t stable_groups = 0;  // stable chains passing through this slot
  std::int64_t nodes = 0;
  std::array<std::int64_t, 5> membership{};  // users in exactly 0, 1, 2, 3, 4+ stable groups
  double percent_not_in_stable = 0.0;
};

struct StatsReport {
  std::string model;
  int k = 3;
  std::string corpus_digest;
  std::vector<SlotStats> slots;
  SizeHistogram histogram;
  std::int64_t stable_group_count = 0;
  std::optional<double> mean_stability;
  std::optional<double> mean_density;
  std::optional<double> mean_cohesion;  // chains with no finite cohesion excluded
  std::int64_t cohesion_separated = 0;  // stable groups with at least one infinite-cohesion slot
  std::vector<std::pair<std::string, GroupMetrics>> groups;  // stable_id -> metrics
};

/// per_slot_groups[t] and graphs[t] describe slot t; all for one (model, k).
StatsReport corpus_stats(const std::vector<std::vector<TemporaryGroup>>& per_slot_groups,
                         std::span<const StableGroup> stable, std::span<const SlotGraph> graphs,
                         RelationModel model, int k, std::string corpus_digest = {});

std::string report_json(const StatsReport& report);
StatsReport parse_report_json(std::string_view text);
/// Flat `section,label,value` table: size histogram, mean measures, totals.
std::string report_tables_csv(const StatsReport& report);
/// One row per slot: counts, membership buckets, percent not in stable groups.
std::string report_series_csv(const StatsReport& report);

struct ReportDelta {
  std::string metric;
  std::optional<double> a;
  std::optional<double> b;
  std::optional<double> delta() const {
    if (!a || !b) return std::nullopt;
    return *b - *a;
  }
};

/// Side-by-side b - a. UsageError when k or corpus digest differ.
std::vector<ReportDelta> compare_reports(const StatsReport& a, const StatsReport& b);
std::string deltas_csv(std::span<const ReportDelta> deltas);

}  // namespace percolate
