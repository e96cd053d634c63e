#pragma once

#include <span>
#include <string>
#include <vector>

#include "percolate/core.hpp"
#include "percolate/relations.hpp"

namespace percolate {

/// k members, every pair linked in at least one direction, and the one-way links
/// acyclic (so some ordering has every one-way link pointing down it).
struct DirectedKClique {
  MemberSet members;

  friend auto operator<=>(const DirectedKClique&, const DirectedKClique&) = default;
};

/// Checks the directed-clique conditions for `members` (any order, no duplicates) in `graph`.
bool is_directed_clique(std::span<const UserId> members, const SlotGraph& graph);

struct CliqueOptions {
  // Keep a clique only if the geometric mean of its pair weights is at least this
  // value; a pair linked both ways counts with its heavier direction. 0 disables.
  double min_intensity = 0.0;
};

/// All directed k-cliques, sorted. Requires k >= 3.
std::vector<DirectedKClique> enumerate_kcliques(const SlotGraph& graph, int k, const CliqueOptions& options = {});

struct TemporaryGroup {
  int slot_index = 0;
  RelationModel model = RelationModel::CommentNoSentiment;
  int k = 3;
  MemberSet members;
  std::string group_id;

  friend bool operator==(const TemporaryGroup&, const TemporaryGroup&) = default;
};

/// Hex digest of (slot, model, k, members); stable across runs and platforms.
std::string temporary_group_id(int slot_index, RelationModel model, int k, std::span<const UserId> members);

// Unions of k-cliques connected through shared (k-1)-subsets. Groups whose member
// set is contained in another group's set are dropped. Sorted by member list.
std::vector<TemporaryGroup> percolate(std::span<const DirectedKClique> cliques, int k, int slot_index,
                                      RelationModel model);

/// enumerate_kcliques + percolate. Throws ConfigError for k < 3.
std::vector<TemporaryGroup> detect(const SlotGraph& graph, int k, const CliqueOptions& options = {});

void write_groups_ndjson(std::ostream& out, std::span<const TemporaryGroup> groups);
std::vector<TemporaryGroup> read_groups_ndjson(std::istream& in);

}  // namespace percolate
