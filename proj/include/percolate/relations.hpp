#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "percolate/core.hpp"
#include "percolate/ingest.hpp"
#include "percolate/sentiment.hpp"

namespace percolate {

// Ways of turning comments into directed relations.
//  - PostNoSentiment: every comment points at the post author.
//  - CommentNoSentiment: a comment points at its addressee when known, else at the post author.
//  - Count*: CommentNoSentiment restricted to comments of the given polarity.
//  - Mean*: CommentNoSentiment edges kept when the pair's mean sentiment has the given polarity.
enum class RelationModel {
  PostNoSentiment,
  CommentNoSentiment,
  CountPositive,
  CountNegative,
  CountNeutral,
  CountPosPlusNeutral,
  MeanPositive,
  MeanNegative,
  MeanNeutral,
  MeanPosPlusNeutral,
};

inline constexpr std::array kAllRelationModels = {
    RelationModel::PostNoSentiment, RelationModel::CommentNoSentiment, RelationModel::CountPositive,
    RelationModel::CountNegative,   RelationModel::CountNeutral,       RelationModel::CountPosPlusNeutral,
    RelationModel::MeanPositive,    RelationModel::MeanNegative,       RelationModel::MeanNeutral,
    RelationModel::MeanPosPlusNeutral,
};

/// File-name friendly identifier: post, comment, count_pos, count_neg, count_neu,
/// count_posneu, mean_pos, mean_neg, mean_neu, mean_posneu.
std::string_view model_name(RelationModel model);
/// Accepts model_name() output and the short forms pn, cn, cs_p, cs_n, cs_i,
/// cs_pi, csa_p, csa_n, csa_i, csa_pi.
RelationModel parse_model(std::string_view name);

bool is_mean_model(RelationModel model) noexcept;
/// Whether the model admits the given polarity (of a comment or of a pair mean).
/// The two no-sentiment models admit everything.
bool admits(RelationModel model, Polarity polarity) noexcept;

/// Endpoint a comment is attributed to under `model`.
const UserId& edge_target(const Interaction& interaction, RelationModel model);

using Edge = std::pair<UserId, UserId>;

// Directed weighted graph of one (slot, model). Weights are interaction counts.
// Every edge endpoint is a node; nodes without edges do not exist.
class SlotGraph {
 public:
  static constexpr int kWholePeriod = -1;

  SlotGraph(int slot_index, RelationModel model) : slot_index_(slot_index), model_(model) {}

  /// Adds `weight` to src->dst. Self loops and non-positive weights are rejected.
  void add_edge(const UserId& src, const UserId& dst, std::int64_t weight = 1);

  int slot_index() const noexcept { return slot_index_; }
  RelationModel model() const noexcept { return model_; }
  const std::set<UserId>& nodes() const noexcept { return nodes_; }
  const std::map<Edge, std::int64_t>& edges() const noexcept { return edges_; }

  /// 0 when the edge is absent.
  std::int64_t weight(const UserId& src, const UserId& dst) const;
  std::int64_t total_weight() const noexcept;

  friend bool operator==(const SlotGraph&, const SlotGraph&) = default;

 private:
  int slot_index_;
  RelationModel model_;
  std::set<UserId> nodes_;
  std::map<Edge, std::int64_t> edges_;
};

struct BuildOptions {
  PolarityThresholds thresholds{};
  bool include_self_directed = false;  // self loops are never added to a graph
};

/// Interactions whose slot_ids contain `slot`.
std::vector<Interaction> interactions_in_slot(std::span<const Interaction> interactions, int slot);

/// Every interaction must carry `slot_index` (DomainError otherwise), unless
/// slot_index is SlotGraph::kWholePeriod, which aggregates everything given.
SlotGraph build_graph(int slot_index, std::span<const Interaction> interactions, RelationModel model,
                      const BuildOptions& options = {});

struct PruneStats {
  std::size_t edges_before = 0;
  std::size_t edges_after = 0;
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
  std::int64_t weight_before = 0;
  std::int64_t weight_after = 0;

  double edges_removed_fraction() const noexcept;
  double nodes_removed_fraction() const noexcept;
  double weight_removed_fraction() const noexcept;
};

struct PruneResult {
  SlotGraph graph;
  PruneStats stats;
};

/// Drops edges lighter than w_min and the nodes left without edges.
PruneResult prune(const SlotGraph& graph, std::int64_t w_min);

/// Keeps an edge of `graph` iff the same edge weighs at least w_min in `reference`
/// (used for whole-period pruning followed by slot restriction).
PruneResult prune_by_reference(const SlotGraph& graph, const SlotGraph& reference, std::int64_t w_min);

/// `src,dst,weight` with header, rows in lexicographic (src, dst) order.
void write_edge_list(std::ostream& out, const SlotGraph& graph);
SlotGraph read_edge_list(std::istream& in, int slot_index, RelationModel model);

}  // namespace percolate
