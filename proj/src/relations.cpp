#include "percolate/relations.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "percolate/util.hpp"

namespace percolate {

std::string_view model_name(RelationModel model) {
  switch (model) {
    case RelationModel::PostNoSentiment: return "post";
    case RelationModel::CommentNoSentiment: return "comment";
    case RelationModel::CountPositive: return "count_pos";
    case RelationModel::CountNegative: return "count_neg";
    case RelationModel::CountNeutral: return "count_neu";
    case RelationModel::CountPosPlusNeutral: return "count_posneu";
    case RelationModel::MeanPositive: return "mean_pos";
    case RelationModel::MeanNegative: return "mean_neg";
    case RelationModel::MeanNeutral: return "mean_neu";
    case RelationModel::MeanPosPlusNeutral: return "mean_posneu";
  }
  return "comment";
}

RelationModel parse_model(std::string_view raw) {
  static constexpr std::array<std::string_view, 10> short_names = {
      "pn", "cn", "cs_p", "cs_n", "cs_i", "cs_pi", "csa_p", "csa_n", "csa_i", "csa_pi"};
  const auto name = trim(raw);
  for (std::size_t i = 0; i < kAllRelationModels.size(); ++i) {
    if (name == model_name(kAllRelationModels[i]) || name == short_names[i]) return kAllRelationModels[i];
  }
  throw ConfigError("unknown relation model '" + std::string(raw) + "'");
}

bool is_mean_model(RelationModel model) noexcept {
  switch (model) {
    case RelationModel::MeanPositive:
    case RelationModel::MeanNegative:
    case RelationModel::MeanNeutral:
    case RelationModel::MeanPosPlusNeutral:
      return true;
    default:
      return false;
  }
}

bool admits(RelationModel model, Polarity p) noexcept {
  switch (model) {
    case RelationModel::PostNoSentiment:
    case RelationModel::CommentNoSentiment:
      return true;
    case RelationModel::CountPositive:
    case RelationModel::MeanPositive:
      return p == Polarity::Positive;
    case RelationModel::CountNegative:
    case RelationModel::MeanNegative:
      return p == Polarity::Negative;
    case RelationModel::CountNeutral:
    case RelationModel::MeanNeutral:
      return p == Polarity::Neutral;
    case RelationModel::CountPosPlusNeutral:
    case RelationModel::MeanPosPlusNeutral:
      return p != Polarity::Negative;
  }
  return false;
}

const UserId& edge_target(const Interaction& interaction, RelationModel model) {
  if (model == RelationModel::PostNoSentiment || !interaction.addressee) return interaction.post_author;
  return *interaction.addressee;
}

void SlotGraph::add_edge(const UserId& src, const UserId& dst, std::int64_t weight) {
  if (src == dst) throw DomainError("self loop on '" + src.str() + "'");
  if (weight <= 0) throw DomainError("edge weight must be positive");
  nodes_.insert(src);
  nodes_.insert(dst);
  edges_[{src, dst}] += weight;
}

std::int64_t SlotGraph::weight(const UserId& src, const UserId& dst) const {
  const auto it = edges_.find({src, dst});
  return it == edges_.end() ? 0 : it->second;
}

std::int64_t SlotGraph::total_weight() const noexcept {
  std::int64_t total = 0;
  for (const auto& [e, w] : edges_) total += w;
  return total;
}

std::vector<Interaction> interactions_in_slot(std::span<const Interaction> interactions, int slot) {
  std::vector<Interaction> out;
  for (const auto& i : interactions) {
    if (std::binary_search(i.slot_ids.begin(), i.slot_ids.end(), slot)) out.push_back(i);
  }
  return out;
}

SlotGraph build_graph(int slot_index, std::span<const Interaction> interactions, RelationModel model,
                      const BuildOptions& options) {
  SlotGraph graph(slot_index, model);
  const bool mean = is_mean_model(model);
  struct PairAccumulator {
    std::int64_t count = 0;
    double sentiment_sum = 0.0;
  };
  std::map<Edge, PairAccumulator> pairs;
  for (const auto& i : interactions) {
    if (slot_index != SlotGraph::kWholePeriod &&
        !std::binary_search(i.slot_ids.begin(), i.slot_ids.end(), slot_index))
      throw DomainError("interaction " + i.event_id + " is not in slot " + std::to_string(slot_index));
    const UserId& target = edge_target(i, model);
    if (target == i.initiator) continue;  // self loops are meaningless for cliques
    if (i.self_directed && !options.include_self_directed) continue;
    if (!mean && !admits(model, classify(i.sentiment, options.thresholds))) continue;
    auto& acc = pairs[{i.initiator, target}];
    ++acc.count;
    acc.sentiment_sum += i.sentiment;
  }
  for (const auto& [edge, acc] : pairs) {
    if (mean) {
      const double average = acc.sentiment_sum / static_cast<double>(acc.count);
      if (!admits(model, classify(average, options.thresholds))) continue;
    }
    graph.add_edge(edge.first, edge.second, acc.count);
  }
  return graph;
}

double PruneStats::edges_removed_fraction() const noexcept {
  return edges_before ? static_cast<double>(edges_before - edges_after) / static_cast<double>(edges_before) : 0.0;
}
double PruneStats::nodes_removed_fraction() const noexcept {
  return nodes_before ? static_cast<double>(nodes_before - nodes_after) / static_cast<double>(nodes_before) : 0.0;
}
double PruneStats::weight_removed_fraction() const noexcept {
  return weight_before ? static_cast<double>(weight_before - weight_after) / static_cast<double>(weight_before)
                       : 0.0;
}

namespace {

template <typename Keep>
PruneResult prune_if(const SlotGraph& graph, Keep keep) {
  SlotGraph out(graph.slot_index(), graph.model());
  for (const auto& [edge, w] : graph.edges()) {
    if (keep(edge, w)) out.add_edge(edge.first, edge.second, w);
  }
  PruneStats stats{graph.edges().size(), out.edges().size(), graph.nodes().size(),
                   out.nodes().size(),   graph.total_weight(), out.total_weight()};
  return {std::move(out), stats};
}

}  // namespace

PruneResult prune(const SlotGraph& graph, std::int64_t w_min) {
  if (w_min < 1) throw ConfigError("w_min must be at least 1");
  return prune_if(graph, [&](const Edge&, std::int64_t w) { return w >= w_min; });
}

PruneResult prune_by_reference(const SlotGraph& graph, const SlotGraph& reference, std::int64_t w_min) {
  if (w_min < 1) throw ConfigError("w_min must be at least 1");
  return prune_if(graph,
                  [&](const Edge& e, std::int64_t) { return reference.weight(e.first, e.second) >= w_min; });
}

void write_edge_list(std::ostream& out, const SlotGraph& graph) {
  out << "src,dst,weight\n";
  for (const auto& [edge, w] : graph.edges())
    write_csv_row(out, {edge.first.str(), edge.second.str(), std::to_string(w)});
}

SlotGraph read_edge_list(std::istream& in, int slot_index, RelationModel model) {
  SlotGraph graph(slot_index, model);
  auto header = read_csv_record(in);
  if (!header || *header != std::vector<std::string>{"src", "dst", "weight"})
    throw ParseError("edge list must start with header src,dst,weight");
  std::size_t row = 1;
  while (auto rec = read_csv_record(in)) {
    ++row;
    if (rec->size() == 1 && rec->front().empty()) continue;
    if (rec->size() != 3) throw ParseError("edge list row " + std::to_string(row) + ": expected 3 fields");
    std::int64_t w = 0;
    const auto& ws = (*rec)[2];
    auto [ptr, ec] = std::from_chars(ws.data(), ws.data() + ws.size(), w);
    if (ec != std::errc{} || ptr != ws.data() + ws.size() || w <= 0)
      throw ParseError("edge list row " + std::to_string(row) + ": bad weight '" + ws + "'");
    graph.add_edge(UserId((*rec)[0]), UserId((*rec)[1]), w);
  }
  return graph;
}

}  // namespace percolate
