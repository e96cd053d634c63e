#include "percolate/cpm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "json.hpp"
#include "percolate/util.hpp"

namespace percolate {

namespace {

// Dense-index view of a SlotGraph. Node i is the i-th smallest UserId.
class CompactDigraph {
 public:
  explicit CompactDigraph(const SlotGraph& graph) : ids_(graph.nodes().begin(), graph.nodes().end()) {
    const auto n = ids_.size();
    out_.resize(n);
    out_weight_.resize(n);
    undirected_.resize(n);
    for (const auto& [edge, w] : graph.edges()) {
      const int u = index_of(edge.first);
      const int v = index_of(edge.second);
      out_[u].push_back(v);  // edges() iterates in (src, dst) order, so rows stay sorted
      out_weight_[u].push_back(w);
      undirected_[u].push_back(v);
      undirected_[v].push_back(u);
    }
    for (auto& adj : undirected_) {
      std::sort(adj.begin(), adj.end());
      adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
  }

  int size() const noexcept { return static_cast<int>(ids_.size()); }
  const UserId& id(int v) const { return ids_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& neighbors(int v) const { return undirected_[static_cast<std::size_t>(v)]; }

  std::int64_t arc_weight(int u, int v) const {
    const auto& row = out_[static_cast<std::size_t>(u)];
    const auto it = std::lower_bound(row.begin(), row.end(), v);
    if (it == row.end() || *it != v) return 0;
    return out_weight_[static_cast<std::size_t>(u)][static_cast<std::size_t>(it - row.begin())];
  }
  bool arc(int u, int v) const { return arc_weight(u, v) > 0; }

 private:
  int index_of(const UserId& id) const {
    return static_cast<int>(std::lower_bound(ids_.begin(), ids_.end(), id) - ids_.begin());
  }

  std::vector<UserId> ids_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<std::int64_t>> out_weight_;
  std::vector<std::vector<int>> undirected_;
};

// Kahn's algorithm over the one-way links among `members`; pairs linked both
// ways impose no order.
template <typename ArcFn>
bool one_way_links_acyclic(std::size_t count, ArcFn arc) {
  std::vector<int> indegree(count, 0);
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t b = 0; b < count; ++b)
      if (a != b && arc(a, b) && !arc(b, a)) ++indegree[b];
  std::vector<std::size_t> ready;
  for (std::size_t a = 0; a < count; ++a)
    if (indegree[a] == 0) ready.push_back(a);
  std::size_t seen = 0;
  while (!ready.empty()) {
    const auto a = ready.back();
    ready.pop_back();
    ++seen;
    for (std::size_t b = 0; b < count; ++b)
      if (a != b && arc(a, b) && !arc(b, a) && --indegree[b] == 0) ready.push_back(b);
  }
  return seen == count;
}

// Smallest-last (degeneracy) order; returns rank[v].
std::vector<int> degeneracy_rank(const CompactDigraph& g) {
  const int n = g.size();
  std::vector<int> degree(static_cast<std::size_t>(n));
  std::set<std::pair<int, int>> queue;
  for (int v = 0; v < n; ++v) {
    degree[v] = static_cast<int>(g.neighbors(v).size());
    queue.emplace(degree[v], v);
  }
  std::vector<int> rank(static_cast<std::size_t>(n), -1);
  for (int r = 0; r < n; ++r) {
    const auto [d, v] = *queue.begin();
    queue.erase(queue.begin());
    rank[v] = r;
    for (int u : g.neighbors(v)) {
      if (rank[u] >= 0) continue;
      queue.erase({degree[u], u});
      queue.emplace(--degree[u], u);
    }
  }
  return rank;
}

class CliqueEnumerator {
 public:
  CliqueEnumerator(const CompactDigraph& g, int k, const CliqueOptions& options)
      : g_(g), k_(static_cast<std::size_t>(k)), options_(options) {
    const auto rank = degeneracy_rank(g);
    forward_.resize(static_cast<std::size_t>(g.size()));
    for (int v = 0; v < g.size(); ++v)
      for (int u : g.neighbors(v))
        if (rank[u] > rank[v]) forward_[v].push_back(u);  // neighbors() is sorted, so is forward_
  }

  std::vector<std::vector<int>> run() {
    for (int v = 0; v < g_.size(); ++v) {
      current_.assign(1, v);
      extend(forward_[v]);
    }
    std::sort(found_.begin(), found_.end());
    return std::move(found_);
  }

 private:
  void extend(const std::vector<int>& candidates) {
    if (current_.size() == k_) {
      emit();
      return;
    }
    if (current_.size() + candidates.size() < k_) return;
    std::vector<int> next;
    for (int u : candidates) {
      current_.push_back(u);
      // A one-way cycle among a subset survives in every superset.
      if (acyclic()) {
        next.clear();
        const auto& fu = forward_[u];
        std::set_intersection(candidates.begin(), candidates.end(), fu.begin(), fu.end(), std::back_inserter(next));
        extend(next);
      }
      current_.pop_back();
    }
  }

  bool acyclic() const {
    return one_way_links_acyclic(current_.size(),
                                 [&](std::size_t a, std::size_t b) { return g_.arc(current_[a], current_[b]); });
  }

  void emit() {
    if (options_.min_intensity > 0.0) {
      double log_sum = 0.0;
      std::size_t pairs = 0;
      for (std::size_t a = 0; a < k_; ++a)
        for (std::size_t b = a + 1; b < k_; ++b, ++pairs)
          log_sum += std::log(static_cast<double>(
              std::max(g_.arc_weight(current_[a], current_[b]), g_.arc_weight(current_[b], current_[a]))));
      if (std::exp(log_sum / static_cast<double>(pairs)) < options_.min_intensity) return;
    }
    auto members = current_;
    std::sort(members.begin(), members.end());
    found_.push_back(std::move(members));
  }

  const CompactDigraph& g_;
  std::size_t k_;
  CliqueOptions options_;
  std::vector<std::vector<int>> forward_;
  std::vector<int> current_;
  std::vector<std::vector<int>> found_;
};

struct VectorHash {
  std::size_t operator()(const std::vector<int>& v) const noexcept {
    std::size_t h = 0xcbf29ce484222325ULL;
    for (int x : v) h = (h ^ static_cast<std::size_t>(x)) * 0x100000001b3ULL;
    return h;
  }
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

void require_k(int k) {
  if (k < 3) throw ConfigError("clique size k must be at least 3, got " + std::to_string(k));
}

}  // namespace

bool is_directed_clique(std::span<const UserId> members, const SlotGraph& graph) {
  for (std::size_t a = 0; a < members.size(); ++a)
    for (std::size_t b = a + 1; b < members.size(); ++b)
      if (members[a] == members[b] || (!graph.weight(members[a], members[b]) && !graph.weight(members[b], members[a])))
        return false;
  return one_way_links_acyclic(members.size(),
                               [&](std::size_t a, std::size_t b) { return graph.weight(members[a], members[b]) > 0; });
}

std::vector<DirectedKClique> enumerate_kcliques(const SlotGraph& graph, int k, const CliqueOptions& options) {
  require_k(k);
  const CompactDigraph g(graph);
  std::vector<DirectedKClique> out;
  for (const auto& clique : CliqueEnumerator(g, k, options).run()) {
    MemberSet members;
    members.reserve(clique.size());
    for (int v : clique) members.push_back(g.id(v));  // ids are sorted, so members are too
    out.push_back({std::move(members)});
  }
  return out;
}

std::string temporary_group_id(int slot_index, RelationModel model, int k, std::span<const UserId> members) {
  std::string key = std::to_string(slot_index);
  key += '\x1f';
  key += model_name(model);
  key += '\x1f';
  key += std::to_string(k);
  for (const auto& m : members) {
    key += '\x1e';
    key += m.str();
  }
  return sha256_hex(key).substr(0, 16);
}

std::vector<TemporaryGroup> percolate(std::span<const DirectedKClique> cliques, int k, int slot_index,
                                      RelationModel model) {
  require_k(k);
  MemberSet universe;
  for (const auto& c : cliques) {
    if (c.members.size() != static_cast<std::size_t>(k))
      throw DomainError("clique of size " + std::to_string(c.members.size()) + " given for k=" + std::to_string(k));
    universe.insert(universe.end(), c.members.begin(), c.members.end());
  }
  universe = make_member_set(std::move(universe));
  auto index_of = [&](const UserId& id) {
    return static_cast<int>(std::lower_bound(universe.begin(), universe.end(), id) - universe.begin());
  };

  std::vector<std::vector<int>> indexed;
  indexed.reserve(cliques.size());
  for (const auto& c : cliques) {
    std::vector<int> v;
    for (const auto& m : c.members) v.push_back(index_of(m));
    std::sort(v.begin(), v.end());
    indexed.push_back(std::move(v));
  }
  std::sort(indexed.begin(), indexed.end());
  indexed.erase(std::unique(indexed.begin(), indexed.end()), indexed.end());

  // Two cliques are adjacent iff they share k-1 members, i.e. a (k-1)-subset.
  DisjointSets sets(indexed.size());
  std::unordered_map<std::vector<int>, std::size_t, VectorHash> first_owner;
  std::vector<int> face;
  for (std::size_t c = 0; c < indexed.size(); ++c) {
    for (std::size_t skip = 0; skip < indexed[c].size(); ++skip) {
      face.clear();
      for (std::size_t j = 0; j < indexed[c].size(); ++j)
        if (j != skip) face.push_back(indexed[c][j]);
      auto [it, inserted] = first_owner.try_emplace(face, c);
      if (!inserted) sets.unite(it->second, c);
    }
  }

  std::unordered_map<std::size_t, std::vector<int>> components;
  for (std::size_t c = 0; c < indexed.size(); ++c) {
    auto& nodes = components[sets.find(c)];
    nodes.insert(nodes.end(), indexed[c].begin(), indexed[c].end());
  }
  std::vector<std::vector<int>> unions;
  unions.reserve(components.size());
  for (auto& [root, nodes] : components) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    unions.push_back(std::move(nodes));
  }
  // Largest first, so a group can only be contained in one already kept.
  std::sort(unions.begin(), unions.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() > b.size() : a < b;
  });
  std::vector<std::vector<int>> kept;
  std::vector<std::vector<std::size_t>> kept_by_node(universe.size());
  for (auto& u : unions) {
    bool contained = false;
    for (std::size_t g : kept_by_node[static_cast<std::size_t>(u.front())]) {
      if (std::includes(kept[g].begin(), kept[g].end(), u.begin(), u.end())) {
        contained = true;
        break;
      }
    }
    if (contained) continue;
    for (int v : u) kept_by_node[static_cast<std::size_t>(v)].push_back(kept.size());
    kept.push_back(std::move(u));
  }
  std::sort(kept.begin(), kept.end());  // index order == UserId order

  std::vector<TemporaryGroup> groups;
  groups.reserve(kept.size());
  for (const auto& nodes : kept) {
    MemberSet members;
    members.reserve(nodes.size());
    for (int v : nodes) members.push_back(universe[static_cast<std::size_t>(v)]);
    auto id = temporary_group_id(slot_index, model, k, members);
    groups.push_back({slot_index, model, k, std::move(members), std::move(id)});
  }
  return groups;
}

std::vector<TemporaryGroup> detect(const SlotGraph& graph, int k, const CliqueOptions& options) {
  require_k(k);
  const auto cliques = enumerate_kcliques(graph, k, options);
  return percolate(cliques, k, graph.slot_index(), graph.model());
}

void write_groups_ndjson(std::ostream& out, std::span<const TemporaryGroup> groups) {
  for (const auto& g : groups) {
    nlohmann::ordered_json j;
    j["group_id"] = g.group_id;
    j["slot"] = g.slot_index;
    j["model"] = model_name(g.model);
    j["k"] = g.k;
    j["size"] = g.members.size();
    auto& members = j["members"] = nlohmann::ordered_json::array();
    for (const auto& m : g.members) members.push_back(m.str());
    out << j.dump() << '\n';
  }
}

std::vector<TemporaryGroup> read_groups_ndjson(std::istream& in) {
  std::vector<TemporaryGroup> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      std::vector<UserId> members;
      for (const auto& m : j.at("members")) members.emplace_back(m.get<std::string>());
      TemporaryGroup g{j.at("slot").get<int>(), parse_model(j.at("model").get<std::string>()), j.at("k").get<int>(),
                       make_member_set(std::move(members)), j.at("group_id").get<std::string>()};
      if (g.members.size() < static_cast<std::size_t>(g.k)) throw ParseError("group smaller than k");
      out.push_back(std::move(g));
    } catch (const std::exception& e) {
      throw ParseError("groups line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace percolate
