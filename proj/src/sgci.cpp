#include "percolate/sgci.hpp"

#include <algorithm>
#include <optional>

#include "json.hpp"
#include "percolate/util.hpp"

namespace percolate {

void MatchConfig::validate() const {
  if (!(jaccard_threshold > 0.0 && jaccard_threshold <= 1.0))
    throw ConfigError("jaccard threshold must lie in (0, 1]");
  if (ltmin < 1) throw ConfigError("ltmin must be at least 1");
}

double modified_jaccard(std::span<const UserId> a, std::span<const UserId> b) {
  if (a.empty() || b.empty()) throw DomainError("modified Jaccard of an empty set");
  const auto common = static_cast<double>(intersection_size(a, b));
  return std::max(common / static_cast<double>(a.size()), common / static_cast<double>(b.size()));
}

std::string_view transition_event_name(TransitionEvent e) {
  switch (e) {
    case TransitionEvent::Continue: return "continue";
    case TransitionEvent::Split: return "split";
    case TransitionEvent::Merge: return "merge";
  }
  return "continue";
}

TransitionEvent parse_transition_event(std::string_view name) {
  if (name == "continue") return TransitionEvent::Continue;
  if (name == "split") return TransitionEvent::Split;
  if (name == "merge") return TransitionEvent::Merge;
  throw ParseError("unknown transition event '" + std::string(name) + "'");
}

std::vector<GroupMatch> match_slots(std::span<const TemporaryGroup> earlier, std::span<const TemporaryGroup> later,
                                    const MatchConfig& config) {
  config.validate();
  std::vector<GroupMatch> matches;
  std::vector<int> successors(earlier.size(), 0);
  std::vector<int> predecessors(later.size(), 0);
  for (std::size_t i = 0; i < earlier.size(); ++i) {
    for (std::size_t j = 0; j < later.size(); ++j) {
      const double mj = modified_jaccard(earlier[i].members, later[j].members);
      if (mj < config.jaccard_threshold) continue;
      matches.push_back({i, j, mj, TransitionEvent::Continue});
      ++successors[i];
      ++predecessors[j];
    }
  }
  for (auto& m : matches) {
    if (successors[m.from] > 1) {
      m.event = TransitionEvent::Split;
    } else if (predecessors[m.to] > 1) {
      m.event = TransitionEvent::Merge;
    }
  }
  return matches;
}

std::string StableGroup::stable_id() const {
  std::string key;
  for (const auto& g : chain) {
    key += g.group_id;
    key += '\x1e';
  }
  return sha256_hex(key).substr(0, 16);
}

std::vector<StableGroup> build_stable_groups(const std::vector<std::vector<TemporaryGroup>>& per_slot,
                                             const MatchConfig& config) {
  config.validate();
  const std::size_t slots = per_slot.size();
  std::optional<std::pair<RelationModel, int>> family;
  for (std::size_t t = 0; t < slots; ++t) {
    for (const auto& g : per_slot[t]) {
      if (g.slot_index != static_cast<int>(t))
        throw DomainError("group " + g.group_id + " listed under slot " + std::to_string(t));
      if (!family) family.emplace(g.model, g.k);
      if (family->first != g.model || family->second != g.k)
        throw DomainError("stable groups must be built for a single (model, k)");
    }
  }

  struct Link {
    std::size_t to;
    double similarity;
    TransitionEvent event;
  };
  std::vector<std::vector<std::optional<Link>>> next(slots);
  std::vector<std::vector<bool>> has_predecessor(slots);
  for (std::size_t t = 0; t < slots; ++t) {
    next[t].resize(per_slot[t].size());
    has_predecessor[t].resize(per_slot[t].size(), false);
  }

  for (std::size_t t = 0; t + 1 < slots; ++t) {
    const auto& earlier = per_slot[t];
    const auto& later = per_slot[t + 1];
    auto matches = match_slots(earlier, later, config);
    std::sort(matches.begin(), matches.end(), [&](const GroupMatch& a, const GroupMatch& b) {
      if (a.similarity != b.similarity) return a.similarity > b.similarity;
      const auto& la = later[a.to].members;
      const auto& lb = later[b.to].members;
      if (la.size() != lb.size()) return la.size() > lb.size();
      if (la != lb) return la < lb;
      return earlier[a.from].members < earlier[b.from].members;
    });
    for (const auto& m : matches) {
      if (next[t][m.from] || has_predecessor[t + 1][m.to]) continue;
      next[t][m.from] = Link{m.to, m.similarity, m.event};
      has_predecessor[t + 1][m.to] = true;
    }
  }

  std::vector<StableGroup> stable;
  for (std::size_t t = 0; t < slots; ++t) {
    for (std::size_t i = 0; i < per_slot[t].size(); ++i) {
      if (has_predecessor[t][i]) continue;
      StableGroup sg;
      sg.model = per_slot[t][i].model;
      sg.k = per_slot[t][i].k;
      std::size_t slot = t;
      std::size_t index = i;
      sg.chain.push_back(per_slot[slot][index]);
      while (const auto& link = next[slot][index]) {
        sg.transition_similarity.push_back(link->similarity);
        sg.events.push_back(link->event);
        index = link->to;
        ++slot;
        sg.chain.push_back(per_slot[slot][index]);
      }
      if (sg.lifespan() >= config.ltmin) stable.push_back(std::move(sg));
    }
  }
  std::sort(stable.begin(), stable.end(), [](const StableGroup& a, const StableGroup& b) {
    if (a.first_slot() != b.first_slot()) return a.first_slot() < b.first_slot();
    return a.chain.front().members < b.chain.front().members;
  });
  return stable;
}

void write_stable_groups_ndjson(std::ostream& out, std::span<const StableGroup> groups) {
  for (const auto& sg : groups) {
    nlohmann::ordered_json j;
    j["stable_id"] = sg.stable_id();
    j["model"] = model_name(sg.model);
    j["k"] = sg.k;
    j["first_slot"] = sg.first_slot();
    j["lifespan"] = sg.lifespan();
    auto& chain = j["chain"] = nlohmann::ordered_json::array();
    for (const auto& g : sg.chain) {
      nlohmann::ordered_json entry;
      entry["slot"] = g.slot_index;
      entry["group_id"] = g.group_id;
      auto& members = entry["members"] = nlohmann::ordered_json::array();
      for (const auto& m : g.members) members.push_back(m.str());
      chain.push_back(std::move(entry));
    }
    j["transition_mj"] = sg.transition_similarity;
    auto& events = j["events"] = nlohmann::ordered_json::array();
    for (auto e : sg.events) events.push_back(transition_event_name(e));
    out << j.dump() << '\n';
  }
}

std::vector<StableGroup> read_stable_groups_ndjson(std::istream& in) {
  std::vector<StableGroup> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      StableGroup sg;
      sg.model = parse_model(j.at("model").get<std::string>());
      sg.k = j.at("k").get<int>();
      for (const auto& entry : j.at("chain")) {
        std::vector<UserId> members;
        for (const auto& m : entry.at("members")) members.emplace_back(m.get<std::string>());
        sg.chain.push_back({entry.at("slot").get<int>(), sg.model, sg.k, make_member_set(std::move(members)),
                            entry.at("group_id").get<std::string>()});
      }
      sg.transition_similarity = j.at("transition_mj").get<std::vector<double>>();
      for (const auto& e : j.at("events")) sg.events.push_back(parse_transition_event(e.get<std::string>()));
      if (sg.chain.empty() || sg.transition_similarity.size() + 1 != sg.chain.size() ||
          sg.events.size() + 1 != sg.chain.size())
        throw ParseError("inconsistent chain");
      for (std::size_t c = 1; c < sg.chain.size(); ++c)
        if (sg.chain[c].slot_index != sg.chain[c - 1].slot_index + 1) throw ParseError("chain slots not consecutive");
      out.push_back(std::move(sg));
    } catch (const std::exception& e) {
      throw ParseError("stable groups line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace percolate
