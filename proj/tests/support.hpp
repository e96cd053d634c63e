#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "percolate/cpm.hpp"
#include "percolate/ingest.hpp"
#include "percolate/relations.hpp"

namespace percolate::test {

using Rng = std::mt19937_64;

inline UserId user(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "u%02d", i);
  return UserId(buf);
}

inline MemberSet members(std::initializer_list<int> ids) {
  MemberSet out;
  for (int i : ids) out.push_back(user(i));
  return make_member_set(std::move(out));
}

inline MemberSet members_of(const std::vector<std::string>& names) {
  MemberSet out;
  for (const auto& n : names) out.emplace_back(n);
  return make_member_set(std::move(out));
}

inline TemporaryGroup group(int slot, MemberSet m, int k = 3,
                            RelationModel model = RelationModel::CommentNoSentiment) {
  TemporaryGroup g;
  g.slot_index = slot;
  g.model = model;
  g.k = k;
  g.members = std::move(m);
  g.group_id = temporary_group_id(slot, model, k, g.members);
  return g;
}

// Each ordered pair (i, j), i != j, gets an edge with probability p.
inline SlotGraph random_digraph(Rng& rng, int n, double p, int max_weight = 1) {
  SlotGraph g(0, RelationModel::CommentNoSentiment);
  std::bernoulli_distribution edge(p);
  std::uniform_int_distribution<int> weight(1, max_weight);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && edge(rng)) g.add_edge(user(i), user(j), weight(rng));
  return g;
}

inline Interaction comment(std::string id, const UserId& from, std::optional<UserId> to, const UserId& post_author,
                           double sentiment, std::vector<int> slots = {0}) {
  Interaction x{.event_id = std::move(id),
                .initiator = from,
                .addressee = std::move(to),
                .post_author = post_author,
                .slot_ids = std::move(slots),
                .kind = EventKind::CommentOnPost,
                .sentiment = sentiment,
                .self_directed = false,
                .timestamp = {}};
  if (x.addressee) x.kind = EventKind::CommentOnComment;
  x.self_directed = from == (x.addressee ? *x.addressee : post_author);
  return x;
}

// Random comment stream over `users` users in slot 0. Sentiments are drawn from
// a small set that includes the classification boundaries.
inline std::vector<Interaction> random_interactions(Rng& rng, int users, int count) {
  static constexpr double kScores[] = {-1.0, -0.8, -0.3, -0.01, 0.0, 0.1, 0.3, 0.31, 0.5, 0.8, 1.0};
  std::uniform_int_distribution<int> pick(0, users - 1);
  std::uniform_int_distribution<std::size_t> score(0, std::size(kScores) - 1);
  std::bernoulli_distribution addressed(0.5);
  std::vector<Interaction> out;
  for (int i = 0; i < count; ++i) {
    const UserId from = user(pick(rng));
    const UserId author = user(pick(rng));
    std::optional<UserId> to;
    if (addressed(rng)) to = user(pick(rng));
    out.push_back(comment("x" + std::to_string(i), from, to, author, kScores[score(rng)]));
  }
  return out;
}

}  // namespace percolate::test
