#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "percolate/core.hpp"
#include "percolate/sgci.hpp"
#include "support.hpp"

using namespace percolate;
using percolate::test::group;
using percolate::test::members;

namespace {

using Stream = std::vector<std::vector<TemporaryGroup>>;

double classical_jaccard(const MemberSet& a, const MemberSet& b) {
  return static_cast<double>(intersection_size(a, b)) / static_cast<double>(union_size(a, b));
}

MemberSet random_set(test::Rng& rng, int universe, int min_size, int max_size) {
  std::vector<int> ids(static_cast<std::size_t>(universe));
  for (int i = 0; i < universe; ++i) ids[static_cast<std::size_t>(i)] = i;
  std::shuffle(ids.begin(), ids.end(), rng);
  std::uniform_int_distribution<int> size(min_size, max_size);
  MemberSet out;
  for (int i = 0, n = size(rng); i < n; ++i) out.push_back(test::user(ids[static_cast<std::size_t>(i)]));
  return make_member_set(std::move(out));
}

// Groups drift: each slot keeps some groups from the previous one with a member
// or two swapped, and adds fresh ones.
Stream random_stream(test::Rng& rng, int slots) {
  Stream per_slot(static_cast<std::size_t>(slots));
  std::uniform_int_distribution<int> fresh(0, 2), swaps(0, 2), who(0, 14);
  std::bernoulli_distribution keep(0.7);
  for (int t = 0; t < slots; ++t) {
    std::set<MemberSet> sets;
    if (t > 0)
      for (const auto& g : per_slot[static_cast<std::size_t>(t - 1)]) {
        if (!keep(rng)) continue;
        MemberSet m = g.members;
        for (int s = swaps(rng); s > 0; --s) {
          m.erase(m.begin() + static_cast<std::ptrdiff_t>(rng() % m.size()));
          m.push_back(test::user(who(rng)));
          m = make_member_set(std::move(m));
        }
        if (m.size() >= 3) sets.insert(m);
      }
    for (int f = fresh(rng); f > 0; --f) sets.insert(random_set(rng, 15, 3, 6));
    for (const auto& m : sets) per_slot[static_cast<std::size_t>(t)].push_back(group(t, m));
  }
  return per_slot;
}

using Key = std::pair<int, std::string>;  // (slot, group_id)

std::vector<std::vector<Key>> chain_keys(const std::vector<StableGroup>& groups) {
  std::vector<std::vector<Key>> out;
  for (const auto& sg : groups) {
    std::vector<Key> keys;
    for (const auto& g : sg.chain) keys.emplace_back(g.slot_index, g.group_id);
    out.push_back(std::move(keys));
  }
  return out;
}

bool is_contiguous_part(const std::vector<Key>& part, const std::vector<Key>& whole) {
  return std::search(whole.begin(), whole.end(), part.begin(), part.end()) != whole.end();
}

}  // namespace

TEST(ModifiedJaccard, Examples) {
  EXPECT_EQ(modified_jaccard(members({1, 2, 3}), members({2, 3, 4, 5, 6})), 2.0 / 3.0);
  EXPECT_EQ(modified_jaccard(members({1, 2, 3}), members({1, 2, 3})), 1.0);
  EXPECT_EQ(modified_jaccard(members({1, 2}), members({3, 4})), 0.0);
  EXPECT_THROW(modified_jaccard(members({}), members({1})), DomainError);
}

TEST(ModifiedJaccard, Properties) {
  test::Rng rng(41);
  for (int i = 0; i < 5000; ++i) {
    const auto a = random_set(rng, 12, 1, 8);
    const auto b = random_set(rng, 12, 1, 8);
    const double mj = modified_jaccard(a, b);
    const double j = classical_jaccard(a, b);
    ASSERT_EQ(mj, modified_jaccard(b, a));
    ASSERT_GE(mj, j);
    ASSERT_GE(mj, 0.0);
    ASSERT_LE(mj, 1.0);
    ASSERT_EQ(mj == j, a == b || intersection_size(a, b) == 0);
  }
}

TEST(MatchSlots, Labels) {
  const std::vector earlier = {group(0, members({1, 2, 3, 4}))};
  const std::vector later = {group(1, members({2, 3, 4, 5}))};
  const auto m = match_slots(earlier, later, {});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].similarity, 0.75);
  EXPECT_EQ(m[0].event, TransitionEvent::Continue);

  const std::vector big = {group(0, members({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}))};
  const std::vector halves = {group(1, members({1, 2, 3, 4, 5})), group(1, members({6, 7, 8, 9, 10}))};
  const auto split = match_slots(big, halves, {});
  ASSERT_EQ(split.size(), 2u);
  for (const auto& x : split) {
    EXPECT_EQ(x.similarity, 1.0);
    EXPECT_EQ(x.event, TransitionEvent::Split);
  }
  const auto merge = match_slots(std::vector{group(0, members({1, 2, 3, 4, 5})), group(0, members({6, 7, 8, 9, 10}))},
                                 std::vector{group(1, members({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}))}, {});
  ASSERT_EQ(merge.size(), 2u);
  EXPECT_EQ(merge[0].event, TransitionEvent::Merge);

  EXPECT_TRUE(match_slots(earlier, std::vector{group(1, members({7, 8, 9}))}, {}).empty());
}

TEST(StableGroups, LifespanThreshold) {
  const auto g = members({1, 2, 3, 4});
  const Stream three = {{group(0, g)}, {group(1, g)}, {group(2, g)}};
  const auto stable = build_stable_groups(three, {});
  ASSERT_EQ(stable.size(), 1u);
  EXPECT_EQ(stable[0].lifespan(), 3);
  EXPECT_EQ(stable[0].transition_similarity, (std::vector{1.0, 1.0}));

  const Stream two = {{group(0, g)}, {group(1, g)}};
  EXPECT_TRUE(build_stable_groups(two, {}).empty());
}

TEST(StableGroups, DriftingChain) {
  const Stream drift = {{group(0, members({1, 2, 3, 4}))},
                        {group(1, members({2, 3, 4, 5}))},
                        {group(2, members({3, 4, 5, 6}))},
                        {group(3, members({4, 5, 6, 7}))}};
  const auto stable = build_stable_groups(drift, {});
  ASSERT_EQ(stable.size(), 1u);
  EXPECT_EQ(stable[0].lifespan(), 4);
  EXPECT_EQ(stable[0].transition_similarity, (std::vector{0.75, 0.75, 0.75}));
}

TEST(StableGroups, SplitFollowsBestSuccessor) {
  const Stream s = {{group(0, members({1, 2, 3, 4, 5, 6}))},
                    {group(1, members({1, 2, 3})), group(1, members({1, 2, 3, 4, 5}))},
                    {group(2, members({1, 2, 4, 5, 7}))}};
  const auto stable = build_stable_groups(s, {});
  ASSERT_EQ(stable.size(), 1u);
  // Both successors score 1.0; the larger one wins.
  EXPECT_EQ(stable[0].chain[1].members, members({1, 2, 3, 4, 5}));
  EXPECT_EQ(stable[0].events[0], TransitionEvent::Split);
}

TEST(StableGroups, RejectsMisplacedGroups) {
  const Stream s = {{group(1, members({1, 2, 3}))}};
  EXPECT_THROW(build_stable_groups(s, {}), DomainError);
  EXPECT_THROW(build_stable_groups({}, {.jaccard_threshold = 0.0, .ltmin = 3}), ConfigError);
  EXPECT_THROW(build_stable_groups({}, {.jaccard_threshold = 0.5, .ltmin = 0}), ConfigError);
}

// A higher threshold can cut one long chain into two that both still qualify,
// so the number of stable groups is not monotone in the threshold.
TEST(StableGroups, HigherThresholdCanSplitAChain) {
  const auto a = members({1, 2, 3, 4, 5});
  const auto b = members({1, 2, 3, 6, 7});  // MJ(a, b) = 0.6
  const Stream s = {{group(0, a)}, {group(1, a)}, {group(2, a)}, {group(3, b)}, {group(4, b)}, {group(5, b)}};
  EXPECT_EQ(build_stable_groups(s, {.jaccard_threshold = 0.5, .ltmin = 3}).size(), 1u);
  EXPECT_EQ(build_stable_groups(s, {.jaccard_threshold = 0.7, .ltmin = 3}).size(), 2u);
}

TEST(StableGroups, StreamProperties) {
  test::Rng rng(42);
  const std::vector<double> thresholds = {0.3, 0.5, 0.6, 0.75, 0.9, 1.0};
  for (int trial = 0; trial < 200; ++trial) {
    const auto stream = random_stream(rng, 8);
    std::map<double, std::vector<std::vector<Key>>> all_chains;
    for (double th : thresholds) {
      std::size_t previous_count = SIZE_MAX;
      for (int ltmin = 1; ltmin <= 6; ++ltmin) {
        const MatchConfig cfg{th, ltmin};
        const auto stable = build_stable_groups(stream, cfg);
        ASSERT_LE(stable.size(), previous_count);
        previous_count = stable.size();
        std::set<Key> seen;
        for (const auto& sg : stable) {
          ASSERT_GE(sg.lifespan(), ltmin);
          for (std::size_t i = 0; i + 1 < sg.chain.size(); ++i) {
            ASSERT_EQ(sg.chain[i + 1].slot_index, sg.chain[i].slot_index + 1);
            ASSERT_GE(modified_jaccard(sg.chain[i].members, sg.chain[i + 1].members), th);
            ASSERT_EQ(sg.transition_similarity[i], modified_jaccard(sg.chain[i].members, sg.chain[i + 1].members));
          }
          for (const auto& g : sg.chain) ASSERT_TRUE(seen.emplace(g.slot_index, g.group_id).second);
        }
        if (ltmin == 1) all_chains[th] = chain_keys(stable);
      }
    }
    for (std::size_t i = 0; i + 1 < thresholds.size(); ++i) {
      const auto& lower = all_chains[thresholds[i]];
      const auto& higher = all_chains[thresholds[i + 1]];
      // Chains only ever get cut, never extended.
      ASSERT_GE(higher.size(), lower.size());
      for (const auto& part : higher) {
        const bool inside = std::any_of(lower.begin(), lower.end(),
                                        [&](const std::vector<Key>& whole) { return is_contiguous_part(part, whole); });
        ASSERT_TRUE(inside);
      }
    }
  }
}

TEST(StableGroups, NdjsonRoundTrip) {
  const auto g = members({1, 2, 3});
  const Stream s = {{group(0, g)}, {group(1, g)}, {group(2, members({1, 2, 3, 4}))}};
  const auto stable = build_stable_groups(s, {});
  std::stringstream buf;
  write_stable_groups_ndjson(buf, stable);
  EXPECT_EQ(read_stable_groups_ndjson(buf), stable);
}
