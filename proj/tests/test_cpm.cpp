#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "oracle/cpm_oracle.hpp"
#include "percolate/core.hpp"
#include "percolate/cpm.hpp"
#include "support.hpp"

using namespace percolate;
using percolate::test::members;
using percolate::test::user;

namespace {

SlotGraph graph_of(std::initializer_list<std::pair<int, int>> edges) {
  SlotGraph g(0, RelationModel::CommentNoSentiment);
  for (auto [s, d] : edges) g.add_edge(user(s), user(d));
  return g;
}

std::vector<MemberSet> member_sets(const std::vector<TemporaryGroup>& groups) {
  std::vector<MemberSet> out;
  for (const auto& g : groups) out.push_back(g.members);
  return out;
}

std::vector<MemberSet> clique_sets(const std::vector<DirectedKClique>& cliques) {
  std::vector<MemberSet> out;
  for (const auto& c : cliques) out.push_back(c.members);
  return out;
}

}  // namespace

TEST(DirectedClique, Criterion) {
  const auto transitive = graph_of({{0, 1}, {0, 2}, {1, 2}});
  const auto cycle = graph_of({{0, 1}, {1, 2}, {2, 0}});
  const auto with_pair = graph_of({{0, 1}, {1, 0}, {0, 2}, {1, 2}});
  const auto m = members({0, 1, 2});
  EXPECT_TRUE(is_directed_clique(m, transitive));
  EXPECT_FALSE(is_directed_clique(m, cycle));
  EXPECT_TRUE(is_directed_clique(m, with_pair));
  EXPECT_EQ(enumerate_kcliques(transitive, 3).size(), 1u);
  EXPECT_TRUE(enumerate_kcliques(cycle, 3).empty());
  EXPECT_EQ(enumerate_kcliques(with_pair, 3).size(), 1u);
  // A missing pair is never a clique.
  EXPECT_FALSE(is_directed_clique(m, graph_of({{0, 1}, {1, 2}})));
}

TEST(DirectedClique, CycleWithChordBidirectional) {
  // Pair {1,2} is two-way; the one-way links 0->1 and 2->0 are acyclic.
  EXPECT_TRUE(is_directed_clique(members({0, 1, 2}), graph_of({{0, 1}, {1, 2}, {2, 0}, {2, 1}})));
}

TEST(Percolate, Examples) {
  // Two orientable triangles sharing {1,2}.
  const auto shared = graph_of({{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}});
  EXPECT_EQ(member_sets(detect(shared, 3)), (std::vector<MemberSet>{members({0, 1, 2, 3})}));

  const auto disjoint = graph_of({{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}});
  EXPECT_EQ(member_sets(detect(disjoint, 3)), (std::vector<MemberSet>{members({0, 1, 2}), members({3, 4, 5})}));

  const auto single = graph_of({{0, 1}, {0, 2}, {1, 2}});
  const auto groups = detect(single, 3);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].members.size(), 3u);
  EXPECT_EQ(groups[0].k, 3);

  EXPECT_TRUE(detect(SlotGraph(0, RelationModel::CommentNoSentiment), 3).empty());
  EXPECT_THROW(detect(single, 2), ConfigError);
}

TEST(Percolate, SharingOneNodeDoesNotJoin) {
  const auto bowtie = graph_of({{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}});
  EXPECT_EQ(detect(bowtie, 3).size(), 2u);
}

TEST(Percolate, GroupIdIsStable) {
  const auto g = graph_of({{0, 1}, {0, 2}, {1, 2}});
  const auto groups = detect(g, 3);
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0].group_id, temporary_group_id(0, RelationModel::CommentNoSentiment, 3, members({0, 1, 2})));
  EXPECT_EQ(groups[0].group_id.size(), 16u);
  EXPECT_NE(groups[0].group_id, temporary_group_id(1, RelationModel::CommentNoSentiment, 3, members({0, 1, 2})));
}

TEST(CliqueEnumeration, MatchesOracle) {
  test::Rng rng(31);
  std::uniform_int_distribution<int> nodes(3, 12);
  std::uniform_real_distribution<double> p(0.2, 0.5);
  for (int trial = 0; trial < 150; ++trial) {
    const auto g = test::random_digraph(rng, nodes(rng), p(rng));
    for (int k : {3, 4, 5}) {
      ASSERT_EQ(clique_sets(enumerate_kcliques(g, k)), oracle::directed_cliques(g, k)) << "trial " << trial;
      ASSERT_EQ(member_sets(detect(g, k)), oracle::directed_groups(g, k)) << "trial " << trial << " k " << k;
    }
  }
}

TEST(CliqueEnumeration, DenseGraphsMatchOracle) {
  test::Rng rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const auto g = test::random_digraph(rng, 10, 0.7);
    for (int k : {3, 4, 5, 6}) ASSERT_EQ(member_sets(detect(g, k)), oracle::directed_groups(g, k));
  }
}

TEST(Percolate, Invariants) {
  test::Rng rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = test::random_digraph(rng, 12, 0.45);
    for (int k : {3, 4, 5}) {
      const auto cliques = enumerate_kcliques(g, k);
      const auto groups = detect(g, k);
      for (const auto& grp : groups) {
        ASSERT_GE(grp.members.size(), static_cast<std::size_t>(k));
        for (const auto& u : grp.members) {
          const bool covered = std::any_of(cliques.begin(), cliques.end(), [&](const DirectedKClique& c) {
            return std::binary_search(c.members.begin(), c.members.end(), u) && is_subset(c.members, grp.members);
          });
          ASSERT_TRUE(covered);
        }
        for (const auto& other : groups)
          if (&other != &grp) ASSERT_FALSE(is_subset(grp.members, other.members));
      }
      ASSERT_TRUE(std::is_sorted(groups.begin(), groups.end(),
                                 [](const TemporaryGroup& x, const TemporaryGroup& y) { return x.members < y.members; }));
    }
  }
}

TEST(Percolate, MonotoneInEdges) {
  test::Rng rng(34);
  std::uniform_int_distribution<int> node(0, 9);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = test::random_digraph(rng, 10, 0.35);
    const auto before_cliques = clique_sets(enumerate_kcliques(g, 3));
    const auto before_groups = member_sets(detect(g, 3));
    int s = node(rng), d = node(rng);
    if (s == d) d = (d + 1) % 10;
    g.add_edge(user(s), user(d));
    const auto after_cliques = clique_sets(enumerate_kcliques(g, 3));
    const auto after_groups = member_sets(detect(g, 3));
    for (const auto& c : before_cliques)
      ASSERT_TRUE(std::binary_search(after_cliques.begin(), after_cliques.end(), c));
    for (const auto& grp : before_groups) {
      const bool kept = std::any_of(after_groups.begin(), after_groups.end(),
                                    [&](const MemberSet& a) { return is_subset(grp, a); });
      ASSERT_TRUE(kept);
    }
  }
}

TEST(Percolate, BidirectionalGraphsReduceToUndirected) {
  test::Rng rng(35);
  std::bernoulli_distribution edge(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    SlotGraph g(0, RelationModel::CommentNoSentiment);
    for (int i = 0; i < 11; ++i)
      for (int j = i + 1; j < 11; ++j)
        if (edge(rng)) {
          g.add_edge(user(i), user(j));
          g.add_edge(user(j), user(i));
        }
    for (int k : {3, 4, 5}) ASSERT_EQ(member_sets(detect(g, k)), oracle::undirected_groups(g, k));
  }
}

TEST(Percolate, Deterministic) {
  test::Rng rng(36);
  const auto g = test::random_digraph(rng, 12, 0.5);
  std::ostringstream a, b;
  write_groups_ndjson(a, detect(g, 4));
  write_groups_ndjson(b, detect(g, 4));
  EXPECT_EQ(a.str(), b.str());
  std::istringstream in(a.str());
  EXPECT_EQ(read_groups_ndjson(in), detect(g, 4));
}

TEST(Intensity, FiltersLightCliques) {
  SlotGraph g(0, RelationModel::CommentNoSentiment);
  g.add_edge(user(0), user(1), 8);
  g.add_edge(user(1), user(0), 1);  // heavier direction counts
  g.add_edge(user(0), user(2), 2);
  g.add_edge(user(1), user(2), 4);
  // Geometric mean of 8, 2, 4 is 4.
  EXPECT_EQ(enumerate_kcliques(g, 3, {.min_intensity = 3.99}).size(), 1u);
  EXPECT_TRUE(enumerate_kcliques(g, 3, {.min_intensity = 4.01}).empty());
  EXPECT_EQ(enumerate_kcliques(g, 3, {}).size(), 1u);
}
