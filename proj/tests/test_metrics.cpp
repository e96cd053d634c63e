#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "percolate/core.hpp"
#include "percolate/metrics.hpp"
#include "support.hpp"

using namespace percolate;
using percolate::test::group;
using percolate::test::members;
using percolate::test::user;

namespace {

SlotGraph weighted(int slot, std::initializer_list<std::tuple<int, int, int>> edges) {
  SlotGraph g(slot, RelationModel::CommentNoSentiment);
  for (auto [s, d, w] : edges) g.add_edge(user(s), user(d), w);
  return g;
}

StableGroup chain_of(std::vector<MemberSet> sets) {
  StableGroup sg;
  for (std::size_t i = 0; i < sets.size(); ++i) sg.chain.push_back(group(static_cast<int>(i), sets[i]));
  for (std::size_t i = 0; i + 1 < sets.size(); ++i) {
    sg.transition_similarity.push_back(1.0);
    sg.events.push_back(TransitionEvent::Continue);
  }
  return sg;
}

}  // namespace

TEST(Density, Examples) {
  const auto m = members({0, 1, 2});
  EXPECT_NEAR(density(m, weighted(0, {{0, 1, 1}, {1, 0, 1}, {0, 2, 1}, {1, 2, 1}})), 4.0 / 6.0, 1e-15);
  EXPECT_EQ(density(m, weighted(0, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}})), 0.5);
  EXPECT_EQ(density(m, weighted(0, {{0, 1, 1}, {1, 0, 1}, {0, 2, 1}, {2, 0, 1}, {1, 2, 1}, {2, 1, 1}})), 1.0);
  EXPECT_THROW(density(members({0}), weighted(0, {{0, 1, 1}})), DomainError);
}

TEST(Stability, Examples) {
  EXPECT_EQ(stability(chain_of({members({1, 2, 3, 4}), members({2, 3, 4, 5})})), 0.6);
  EXPECT_EQ(stability(chain_of({members({1, 2, 3}), members({1, 2, 3}), members({1, 2, 3})})), 1.0);
  EXPECT_EQ(stability(chain_of({members({1, 2, 3}), members({4, 5, 6})})), 0.0);
  EXPECT_FALSE(stability(chain_of({members({1, 2, 3})})));
}

TEST(Cohesion, Examples) {
  const auto m = members({0, 1, 2});
  // Internal {2, 4}; boundary {1, 1, 1} in both directions.
  const auto g = weighted(0, {{0, 1, 2}, {1, 2, 4}, {0, 5, 1}, {6, 1, 1}, {2, 7, 1}, {5, 6, 9}});
  EXPECT_EQ(cohesion(m, g), (Cohesion{3.0, false}));
  const auto isolated = weighted(0, {{0, 1, 2}, {1, 2, 4}});
  EXPECT_TRUE(cohesion(m, isolated).separated);
  EXPECT_EQ(cohesion(m, weighted(0, {{0, 5, 1}, {1, 5, 1}, {2, 5, 1}})), (Cohesion{0.0, false}));
}

TEST(Cohesion, ScaleInvariant) {
  test::Rng rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const auto base = test::random_digraph(rng, 9, 0.4, 10);
    const auto m = members({0, 1, 2, 3});
    if (!std::all_of(m.begin(), m.end(), [&](const UserId& u) { return base.nodes().contains(u); })) continue;
    // Doubled first so that halving stays integral.
    SlotGraph doubled(0, RelationModel::CommentNoSentiment);
    for (const auto& [e, w] : base.edges()) doubled.add_edge(e.first, e.second, 2 * w);
    const auto ref = cohesion(m, doubled);
    for (double c : {0.5, 2.0, 10.0}) {
      SlotGraph scaled(0, RelationModel::CommentNoSentiment);
      for (const auto& [e, w] : doubled.edges())
        scaled.add_edge(e.first, e.second, static_cast<std::int64_t>(std::llround(static_cast<double>(w) * c)));
      const auto got = cohesion(m, scaled);
      ASSERT_EQ(got.separated, ref.separated);
      ASSERT_NEAR(got.value, ref.value, 1e-12 * ref.value);
    }
  }
}

TEST(Measure, AveragesOverChain) {
  const auto m = members({0, 1, 2});
  const SlotGraph graphs[] = {
      weighted(0, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {0, 3, 1}}),
      weighted(1, {{0, 1, 3}, {1, 0, 3}, {0, 2, 3}, {2, 0, 3}, {1, 2, 3}, {2, 1, 3}}),
  };
  const auto sg = chain_of({m, m});
  const auto r = measure(sg, [&](int slot) -> const SlotGraph& { return graphs[slot]; });
  EXPECT_EQ(r.density, 0.75);
  EXPECT_EQ(r.cohesion, 1.0);
  EXPECT_EQ(r.separated_slots, 1);
  EXPECT_EQ(r.stability, 1.0);
  EXPECT_EQ(r.size, 3);
  EXPECT_EQ(r.lifespan, 2);
}

TEST(Measure, SizeRoundsHalfUp) {
  SlotGraph g(0, RelationModel::CommentNoSentiment);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) g.add_edge(user(i), user(j));
  const auto sg = chain_of({members({0, 1, 2}), members({0, 1, 2, 3})});
  EXPECT_EQ(measure(sg, [&](int) -> const SlotGraph& { return g; }).size, 4);
}

TEST(Histogram, Bins) {
  SizeHistogram h;
  for (int s : {3, 3, 5, 12}) h.add(s);
  EXPECT_EQ(h.count(0), 2);
  EXPECT_EQ(h.count(2), 1);
  EXPECT_EQ(h.count(8), 1);
  EXPECT_EQ(h.total(), 4);
  EXPECT_EQ(SizeHistogram::kLabels[SizeHistogram::bin_of(10)], "10");
  EXPECT_EQ(SizeHistogram::kLabels[SizeHistogram::bin_of(11)], "11-50");
  EXPECT_EQ(SizeHistogram::kLabels[SizeHistogram::bin_of(100)], "51-100");
  EXPECT_EQ(SizeHistogram::kLabels[SizeHistogram::bin_of(200)], "101-200");
  EXPECT_EQ(SizeHistogram::kLabels[SizeHistogram::bin_of(201)], ">200");
}

TEST(CorpusStats, MembershipBuckets) {
  // Two stable groups overlapping in user 2 over slots 0..2; user 9 is outside.
  std::vector<SlotGraph> graphs;
  std::vector<std::vector<TemporaryGroup>> per_slot;
  const auto a = members({0, 1, 2}), b = members({2, 3, 4});
  for (int t = 0; t < 3; ++t) {
    SlotGraph g(t, RelationModel::CommentNoSentiment);
    for (const auto* m : {&a, &b})
      for (const auto& u : *m)
        for (const auto& v : *m)
          if (u != v) g.add_edge(u, v);
    g.add_edge(user(9), user(0));
    graphs.push_back(g);
    per_slot.push_back({group(t, a), group(t, b)});
  }
  const auto stable = build_stable_groups(per_slot, {});
  ASSERT_EQ(stable.size(), 2u);
  const auto r = corpus_stats(per_slot, stable, graphs, RelationModel::CommentNoSentiment, 3, "d");
  ASSERT_EQ(r.slots.size(), 3u);
  for (const auto& s : r.slots) {
    EXPECT_EQ(s.nodes, 6);
    EXPECT_EQ(s.membership, (std::array<std::int64_t, 5>{1, 4, 1, 0, 0}));
    EXPECT_EQ(s.membership[0] + s.membership[1] + s.membership[2] + s.membership[3] + s.membership[4], s.nodes);
    EXPECT_NEAR(s.percent_not_in_stable, 100.0 / 6.0, 1e-12);
    EXPECT_EQ(s.stable_groups, 2);
  }
  EXPECT_EQ(r.histogram.count(0), 2);
  EXPECT_EQ(r.histogram.total(), r.stable_group_count);
  EXPECT_EQ(r.mean_stability, 1.0);
}

TEST(CorpusStats, ReportRoundTripAndCompare) {
  std::vector<SlotGraph> graphs;
  std::vector<std::vector<TemporaryGroup>> per_slot;
  const auto a = members({0, 1, 2, 3});
  for (int t = 0; t < 3; ++t) {
    SlotGraph g(t, RelationModel::CommentNoSentiment);
    for (const auto& u : a)
      for (const auto& v : a)
        if (u < v) g.add_edge(u, v, t + 1);
    g.add_edge(user(0), user(7));
    graphs.push_back(g);
    per_slot.push_back({group(t, a)});
  }
  const auto stable = build_stable_groups(per_slot, {});
  const auto r = corpus_stats(per_slot, stable, graphs, RelationModel::CommentNoSentiment, 3, "digest");
  const auto text = report_json(r);
  EXPECT_EQ(report_json(parse_report_json(text)), text);

  for (const auto& d : compare_reports(r, r))
    if (d.delta()) EXPECT_EQ(*d.delta(), 0.0) << d.metric;

  auto other = r;
  other.k = 4;
  EXPECT_THROW(compare_reports(r, other), UsageError);
  other = r;
  other.corpus_digest = "elsewhere";
  EXPECT_THROW(compare_reports(r, other), UsageError);
}

TEST(CorpusStats, Empty) {
  const auto r = corpus_stats({}, {}, {}, RelationModel::PostNoSentiment, 3);
  EXPECT_EQ(r.stable_group_count, 0);
  EXPECT_FALSE(r.mean_density);
  EXPECT_EQ(report_json(parse_report_json(report_json(r))), report_json(r));
}
