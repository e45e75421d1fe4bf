#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "eranet/community.hpp"
#include "eranet/error.hpp"
#include "support.hpp"

namespace eranet::community {
namespace {

using testing::make_network;

CommunityPartition partition(int step, const std::vector<std::vector<std::string>>& groups) {
  std::vector<std::pair<std::string, std::uint32_t>> rows;
  for (std::uint32_t c = 0; c < groups.size(); ++c) {
    for (const auto& id : groups[c]) rows.emplace_back(id, c);
  }
  return CommunityPartition::from_assignment(step, std::move(rows));
}

std::vector<std::vector<double>> dense(const WeightedGraph& g) {
  std::vector<std::vector<double>> a(g.size(), std::vector<double>(g.size(), 0.0));
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    for (auto [w, weight] : g.neighbors(v)) a[v][w] += v == w ? 2.0 * weight : weight;
  }
  return a;
}

Event ev(int step, EventType type, std::vector<std::size_t> ids, std::optional<std::uint32_t> c) {
  return {step, type, std::move(ids), c};
}

// ---------------------------------------------------------------------------
// Detection

TEST(Modularity, MatchesDefinition) {
  std::mt19937_64 rng(2);
  for (int run = 0; run < 30; ++run) {
    const std::size_t n = 7;
    std::vector<WeightedEdge> edges;
    for (auto [u, v] : testing::random_arcs(rng, n, 12)) edges.push_back({u, v, 1.0 + (u + v) % 3});
    edges.push_back({0, 0, 1.5});
    const WeightedGraph g(n, edges);
    std::vector<std::uint32_t> member(n);
    std::vector<int> as_int(n);
    for (std::size_t i = 0; i < n; ++i) as_int[i] = static_cast<int>(member[i] = static_cast<std::uint32_t>(rng() % 3));
    EXPECT_NEAR(modularity(g, member), testing::oracle_modularity(dense(g), as_int), 1e-12);
  }
}

TEST(Louvain, TwoCliquesSplitAtBridge) {
  std::vector<WeightedEdge> edges;
  for (std::uint32_t base : {0u, 4u}) {
    for (std::uint32_t i = 0; i < 4; ++i) {
      for (std::uint32_t j = i + 1; j < 4; ++j) edges.push_back({base + i, base + j, 1.0});
    }
  }
  edges.push_back({3, 4, 1.0});
  const WeightedGraph g(8, edges);
  const auto r = louvain(g, 1);
  EXPECT_EQ(r.community_count, 2u);
  for (std::uint32_t v = 0; v < 4; ++v) {
    EXPECT_EQ(r.membership[v], r.membership[0]);
    EXPECT_EQ(r.membership[v + 4], r.membership[4]);
  }
  EXPECT_NE(r.membership[0], r.membership[4]);
  EXPECT_NEAR(r.modularity, testing::brute_force_max_modularity(dense(g)), 1e-9);
}

TEST(Louvain, SingleCliqueAndEmpty) {
  std::vector<WeightedEdge> edges;
  for (std::uint32_t i = 0; i < 5; ++i) {
    for (std::uint32_t j = i + 1; j < 5; ++j) edges.push_back({i, j, 1.0});
  }
  EXPECT_EQ(louvain(WeightedGraph(5, edges), 9).community_count, 1u);
  const auto empty = louvain(WeightedGraph(0, {}), 1);
  EXPECT_TRUE(empty.membership.empty());
  const auto isolated = louvain(WeightedGraph(3, {}), 1);
  EXPECT_EQ(isolated.community_count, 3u);
}

TEST(Louvain, NearOptimalAndMonotoneOnSmallGraphs) {
  std::mt19937_64 rng(31);
  for (int run = 0; run < 25; ++run) {
    const std::size_t n = 2 + rng() % 7;
    std::vector<WeightedEdge> edges;
    for (auto [u, v] : testing::random_arcs(rng, n, rng() % (n * 2))) edges.push_back({u, v, 1.0});
    const WeightedGraph g(n, edges);
    const auto r = louvain(g, run);
    const double best = testing::brute_force_max_modularity(dense(g));
    EXPECT_GE(r.modularity, 0.9 * best - 1e-12);
    EXPECT_LE(r.modularity, best + 1e-12);
    for (std::size_t i = 1; i < r.level_modularity.size(); ++i) {
      EXPECT_GE(r.level_modularity[i], r.level_modularity[i - 1]);
    }
    EXPECT_NEAR(modularity(g, r.membership), r.modularity, 1e-12);
  }
}

TEST(Louvain, SeedDeterminism) {
  std::mt19937_64 rng(4);
  std::vector<WeightedEdge> edges;
  for (auto [u, v] : testing::random_arcs(rng, 200, 600)) edges.push_back({u, v, 1.0});
  const WeightedGraph g(200, edges);
  EXPECT_EQ(louvain(g, 42).membership, louvain(g, 42).membership);
}

TEST(DetectCommunities, AccumulatedOnly) {
  const auto net = make_network({0, 0, 1, 1}, {{0, 1}, {1, 2}, {2, 3}});
  const auto p = detect_communities(slicing::slice(net, slicing::SliceSpec::accumulated(1)), 1);
  EXPECT_EQ(p.step, 1);
  EXPECT_EQ(p.nodes.size(), 4u);
  EXPECT_THROW((void)detect_communities(slicing::slice(net, slicing::SliceSpec::within(0)), 1), Error);
}

TEST(UndirectedProjection, MutualPairWeighsTwo) {
  const auto net = make_network({0, 0, 0}, {{0, 1}, {1, 0}, {1, 2}});
  const auto g = undirected_projection(slicing::slice(net, slicing::SliceSpec::accumulated(0)));
  EXPECT_DOUBLE_EQ(g.total_weight(), 3.0);
  EXPECT_DOUBLE_EQ(g.strength(1), 3.0);
}

// ---------------------------------------------------------------------------
// Statistics

TEST(Stats, SizePattern) {
  std::vector<std::vector<std::string>> groups(4);
  for (int i = 0; i < 53; ++i) {
    const auto c = i < 24 ? 0 : i < 37 ? 1 : i < 50 ? 2 : 3;
    groups[static_cast<std::size_t>(c)].push_back(testing::node_id(static_cast<std::size_t>(i)));
  }
  const auto s = community_stats(partition(0, groups));
  EXPECT_EQ(s.count, 4u);
  EXPECT_EQ(s.large_count, 3u);
  ASSERT_FALSE(s.largest.empty());
  EXPECT_EQ(s.largest[0].size, 24u);
  EXPECT_DOUBLE_EQ(s.sizes.median, 13.0);
}

TEST(Stats, LargeThresholdBoundary) {
  EXPECT_EQ(community_stats(partition(0, {{"a"}, {"b"}, {"c"}})).large_count, 0u);
  std::vector<std::string> ten;
  for (int i = 0; i < 10; ++i) ten.push_back(testing::node_id(static_cast<std::size_t>(i)));
  EXPECT_EQ(community_stats(partition(0, {ten})).large_count, 1u);
}

TEST(Summary, PandasConventions) {
  const auto s = Summary::of({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.std, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_DOUBLE_EQ(s.q25, 1.75);
  EXPECT_DOUBLE_EQ(s.median, 2.5);
  EXPECT_DOUBLE_EQ(s.q75, 3.25);
  EXPECT_EQ(Summary::of({}).count, 0u);
}

TEST(Diversity, Bounds) {
  EXPECT_EQ(diversity(std::vector<EraIndex>{2, 2, 2}, 6), 0.0);
  EXPECT_NEAR(diversity(std::vector<EraIndex>{0, 1, 2, 3, 4, 5}, 6), 1.0, 1e-12);
  EXPECT_NEAR(diversity(std::vector<EraIndex>{0, 0, 1, 1}, 6), 1.0 / std::log2(6.0), 1e-12);
  EXPECT_THROW((void)diversity(std::vector<EraIndex>{}, 6), Error);
}

TEST(Jaccard, Examples) {
  const std::vector<std::string> abc{"a", "b", "c"}, bcd{"b", "c", "d"}, xy{"x", "y"};
  EXPECT_DOUBLE_EQ(jaccard(abc, abc), 1.0);
  EXPECT_DOUBLE_EQ(jaccard(abc, xy), 0.0);
  EXPECT_DOUBLE_EQ(jaccard(abc, bcd), 0.5);
  EXPECT_THROW((void)jaccard(std::vector<std::string>{}, std::vector<std::string>{}), Error);
}

TEST(Partition, Validation) {
  EXPECT_THROW((void)CommunityPartition::from_assignment(0, {{"a", 0}, {"a", 1}}), Error);
  EXPECT_THROW((void)CommunityPartition::from_assignment(0, {{"a", 0}, {"b", 2}}), Error);
}

// ---------------------------------------------------------------------------
// Tracking

TEST(Track, Merge) {
  const std::vector parts{partition(0, {{"1", "2", "3"}, {"4", "5"}}), partition(1, {{"1", "2", "3", "4", "5"}})};
  const auto r = track(parts, {0.3, 1});
  EXPECT_EQ(r.events, (std::vector<Event>{ev(0, EventType::Birth, {0}, 0u), ev(0, EventType::Birth, {1}, 1u),
                                          ev(1, EventType::Merge, {0, 1}, 0u)}));
  EXPECT_EQ(r.communities[0].timeline.back(), r.communities[1].timeline.back());
  EXPECT_EQ(r.communities[1].timeline.front(), (Observation{0, 1}));
}

TEST(Track, Split) {
  const std::vector parts{partition(0, {{"1", "2", "3", "4"}}), partition(1, {{"1", "2"}, {"3", "4"}})};
  const auto r = track(parts, {0.3, 1});
  EXPECT_EQ(r.events, (std::vector<Event>{ev(0, EventType::Birth, {0}, 0u), ev(1, EventType::Split, {0, 1}, 1u)}));
  ASSERT_EQ(r.communities.size(), 2u);
  EXPECT_EQ(r.communities[1].split_from, 0u);
  EXPECT_EQ(r.communities[1].timeline.front(), (Observation{0, 0}));
}

TEST(Track, Birth) {
  const std::vector parts{partition(0, {{"1", "2"}}), partition(1, {{"1", "2"}, {"7", "8"}})};
  const auto r = track(parts, {0.3, 1});
  EXPECT_EQ(r.events, (std::vector<Event>{ev(0, EventType::Birth, {0}, 0u), ev(1, EventType::Continuation, {0}, 0u),
                                          ev(1, EventType::Birth, {1}, 1u)}));
}

TEST(Track, DeathWithWindowOne) {
  const std::vector parts{partition(0, {{"1", "2"}, {"3", "4"}}), partition(1, {{"1", "2"}})};
  const auto r = track(parts, {0.3, 1});
  EXPECT_EQ(r.events, (std::vector<Event>{ev(0, EventType::Birth, {0}, 0u), ev(0, EventType::Birth, {1}, 1u),
                                          ev(1, EventType::Continuation, {0}, 0u),
                                          ev(1, EventType::Death, {1}, std::nullopt)}));
  EXPECT_TRUE(r.communities[1].dead);
}

TEST(Track, DeathWindowTwoWaitsAStep) {
  const std::vector parts{partition(0, {{"1", "2"}, {"3", "4"}}), partition(1, {{"1", "2"}}),
                          partition(2, {{"1", "2"}, {"3", "4"}})};
  const auto r = track(parts, {0.3, 2});
  EXPECT_FALSE(r.communities[1].dead);
  EXPECT_EQ(r.communities[1].timeline.back(), (Observation{2, 1}));
}

TEST(Track, HighThresholdOnMergeFixture) {
  const std::vector parts{partition(0, {{"1", "2", "3"}, {"4", "5"}}), partition(1, {{"1", "2", "3", "4", "5"}})};
  const auto r = track(parts, {0.95, 1});
  EXPECT_EQ(r.events, (std::vector<Event>{ev(0, EventType::Birth, {0}, 0u), ev(0, EventType::Birth, {1}, 1u),
                                          ev(1, EventType::Birth, {2}, 0u), ev(1, EventType::Death, {0}, std::nullopt),
                                          ev(1, EventType::Death, {1}, std::nullopt)}));
}

TEST(Track, IdenticalPartitionsOnlyContinue) {
  const auto p = partition(0, {{"a", "b"}, {"c"}, {"d", "e", "f"}});
  auto q = p, s = p;
  q.step = 1;
  s.step = 2;
  const std::vector parts{p, q, s};
  for (const auto& e : track(parts, {0.5, 1}).events) {
    EXPECT_TRUE(e.step == 0 ? e.type == EventType::Birth : e.type == EventType::Continuation);
  }
}

TEST(Track, DisjointStepsOnlyBirthsAndDeaths) {
  const std::vector parts{partition(0, {{"a", "b"}}), partition(1, {{"c", "d"}})};
  for (const auto& e : track(parts, {1.0 - 1e-9, 1}).events) {
    EXPECT_TRUE(e.type == EventType::Birth || e.type == EventType::Death);
  }
}

TEST(Track, RejectsBadConfig) {
  const std::vector parts{partition(0, {{"a"}})};
  EXPECT_THROW((void)track(parts, {1.5, 1}), Error);
  EXPECT_THROW((void)track(parts, {0.3, 0}), Error);
}

TEST(ThetaSweep, RowsAndRange) {
  const auto thetas = parse_theta_range("0:0.95:0.05");
  ASSERT_EQ(thetas.size(), 20u);
  EXPECT_DOUBLE_EQ(thetas.front(), 0.0);
  EXPECT_DOUBLE_EQ(thetas.back(), 0.95);
  const std::vector parts{partition(0, {{"1", "2", "3"}, {"4", "5"}}), partition(1, {{"1", "2", "3", "4", "5"}})};
  const auto rows = theta_sweep(parts, thetas, 1, [](const std::string& id) { return id < "4" ? 0 : 1; }, 6);
  ASSERT_EQ(rows.size(), 20u);
  EXPECT_EQ(rows.front().merged_count, 2u);
  EXPECT_EQ(rows.back().dynamic_count, 3u);
  EXPECT_EQ(rows.back().merged_count, 0u);
  EXPECT_EQ(rows.back().continued_count, 0u);
}

TEST(PresencePatterns, Grouping) {
  std::vector<DynamicCommunity> d(3);
  d[0].timeline = {{0, 0}, {1, 0}};
  d[0].members.resize(10);
  d[1].timeline = {{0, 1}, {1, 1}};
  d[1].members.resize(20);
  d[2].timeline = {{1, 2}};
  d[2].members.resize(4);
  const std::vector<int> steps{0, 1};
  const auto rows = era_presence_patterns(d, steps);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].count, 2u);
  EXPECT_DOUBLE_EQ(rows[0].average_size, 15.0);
  EXPECT_EQ(rows[0].to_string(), "[X,X]");
  EXPECT_EQ(rows[1].to_string(), "[0,X]");
}

TEST(PartitionCsv, RoundTrip) {
  const auto p = partition(3, {{"a", "c"}, {"b"}});
  const auto path = std::filesystem::path(::testing::TempDir()) / "partition_3.csv";
  {
    std::ofstream out(path);
    write_partition_csv(out, p);
  }
  const auto back = read_partition_csv(path, 3);
  EXPECT_EQ(back.nodes, p.nodes);
  EXPECT_EQ(back.community, p.community);
}

}  // namespace
}  // namespace eranet::community
