#include <gtest/gtest.h>

#include <sstream>

#include "eranet/brokerage.hpp"
#include "eranet/error.hpp"
#include "support.hpp"

namespace eranet::brokerage {
namespace {

using testing::make_network;

// Gould-Fernandez role of B in A->B->C by group membership.
int oracle_role(EraIndex a, EraIndex b, EraIndex c) {
  if (a == b && b == c) return 0;  // coordinator
  if (a != b && b == c) return 1;  // gatekeeper
  if (a == b && b != c) return 2;  // representative
  if (a == c && a != b) return 4;  // consultant
  return 3;                        // liaison
}

std::vector<std::array<std::size_t, 5>> oracle_scores(const InfluenceNetwork& net) {
  const auto n = net.node_count();
  std::vector<std::array<std::size_t, 5>> out(n);
  for (NodeIndex a = 0; a < n; ++a) {
    for (NodeIndex b = 0; b < n; ++b) {
      for (NodeIndex c = 0; c < n; ++c) {
        if (a == b || b == c || a == c) continue;
        if (!net.has_edge(a, b) || !net.has_edge(b, c) || net.has_edge(a, c)) continue;
        ++out[b][static_cast<std::size_t>(oracle_role(net.era(a), net.era(b), net.era(c)))];
      }
    }
  }
  return out;
}

TEST(Brokerage, Coordinator) {
  const auto s = brokerage_scores(make_network({1, 1, 1}, {{0, 1}, {1, 2}}));
  EXPECT_EQ(s[1][Role::Coordinator], 1u);
  EXPECT_EQ(s[1].total(), 1u);
}

TEST(Brokerage, Gatekeeper) {
  EXPECT_EQ(brokerage_scores(make_network({0, 1, 1}, {{0, 1}, {1, 2}}))[1][Role::Gatekeeper], 1u);
}

TEST(Brokerage, Liaison) {
  EXPECT_EQ(brokerage_scores(make_network({0, 1, 2}, {{0, 1}, {1, 2}}))[1][Role::Liaison], 1u);
}

TEST(Brokerage, ClosedTriadNotCounted) {
  const auto s = brokerage_scores(make_network({1, 1, 1}, {{0, 1}, {1, 2}, {0, 2}}));
  EXPECT_EQ(s[1].total(), 0u);
}

TEST(Brokerage, Representative) {
  EXPECT_EQ(brokerage_scores(make_network({1, 1, 2}, {{0, 1}, {1, 2}}))[1][Role::Representative], 1u);
}

TEST(Brokerage, MutualPairIsNotAPath) {
  const auto s = brokerage_scores(make_network({1, 1}, {{0, 1}, {1, 0}}));
  EXPECT_EQ(s[0].total() + s[1].total(), 0u);
}

TEST(Brokerage, Classify) {
  EXPECT_EQ(classify(1, 1, 1), Role::Coordinator);
  EXPECT_EQ(classify(0, 1, 1), Role::Gatekeeper);
  EXPECT_EQ(classify(0, 0, 1), Role::Representative);
  EXPECT_EQ(classify(0, 1, 2), Role::Liaison);
  EXPECT_EQ(classify(1, 0, 1), Role::Consultant);
}

TEST(Brokerage, RejectsReverseLinks) {
  EXPECT_THROW((void)brokerage_scores(make_network({2, 1}, {{0, 1}})), Error);
}

TEST(Brokerage, OracleAndThreads) {
  std::mt19937_64 rng(17);
  for (int run = 0; run < 40; ++run) {
    const auto net = testing::random_repaired_network(rng, 40, 160);
    const auto scores = brokerage_scores(net);
    const auto oracle = oracle_scores(net);
    for (NodeIndex v = 0; v < net.node_count(); ++v) {
      EXPECT_EQ(scores[v].counts, oracle[v]);
      EXPECT_EQ(scores[v][Role::Consultant], 0u);
    }
    const auto threaded = brokerage_scores(net, 3);
    for (NodeIndex v = 0; v < net.node_count(); ++v) EXPECT_EQ(threaded[v].counts, scores[v].counts);
  }
}

TEST(Distribution, DistinctRoles) {
  Scores only{"x", 0, {3, 0, 0, 0, 0}};
  EXPECT_EQ(only.distinct_roles(), 1);
  std::vector<Scores> scores{only, {"y", 1, {1, 2, 0, 1, 0}}, {"z", 1, {}}};
  const auto rows = role_count_distribution(scores, EraScheme::standard());
  ASSERT_EQ(rows.size(), 7u);
  EXPECT_EQ(rows[0].holders[1], 1u);
  EXPECT_EQ(rows[1].holders[3], 1u);
  EXPECT_EQ(rows[1].holders[0], 1u);
  EXPECT_EQ(rows[6].label, "overall");
  EXPECT_EQ(rows[6].scholars, 3u);
  EXPECT_DOUBLE_EQ(rows[6].fraction(1), 1.0 / 3.0);
}

TEST(Distribution, FirstEraHasAtMostTwoRoles) {
  std::mt19937_64 rng(23);
  for (int run = 0; run < 20; ++run) {
    const auto net = testing::random_repaired_network(rng, 50, 250);
    for (const auto& s : brokerage_scores(net)) {
      if (s.era != 0) continue;
      EXPECT_EQ(s[Role::Gatekeeper] + s[Role::Liaison] + s[Role::Consultant], 0u);
      EXPECT_LE(s.distinct_roles(), 2);
    }
  }
}

TEST(TopBrokers, OnlyGatekeeperAndTies) {
  const auto net = make_network({0, 1, 1}, {{0, 1}, {1, 2}});
  const auto top = top_brokers(brokerage_scores(net), Role::Gatekeeper, 1, 3);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].id, "n0001");

  std::vector<Scores> tied{{"q", 2, {0, 2, 0, 0, 0}}, {"p", 2, {0, 2, 0, 0, 0}}, {"r", 2, {0, 1, 0, 0, 0}}};
  const auto ranked = top_brokers(tied, Role::Gatekeeper, 2, 2);
  ASSERT_EQ(ranked.size(), 2u);
  EXPECT_EQ(ranked[0].id, "p");
  EXPECT_EQ(ranked[1].id, "q");
}

TEST(Roles, Names) {
  for (auto r : kRoles) EXPECT_EQ(parse_role(to_string(r)), r);
  EXPECT_THROW((void)parse_role("broker"), Error);
}

}  // namespace
}  // namespace eranet::brokerage
