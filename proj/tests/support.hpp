#pragma once

// Shared builders, random generators and brute-force oracles for the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "eranet/model.hpp"

namespace eranet::testing {

inline std::string node_id(std::size_t i) { return fmt::format("n{:04}", i); }

/// Scholar whose lifespan sits inside era `e` of the standard scheme.
inline Scholar scholar_in_era(const std::string& id, EraIndex e) {
  const auto& scheme = EraScheme::standard();
  const Year hi = scheme.upper_bound(e);
  return {id, id, hi - 70, hi - 10, false, false, e};
}

/// Network over the standard scheme; node i is named node_id(i).
inline InfluenceNetwork make_network(const std::vector<EraIndex>& eras,
                                     const std::vector<std::pair<int, int>>& edges) {
  std::vector<Scholar> scholars;
  for (std::size_t i = 0; i < eras.size(); ++i) scholars.push_back(scholar_in_era(node_id(i), eras[i]));
  std::vector<InfluenceEdge> list;
  for (auto [s, t] : edges) list.push_back({node_id(static_cast<std::size_t>(s)), node_id(static_cast<std::size_t>(t))});
  return InfluenceNetwork(EraScheme::standard(), std::move(scholars), std::move(list));
}

/// Random lifespans in -800..2020 and random distinct, loop-free edges; eras unassigned.
inline InfluenceNetwork random_dated_network(std::mt19937_64& rng, std::size_t max_nodes,
                                             std::size_t max_edges) {
  std::uniform_int_distribution<std::size_t> nd(2, max_nodes);
  const std::size_t n = nd(rng);
  std::uniform_int_distribution<Year> birth(-800, 2000);
  std::uniform_int_distribution<Year> span(15, 95);
  std::vector<Scholar> scholars;
  for (std::size_t i = 0; i < n; ++i) {
    const Year b = birth(rng);
    const Year d = std::min<Year>(b + span(rng), 2020);
    scholars.push_back({node_id(i), node_id(i), b, std::max(d, b + 1), false, false, std::nullopt});
  }
  const std::size_t cap = std::min(max_edges, n * (n - 1));
  const std::size_t m = std::uniform_int_distribution<std::size_t>(0, cap)(rng);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<InfluenceEdge> edges;
  while (seen.size() < m) {
    const auto s = pick(rng), t = pick(rng);
    if (s == t || !seen.insert({s, t}).second) continue;
    edges.push_back({node_id(s), node_id(t)});
  }
  return InfluenceNetwork(EraScheme::standard(), std::move(scholars), std::move(edges));
}

/// Random era labels and random edges that never point to an earlier era.
inline InfluenceNetwork random_repaired_network(std::mt19937_64& rng, std::size_t n, std::size_t m) {
  std::uniform_int_distribution<EraIndex> era(0, 5);
  std::vector<EraIndex> eras(n);
  for (auto& e : eras) e = era(rng);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::set<std::pair<int, int>> seen;
  std::size_t attempts = 0;
  while (seen.size() < m && ++attempts < 50 * m + 100) {
    auto s = pick(rng), t = pick(rng);
    if (s == t) continue;
    if (eras[s] > eras[t]) std::swap(s, t);
    seen.insert({static_cast<int>(s), static_cast<int>(t)});
  }
  return make_network(eras, {seen.begin(), seen.end()});
}

/// Random simple digraph as an arc list over n vertices.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> random_arcs(std::mt19937_64& rng, std::size_t n,
                                                                        std::size_t m) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  if (n < 2) return {};
  m = std::min(m, n * (n - 1));
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(n - 1));
  while (seen.size() < m) {
    const auto s = pick(rng), t = pick(rng);
    if (s != t) seen.insert({s, t});
  }
  return {seen.begin(), seen.end()};
}

// ---------------------------------------------------------------------------
// Oracles

using Matrix = std::vector<std::vector<char>>;

inline Matrix adjacency(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& arcs) {
  Matrix a(n, std::vector<char>(n, 0));
  for (auto [s, t] : arcs) a[s][t] = 1;
  return a;
}

/// reach[i][j]: j reachable from i by a path of length >= 0.
inline Matrix reachability(const Matrix& a) {
  const auto n = a.size();
  Matrix reach(n, std::vector<char>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> stack{s};
    reach[s][s] = 1;
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (std::size_t w = 0; w < n; ++w) {
        if (a[v][w] && !reach[s][w]) {
          reach[s][w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  return reach;
}

inline Matrix symmetric(const Matrix& a) {
  auto u = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) u[i][j] = a[i][j] || a[j][i];
  }
  return u;
}

/// Number of classes of the equivalence "i ~ j iff m[i][j] && m[j][i]", with their sizes.
inline std::vector<std::size_t> classes(const Matrix& reach) {
  const auto n = reach.size();
  std::vector<char> done(n, 0);
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    std::size_t size = 0;
    for (std::size_t j = i; j < n; ++j) {
      if (!done[j] && reach[i][j] && reach[j][i]) {
        done[j] = 1;
        ++size;
      }
    }
    sizes.push_back(size);
  }
  return sizes;
}

struct OracleMetrics {
  std::size_t wcc = 0;
  std::size_t largest_wcc = 0;
  std::size_t scc_nontrivial = 0;
  double reciprocity = 0.0;
  double transitivity = 0.0;
};

inline OracleMetrics oracle_metrics(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& arcs) {
  OracleMetrics o;
  const auto a = adjacency(n, arcs);
  const auto weak = classes(reachability(symmetric(a)));
  o.wcc = weak.size();
  for (auto s : weak) o.largest_wcc = std::max(o.largest_wcc, s);
  for (auto s : classes(reachability(a))) o.scc_nontrivial += s > 1 ? 1 : 0;
  std::size_t mutual = 0;
  for (auto [s, t] : arcs) mutual += a[t][s] ? 1 : 0;
  o.reciprocity = arcs.empty() ? 0.0 : static_cast<double>(mutual) / static_cast<double>(arcs.size());
  const auto u = symmetric(a);
  std::uint64_t triangles = 0, triples = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const int links = u[i][j] + u[j][k] + u[i][k];
        if (links == 3) {
          ++triangles;
          triples += 3;
        } else if (links == 2) {
          ++triples;
        }
      }
    }
  }
  o.transitivity = triples == 0 ? 0.0 : 3.0 * static_cast<double>(triangles) / static_cast<double>(triples);
  return o;
}

/// Newman-Girvan modularity from the definition Q = 1/2m sum_ij (A_ij - k_i k_j / 2m) [c_i = c_j],
/// where A is a symmetric weight matrix (a self-loop of weight w has A_ii = 2w).
inline double oracle_modularity(const std::vector<std::vector<double>>& a, const std::vector<int>& c) {
  const auto n = a.size();
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += a[i][j];
    two_m += k[i];
  }
  if (two_m == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (c[i] == c[j]) q += a[i][j] - k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

/// Maximum modularity over every set partition (restricted growth strings).
inline double brute_force_max_modularity(const std::vector<std::vector<double>>& a) {
  const auto n = a.size();
  if (n == 0) return 0.0;
  std::vector<int> c(n, 0), top(n, 0);
  double best = -1.0;
  while (true) {
    best = std::max(best, oracle_modularity(a, c));
    std::size_t i = n - 1;
    while (i > 0 && c[i] == top[i - 1] + 1) --i;
    if (i == 0) break;
    ++c[i];
    top[i] = std::max(top[i - 1], c[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      c[j] = 0;
      top[j] = top[i];
    }
  }
  return best;
}

}  // namespace eranet::testing
