#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "eranet/community.hpp"
#include "eranet/csv.hpp"
#include "eranet/error.hpp"

namespace eranet::community {

WeightedGraph::WeightedGraph(std::size_t vertex_count, std::span<const WeightedEdge> edges)
    : adjacency_(vertex_count), self_loops_(vertex_count, 0.0), strength_(vertex_count, 0.0) {
  for (const auto& e : edges) {
    if (e.u >= vertex_count || e.v >= vertex_count) {
      throw Error(ErrorKind::InvalidArgument, "weighted edge endpoint out of range");
    }
    total_weight_ += e.weight;
    if (e.u == e.v) {
      self_loops_[e.u] += e.weight;
      strength_[e.u] += 2 * e.weight;
      adjacency_[e.u].emplace_back(e.u, e.weight);
    } else {
      strength_[e.u] += e.weight;
      strength_[e.v] += e.weight;
      adjacency_[e.u].emplace_back(e.v, e.weight);
      adjacency_[e.v].emplace_back(e.u, e.weight);
    }
  }
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<std::uint32_t, double>> merged;
    for (const auto& item : list) {
      if (!merged.empty() && merged.back().first == item.first) {
        merged.back().second += item.second;
      } else {
        merged.push_back(item);
      }
    }
    list = std::move(merged);
  }
}

double modularity(const WeightedGraph& g, std::span<const std::uint32_t> membership) {
  const double m = g.total_weight();
  if (m <= 0.0) return 0.0;
  std::uint32_t communities = 0;
  for (auto c : membership) communities = std::max(communities, c + 1);
  std::vector<double> internal(communities, 0.0), total(communities, 0.0);
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    total[membership[v]] += g.strength(v);
    for (const auto& [w, weight] : g.neighbors(v)) {
      // count each undirected edge once, self-loops once
      if (w < v || membership[w] != membership[v]) continue;
      internal[membership[v]] += weight;
    }
  }
  double q = 0.0;
  for (std::uint32_t c = 0; c < communities; ++c) {
    const double share = total[c] / (2.0 * m);
    q += internal[c] / m - share * share;
  }
  return q;
}

namespace {

// Unbiased bounded draw; std::uniform_int_distribution differs across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[bounded(rng, i)]);
  }
}

// Renumbers ids densely in order of first appearance.
std::size_t renumber(std::vector<std::uint32_t>& membership) {
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> map(membership.size() + 1, kUnset);
  std::uint32_t next = 0;
  for (auto& c : membership) {
    if (c >= map.size()) map.resize(c + 1, kUnset);
    if (map[c] == kUnset) map[c] = next++;
    c = map[c];
  }
  return next;
}

// One round of local moving. Returns the modularity gained.
double move_nodes(const WeightedGraph& g, std::vector<std::uint32_t>& comm, std::mt19937_64& rng,
                  double min_gain) {
  const std::size_t n = g.size();
  const double m = g.total_weight();
  std::vector<double> tot(n, 0.0);
  for (std::uint32_t v = 0; v < n; ++v) tot[comm[v]] += g.strength(v);

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  shuffle(order, rng);

  std::vector<double> link(n, 0.0);
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> touched;
  double gained = 0.0;
  for (;;) {
    double pass_gain = 0.0;
    std::size_t moves = 0;
    for (std::uint32_t v : order) {
      const std::uint32_t home = comm[v];
      const double k = g.strength(v);
      touched.clear();
      for (const auto& [w, weight] : g.neighbors(v)) {
        if (w == v) continue;
        const auto c = comm[w];
        if (!seen[c]) {
          seen[c] = 1;
          touched.push_back(c);
        }
        link[c] += weight;
      }
      tot[home] -= k;
      const double stay = link[home] - tot[home] * k / (2.0 * m);
      std::uint32_t best = home;
      double best_score = stay;
      for (auto c : touched) {
        const double score = link[c] - tot[c] * k / (2.0 * m);
        if (score > best_score + 1e-12 || (score == best_score && c < best && best != home)) {
          best = c;
          best_score = score;
        }
      }
      tot[best] += k;
      if (best != home) {
        comm[v] = best;
        ++moves;
        pass_gain += (best_score - stay) / m;
      }
      for (auto c : touched) {
        link[c] = 0.0;
        seen[c] = 0;
      }
      link[home] = 0.0;
    }
    gained += pass_gain;
    if (moves == 0 || pass_gain <= min_gain) break;
  }
  return gained;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::uint32_t>& comm,
                        std::size_t communities) {
  std::vector<WeightedEdge> edges;
  for (std::uint32_t v = 0; v < g.size(); ++v) {
    for (const auto& [w, weight] : g.neighbors(v)) {
      if (w < v) continue;
      edges.push_back({comm[v], comm[w], weight});
    }
  }
  return WeightedGraph(communities, edges);
}

}  // namespace

namespace {

constexpr int kRefinementRounds = 32;

// Local moving from `start`, then aggregation levels until no level gains more
// than `min_gain`. Appends the modularity after each level to `levels` if given.
std::vector<std::uint32_t> unfold(const WeightedGraph& g, std::vector<std::uint32_t> start,
                                  std::mt19937_64& rng, double min_gain, std::vector<double>* levels) {
  std::vector<std::uint32_t> membership(g.size());
  std::iota(membership.begin(), membership.end(), 0u);
  const bool singleton_start = start == membership;
  std::vector<std::uint32_t> comm = std::move(start);
  renumber(comm);
  WeightedGraph current = g;
  for (bool first = true;; first = false) {
    if (!first) {
      comm.resize(current.size());
      std::iota(comm.begin(), comm.end(), 0u);
    }
    const double gained = move_nodes(current, comm, rng, min_gain);
    if (gained <= min_gain && (!first || singleton_start)) break;
    const std::size_t communities = renumber(comm);
    for (auto& c : membership) c = comm[c];
    if (levels != nullptr) levels->push_back(modularity(g, membership));
    if (communities == current.size()) break;
    current = aggregate(current, comm, communities);
  }
  return membership;
}

// Picks about one vertex in four and either moves it to the community of a
// random neighbour or isolates it.
void perturb(const WeightedGraph& g, std::vector<std::uint32_t>& membership, std::mt19937_64& rng) {
  const auto snapshot = membership;
  const auto n = static_cast<std::uint32_t>(g.size());
  for (std::uint32_t v = 0; v < n; ++v) {
    if (bounded(rng, 4) != 0) continue;
    const auto nbrs = g.neighbors(v);
    if (nbrs.empty() || bounded(rng, 2) == 0) {
      membership[v] = n + v;
    } else {
      membership[v] = snapshot[nbrs[bounded(rng, nbrs.size())].first];
    }
  }
}

}  // namespace

LouvainResult louvain(const WeightedGraph& g, std::uint64_t seed, double min_gain) {
  LouvainResult result;
  result.membership.resize(g.size());
  std::iota(result.membership.begin(), result.membership.end(), 0u);
  result.community_count = g.size();
  result.level_modularity.push_back(modularity(g, result.membership));
  if (g.total_weight() <= 0.0) {
    result.modularity = result.level_modularity.back();
    return result;
  }

  std::mt19937_64 rng(seed);
  result.membership = unfold(g, result.membership, rng, min_gain, &result.level_modularity);
  double best = modularity(g, result.membership);
  // Iterated local search: restart the unfolding from perturbed copies of the
  // best partition and keep strict improvements only.
  for (int round = 0; round < kRefinementRounds; ++round) {
    auto trial = result.membership;
    perturb(g, trial, rng);
    trial = unfold(g, std::move(trial), rng, min_gain, nullptr);
    const double q = modularity(g, trial);
    if (q > best + min_gain) {
      best = q;
      result.membership = std::move(trial);
      result.level_modularity.push_back(q);
    }
  }
  result.community_count = renumber(result.membership);
  result.modularity = modularity(g, result.membership);
  return result;
}

WeightedGraph undirected_projection(const slicing::PartialNetwork& pn) {
  std::vector<WeightedEdge> edges;
  edges.reserve(pn.edges.size());
  auto local = [&](NodeIndex v) {
    return static_cast<std::uint32_t>(std::lower_bound(pn.nodes.begin(), pn.nodes.end(), v) -
                                      pn.nodes.begin());
  };
  for (const auto& e : pn.edges) {
    if (e.source == e.target) continue;
    edges.push_back({local(e.source), local(e.target), 1.0});
  }
  return WeightedGraph(pn.nodes.size(), edges);
}

// ---------------------------------------------------------------------------

std::vector<std::vector<std::string>> CommunityPartition::members() const {
  std::vector<std::vector<std::string>> out(community_count);
  for (std::size_t i = 0; i < nodes.size(); ++i) out[community[i]].push_back(nodes[i]);
  return out;  // nodes are sorted, so each list is too
}

std::vector<std::size_t> CommunityPartition::sizes() const {
  std::vector<std::size_t> out(community_count, 0);
  for (auto c : community) ++out[c];
  return out;
}

CommunityPartition CommunityPartition::from_assignment(
    int step, std::vector<std::pair<std::string, std::uint32_t>> rows) {
  std::sort(rows.begin(), rows.end());
  CommunityPartition p;
  p.step = step;
  std::uint32_t max_id = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].first == rows[i - 1].first) {
      throw Error(ErrorKind::Data, fmt::format("node '{}' assigned twice", rows[i].first));
    }
    p.nodes.push_back(rows[i].first);
    p.community.push_back(rows[i].second);
    max_id = std::max(max_id, rows[i].second);
  }
  if (!rows.empty()) {
    std::vector<char> used(max_id + 1, 0);
    for (auto c : p.community) used[c] = 1;
    if (std::find(used.begin(), used.end(), 0) != used.end()) {
      throw Error(ErrorKind::Data, "community ids are not dense");
    }
    p.community_count = max_id + 1;
  }
  return p;
}

CommunityPartition detect_communities(const slicing::PartialNetwork& pn, std::uint64_t seed) {
  if (pn.spec.kind != slicing::SliceKind::Accumulated) {
    throw Error(ErrorKind::InvalidArgument, "community detection runs on accumulated slices");
  }
  const auto g = undirected_projection(pn);
  const auto result = louvain(g, seed);
  CommunityPartition p;
  p.step = pn.spec.era;
  p.nodes.reserve(pn.nodes.size());
  for (NodeIndex v : pn.nodes) p.nodes.push_back(pn.network->id(v));
  p.community = result.membership;
  p.community_count = result.community_count;
  p.modularity = result.modularity;
  return p;
}

// ---------------------------------------------------------------------------

Summary Summary::of(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  auto quantile = [&](double q) {
    const double pos = q * (n - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (values[hi] - values[lo]) * (pos - static_cast<double>(lo));
  };
  s.min = values.front();
  s.q25 = quantile(0.25);
  s.median = quantile(0.5);
  s.q75 = quantile(0.75);
  s.max = values.back();
  return s;
}

nlohmann::json Summary::to_json() const {
  return {{"count", count}, {"mean", mean}, {"std", std},   {"min", min},
          {"25%", q25},     {"50%", median}, {"75%", q75}, {"max", max}};
}

nlohmann::json CommunityStats::to_json() const {
  nlohmann::json top = nlohmann::json::array();
  for (const auto& c : largest) {
    top.push_back({{"community", c.id}, {"nodes", c.size}, {"edges", c.internal_edges}});
  }
  return {{"C", count}, {"LC", large_count}, {"largest", top}, {"members", sizes.to_json()}};
}

CommunityStats community_stats(const CommunityPartition& partition, const InfluenceNetwork* network,
                               std::size_t large_threshold, std::size_t top_n) {
  CommunityStats stats;
  const auto sizes = partition.sizes();
  stats.count = sizes.size();
  std::vector<std::size_t> internal(sizes.size(), 0);
  if (network != nullptr) {
    auto community_of = [&](NodeIndex v) -> std::optional<std::uint32_t> {
      const auto& id = network->id(v);
      auto it = std::lower_bound(partition.nodes.begin(), partition.nodes.end(), id);
      if (it == partition.nodes.end() || *it != id) return std::nullopt;
      return partition.community[static_cast<std::size_t>(it - partition.nodes.begin())];
    };
    for (const auto& e : network->edges()) {
      auto a = community_of(e.source);
      auto b = community_of(e.target);
      if (a && b && *a == *b) ++internal[*a];
    }
  }
  std::vector<CommunitySummary> all;
  std::vector<double> size_values;
  for (std::uint32_t c = 0; c < sizes.size(); ++c) {
    all.push_back({c, sizes[c], internal[c]});
    size_values.push_back(static_cast<double>(sizes[c]));
    if (sizes[c] >= large_threshold) ++stats.large_count;
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const auto& a, const auto& b) { return a.size > b.size; });
  if (all.size() > top_n) all.resize(top_n);
  stats.largest = std::move(all);
  stats.sizes = Summary::of(std::move(size_values));
  return stats;
}

double diversity(std::span<const EraIndex> member_eras, int era_count) {
  if (member_eras.empty()) throw Error(ErrorKind::InvalidArgument, "diversity of an empty community");
  if (era_count < 2) throw Error(ErrorKind::InvalidArgument, "diversity needs at least two eras");
  std::vector<std::size_t> counts(static_cast<std::size_t>(era_count), 0);
  for (auto e : member_eras) ++counts.at(static_cast<std::size_t>(e));
  const double n = static_cast<double>(member_eras.size());
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h / std::log2(static_cast<double>(era_count));
}

double jaccard(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() && b.empty()) throw Error(ErrorKind::InvalidArgument, "jaccard of two empty sets");
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

}  // namespace eranet::community
