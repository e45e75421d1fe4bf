#include "eranet/chronology.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <tuple>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "eranet/csv.hpp"
#include "eranet/error.hpp"

namespace eranet::chronology {

namespace {

Year floor_div2(long long x) { return static_cast<Year>(x >= 0 ? x / 2 : -((-x + 1) / 2)); }

}  // namespace

Year activity_midpoint(Year birth, Year death, Year activity_offset) {
  Year active_start = birth + activity_offset;
  if (active_start >= death) active_start = birth;
  return floor_div2(static_cast<long long>(active_start) + death);
}

EraIndex assign_initial_era(const Scholar& scholar, const EraScheme& scheme, Year activity_offset) {
  return scheme.era_of_year(activity_midpoint(scholar.birth, scholar.death, activity_offset));
}

InfluenceNetwork assign_eras(const InfluenceNetwork& network, Year activity_offset) {
  std::vector<EraIndex> eras;
  eras.reserve(network.node_count());
  for (const auto& s : network.scholars()) {
    try {
      eras.push_back(assign_initial_era(s, network.scheme(), activity_offset));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("scholar '{}': {}", s.id, e.what()));
    }
  }
  return network.with_eras(eras);
}

namespace {

// Reverse links keyed so that iteration order is: largest gap first, then
// (source, target) ascending. Node indices follow id order.
using ReverseKey = std::tuple<int, NodeIndex, NodeIndex>;

ReverseKey key_of(const Edge& e, std::span<const EraIndex> eras) {
  return {eras[e.target] - eras[e.source], e.source, e.target};
}

std::vector<EraIndex> current_eras(const InfluenceNetwork& network) {
  std::vector<EraIndex> eras(network.node_count());
  for (NodeIndex v = 0; v < eras.size(); ++v) eras[v] = network.era(v);
  return eras;
}

}  // namespace

std::vector<Edge> find_reverse_links(const InfluenceNetwork& network) {
  const auto eras = current_eras(network);
  std::vector<ReverseKey> keys;
  for (const auto& e : network.edges()) {
    if (eras[e.source] > eras[e.target]) keys.push_back(key_of(e, eras));
  }
  std::sort(keys.begin(), keys.end());
  std::vector<Edge> out;
  out.reserve(keys.size());
  for (const auto& [gap, s, t] : keys) out.push_back({s, t});
  return out;
}

const char* to_string(RepairPolicy policy) noexcept {
  switch (policy) {
    case RepairPolicy::MinimalDisplacement: return "minimal-displacement";
    case RepairPolicy::InfluencerBackward: return "influencer-backward";
    case RepairPolicy::InfluencedForward: return "influenced-forward";
  }
  return "minimal-displacement";
}

RepairPolicy parse_repair_policy(std::string_view text) {
  for (auto p : {RepairPolicy::MinimalDisplacement, RepairPolicy::InfluencerBackward,
                 RepairPolicy::InfluencedForward}) {
    if (text == to_string(p)) return p;
  }
  throw Error(ErrorKind::Config, fmt::format("unknown repair policy '{}'", text));
}

std::size_t AssignmentTrace::moved_scholars() const {
  return static_cast<std::size_t>(std::count_if(
      scholars.begin(), scholars.end(), [](const ScholarTrace& s) { return !s.moves.empty(); }));
}

RepairResult repair_assignments(const InfluenceNetwork& network, const RepairOptions& options) {
  const auto& scheme = network.scheme();
  auto eras = current_eras(network);

  AssignmentTrace trace;
  trace.policy = options.policy;
  trace.scholars.reserve(network.node_count());
  for (NodeIndex v = 0; v < network.node_count(); ++v) {
    trace.scholars.push_back({network.id(v), eras[v], eras[v], {}});
  }

  std::set<ReverseKey> pending;
  for (const auto& e : network.edges()) {
    if (eras[e.source] > eras[e.target]) pending.insert(key_of(e, eras));
  }

  auto midpoint = [&](NodeIndex v) {
    const auto& s = network.scholar(v);
    return activity_midpoint(s.birth, s.death, options.activity_offset);
  };
  // A backward move of v to `era` creates no reverse link iff no predecessor is later.
  auto backward_is_clean = [&](NodeIndex v, EraIndex era) {
    auto preds = network.predecessors(v);
    return std::all_of(preds.begin(), preds.end(), [&](NodeIndex p) { return eras[p] <= era; });
  };
  auto forward_is_clean = [&](NodeIndex v, EraIndex era) {
    auto succ = network.successors(v);
    return std::all_of(succ.begin(), succ.end(), [&](NodeIndex w) { return eras[w] >= era; });
  };

  auto move = [&](NodeIndex v, EraIndex to, MoveDirection dir, const Edge& cause) {
    for (NodeIndex p : network.predecessors(v)) {
      if (eras[p] > eras[v]) pending.erase(key_of({p, v}, eras));
    }
    for (NodeIndex w : network.successors(v)) {
      if (eras[v] > eras[w]) pending.erase(key_of({v, w}, eras));
    }
    trace.moves.push_back({v, eras[v], to, dir, cause});
    trace.scholars[v].moves.push_back(dir);
    eras[v] = to;
    trace.scholars[v].final_era = to;
    for (NodeIndex p : network.predecessors(v)) {
      if (eras[p] > eras[v]) pending.insert(key_of({p, v}, eras));
    }
    for (NodeIndex w : network.successors(v)) {
      if (eras[v] > eras[w]) pending.insert(key_of({v, w}, eras));
    }
  };

  const std::size_t bound = network.edge_count() * static_cast<std::size_t>(scheme.size());
  bool forward_only = options.policy == RepairPolicy::InfluencedForward;
  while (!pending.empty()) {
    if (trace.moves.size() >= bound) {
      throw Error(ErrorKind::Invariant,
                  fmt::format("era repair did not converge within {} moves ({} reverse links left)",
                              bound, pending.size()));
    }
    const auto [gap, u, v] = *pending.begin();
    const Edge cause{u, v};
    const EraIndex source_era = eras[u];
    const EraIndex target_era = eras[v];

    MoveDirection dir = MoveDirection::Forward;
    if (options.policy == RepairPolicy::InfluencerBackward) {
      dir = MoveDirection::Backward;
    } else if (!forward_only) {
      const bool back_ok = backward_is_clean(u, target_era);
      const bool fwd_ok = forward_is_clean(v, source_era);
      if (back_ok && fwd_ok) {
        const Year back_cost = scheme.distance_to_era(midpoint(u), target_era);
        const Year fwd_cost = scheme.distance_to_era(midpoint(v), source_era);
        dir = back_cost <= fwd_cost ? MoveDirection::Backward : MoveDirection::Forward;
      } else if (back_ok) {
        dir = MoveDirection::Backward;
      } else if (!fwd_ok) {
        forward_only = true;
        trace.forward_fallback_at = trace.moves.size();
        spdlog::debug("era repair: no clean move for {}->{}, switching to forward-only",
                      network.id(u), network.id(v));
      }
    }
    if (dir == MoveDirection::Backward) {
      move(u, target_era, dir, cause);
    } else {
      move(v, source_era, dir, cause);
    }
  }

  RepairResult result{network.with_eras(eras), std::move(trace)};
  return result;
}

void write_trace_csv(std::ostream& out, const AssignmentTrace& trace) {
  csv::Writer w(out);
  w.row({"id", "initial_era", "final_era", "n_moves"});
  for (const auto& s : trace.scholars) {
    w.row({s.id, std::to_string(s.initial_era), std::to_string(s.final_era),
           std::to_string(s.moves.size())});
  }
}

}  // namespace eranet::chronology
