#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>

#include <fmt/format.h>

#include "eranet/community.hpp"
#include "eranet/csv.hpp"
#include "eranet/error.hpp"

namespace eranet::community {

const char* to_string(EventType type) noexcept {
  switch (type) {
    case EventType::Birth: return "birth";
    case EventType::Continuation: return "continuation";
    case EventType::Merge: return "merge";
    case EventType::Split: return "split";
    case EventType::Death: return "death";
  }
  return "birth";
}

namespace {

std::vector<std::string> sorted_union(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
  std::vector<std::string> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void observe(DynamicCommunity& d, int step, std::uint32_t community,
             const std::vector<std::string>& members) {
  d.timeline.push_back({step, community});
  d.front = members;
  d.members = sorted_union(d.members, members);
  d.steps_unobserved = 0;
}

}  // namespace

TrackingResult track(std::span<const CommunityPartition> partitions, const TrackingConfig& config) {
  if (config.theta < 0.0 || config.theta > 1.0) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("theta {} outside [0, 1]", config.theta));
  }
  if (config.death_window < 1) {
    throw Error(ErrorKind::InvalidArgument, "death window must be at least 1");
  }
  for (std::size_t i = 1; i < partitions.size(); ++i) {
    if (partitions[i].step <= partitions[i - 1].step) {
      throw Error(ErrorKind::InvalidArgument, "partitions must have strictly increasing steps");
    }
  }

  TrackingResult result;
  auto& dyn = result.communities;
  std::vector<std::size_t> active;  // ascending ids of live dynamic communities

  auto create = [&](DynamicCommunity seed) {
    seed.id = dyn.size();
    dyn.push_back(std::move(seed));
    active.push_back(dyn.back().id);
    return dyn.back().id;
  };

  for (std::size_t p = 0; p < partitions.size(); ++p) {
    const auto& part = partitions[p];
    const int step = part.step;
    const auto members = part.members();
    const auto k = members.size();

    if (p == 0) {
      for (std::uint32_t a = 0; a < k; ++a) {
        DynamicCommunity d;
        observe(d, step, a, members[a]);
        const auto id = create(std::move(d));
        result.events.push_back({step, EventType::Birth, {id}, a});
      }
      continue;
    }

    // (step community, front) matches; fronts are looked up through the
    // node -> community map of this step so only overlapping pairs are scored.
    std::vector<std::vector<std::size_t>> matched_by(k);  // dynamic ids per step community
    std::map<std::size_t, std::vector<std::uint32_t>> matches_of;  // step communities per dynamic id
    std::vector<std::size_t> overlap(k, 0);
    for (auto id : active) {
      const auto& front = dyn[id].front;
      std::fill(overlap.begin(), overlap.end(), 0);
      for (const auto& node : front) {
        auto it = std::lower_bound(part.nodes.begin(), part.nodes.end(), node);
        if (it != part.nodes.end() && *it == node) {
          ++overlap[part.community[static_cast<std::size_t>(it - part.nodes.begin())]];
        }
      }
      for (std::uint32_t a = 0; a < k; ++a) {
        if (overlap[a] == 0) continue;
        const double sim = static_cast<double>(overlap[a]) /
                           static_cast<double>(members[a].size() + front.size() - overlap[a]);
        if (sim > config.theta) {
          matched_by[a].push_back(id);
          matches_of[id].push_back(a);
        }
      }
    }

    // Who carries each step community forward. A dynamic community matched
    // several times keeps its first step community and branches for the rest.
    std::vector<std::vector<std::size_t>> carriers(k);
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> branches(k);  // (parent, child)
    for (const auto& [id, list] : matches_of) {
      carriers[list.front()].push_back(id);
      for (std::size_t j = 1; j < list.size(); ++j) {
        DynamicCommunity child;
        child.timeline = dyn[id].timeline;
        child.front = dyn[id].front;
        child.members = dyn[id].members;
        child.merged = dyn[id].merged;
        child.split_from = id;
        const auto child_id = create(std::move(child));
        carriers[list[j]].push_back(child_id);
        branches[list[j]].emplace_back(id, child_id);
      }
    }

    for (std::uint32_t a = 0; a < k; ++a) {
      auto& carrying = carriers[a];
      std::sort(carrying.begin(), carrying.end());
      for (const auto& [parent, child] : branches[a]) {
        result.events.push_back({step, EventType::Split, {parent, child}, a});
      }
      if (carrying.empty()) {
        DynamicCommunity d;
        observe(d, step, a, members[a]);
        const auto id = create(std::move(d));
        result.events.push_back({step, EventType::Birth, {id}, a});
        continue;
      }
      if (matched_by[a].size() > 1) {
        result.events.push_back({step, EventType::Merge, carrying, a});
        for (auto id : carrying) dyn[id].merged = true;
      } else if (branches[a].empty() && matches_of[carrying.front()].size() == 1) {
        result.events.push_back({step, EventType::Continuation, carrying, a});
      }
      for (auto id : carrying) observe(dyn[id], step, a, members[a]);
    }

    std::vector<std::size_t> survivors;
    for (auto id : active) {
      auto& d = dyn[id];
      if (!d.timeline.empty() && d.timeline.back().step == step) {
        survivors.push_back(id);
        continue;
      }
      if (++d.steps_unobserved >= config.death_window) {
        d.dead = true;
        result.events.push_back({step, EventType::Death, {id}, std::nullopt});
      } else {
        survivors.push_back(id);
      }
    }
    std::sort(survivors.begin(), survivors.end());
    active = std::move(survivors);
  }
  return result;
}

std::vector<SweepRow> theta_sweep(std::span<const CommunityPartition> partitions,
                                  std::span<const double> thetas, int death_window,
                                  const EraLookup& era_of, int era_count) {
  for (double theta : thetas) {
    if (!(theta >= 0.0 && theta <= 1.0)) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("theta {} outside [0, 1]", theta));
    }
  }
  std::vector<SweepRow> rows;
  for (double theta : thetas) {
    const auto run = track(partitions, {theta, death_window});
    SweepRow row;
    row.theta = theta;
    row.dynamic_count = run.communities.size();
    std::vector<double> sizes, diversities;
    std::vector<EraIndex> eras;
    for (const auto& d : run.communities) {
      if (d.timeline.size() > 1) ++row.continued_count;
      if (d.merged) ++row.merged_count;
      sizes.push_back(static_cast<double>(d.members.size()));
      eras.clear();
      for (const auto& id : d.members) eras.push_back(era_of(id));
      if (!eras.empty()) diversities.push_back(diversity(eras, era_count));
    }
    row.members = Summary::of(std::move(sizes));
    row.diversity = Summary::of(std::move(diversities));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> parse_theta_range(std::string_view text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(':', start), text.size());
    const std::string piece(text.substr(start, end - start));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(piece, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (piece.empty() || used != piece.size()) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("bad theta range '{}'", text));
    }
    parts.push_back(value);
    start = end + 1;
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || parts[2] <= 0.0 || parts[1] < parts[0]) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("theta range must be lo:hi:step with step > 0, got '{}'", text));
  }
  const auto count = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9)) + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) {
    // snap to 12 decimals so 0.15 prints and compares as 0.15
    out.push_back(std::round((parts[0] + static_cast<double>(i) * parts[2]) * 1e12) / 1e12);
  }
  return out;
}

std::string PresencePattern::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (i > 0) s += ',';
    s += observed[i] ? 'X' : '0';
  }
  return s + "]";
}

std::vector<PresencePattern> era_presence_patterns(std::span<const DynamicCommunity> communities,
                                                   std::span<const int> steps) {
  std::map<std::vector<bool>, std::pair<std::size_t, std::size_t>> groups;  // count, size sum
  for (const auto& d : communities) {
    std::vector<bool> marks(steps.size(), false);
    for (const auto& obs : d.timeline) {
      auto it = std::find(steps.begin(), steps.end(), obs.step);
      if (it != steps.end()) marks[static_cast<std::size_t>(it - steps.begin())] = true;
    }
    auto& g = groups[marks];
    ++g.first;
    g.second += d.members.size();
  }
  std::vector<PresencePattern> out;
  for (const auto& [marks, g] : groups) {
    out.push_back({marks, g.first, static_cast<double>(g.second) / static_cast<double>(g.first)});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.observed > b.observed;
  });
  return out;
}

void write_partition_csv(std::ostream& out, const CommunityPartition& partition) {
  csv::Writer w(out);
  w.row({"node_id", "community_id"});
  for (std::size_t i = 0; i < partition.nodes.size(); ++i) {
    w.row({partition.nodes[i], std::to_string(partition.community[i])});
  }
}

CommunityPartition read_partition_csv(const std::filesystem::path& path, int step) {
  const auto table = csv::read_file(path);
  const int node_col = table.column("node_id");
  const int comm_col = table.column("community_id");
  if (node_col < 0 || comm_col < 0) {
    throw Error(ErrorKind::Parse, fmt::format("{}: expected node_id,community_id", path.string()));
  }
  std::vector<std::pair<std::string, std::uint32_t>> rows;
  for (const auto& row : table.rows) {
    const auto& id = row.fields.at(static_cast<std::size_t>(node_col));
    const auto& text = row.fields.at(static_cast<std::size_t>(comm_col));
    std::uint32_t c = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), c);
    if (ec != std::errc{} || ptr != text.data() + text.size() || id.empty()) {
      throw Error(ErrorKind::Parse, fmt::format("{}:{}: bad row", path.string(), row.line));
    }
    rows.emplace_back(id, c);
  }
  return CommunityPartition::from_assignment(step, std::move(rows));
}

void write_events_csv(std::ostream& out, const std::vector<Event>& events) {
  csv::Writer w(out);
  w.row({"step", "event", "dynamic_ids", "step_community_id"});
  for (const auto& e : events) {
    std::string ids;
    for (std::size_t i = 0; i < e.dynamic_ids.size(); ++i) {
      if (i > 0) ids += ';';
      ids += std::to_string(e.dynamic_ids[i]);
    }
    w.row({std::to_string(e.step), to_string(e.type), ids,
           e.step_community ? std::to_string(*e.step_community) : std::string{}});
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  csv::Writer w(out);
  w.row({"theta", "dynamic", "continued", "merged", "members_mean", "members_median",
         "members_75", "members_max", "diversity_mean", "diversity_median", "diversity_75",
         "diversity_max"});
  auto f = [](double x) { return fmt::format("{:.6f}", x); };
  for (const auto& r : rows) {
    w.row({fmt::format("{:.2f}", r.theta), std::to_string(r.dynamic_count),
           std::to_string(r.continued_count), std::to_string(r.merged_count), f(r.members.mean),
           f(r.members.median), f(r.members.q75), f(r.members.max), f(r.diversity.mean),
           f(r.diversity.median), f(r.diversity.q75), f(r.diversity.max)});
  }
}

void write_presence_csv(std::ostream& out, const std::vector<PresencePattern>& rows) {
  csv::Writer w(out);
  w.row({"pattern", "count", "avg_size"});
  for (const auto& r : rows) {
    w.row({r.to_string(), std::to_string(r.count), fmt::format("{:.2f}", r.average_size)});
  }
}

}  // namespace eranet::community
