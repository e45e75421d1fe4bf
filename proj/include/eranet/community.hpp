#pragma once

// Community detection on accumulated-era networks, era diversity of
// communities, and threshold-based tracking of dynamic communities across
// era steps (birth, death, merge, split, continuation).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eranet/slicing.hpp"

namespace eranet::community {

// ---------------------------------------------------------------------------
// Modularity optimisation

struct WeightedEdge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double weight = 1.0;
};

/// Undirected weighted graph; parallel edges are summed, self-loops allowed.
class WeightedGraph {
 public:
  WeightedGraph(std::size_t vertex_count, std::span<const WeightedEdge> edges);

  std::size_t size() const noexcept { return adjacency_.size(); }
  /// Neighbours with summed weights, sorted; a self-loop lists the vertex itself.
  std::span<const std::pair<std::uint32_t, double>> neighbors(std::uint32_t v) const {
    return adjacency_[v];
  }
  double self_loop(std::uint32_t v) const { return self_loops_[v]; }
  /// Weighted degree; self-loops count twice.
  double strength(std::uint32_t v) const { return strength_[v]; }
  /// Sum of edge weights, each edge once.
  double total_weight() const noexcept { return total_weight_; }

 private:
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adjacency_;
  std::vector<double> self_loops_;
  std::vector<double> strength_;
  double total_weight_ = 0.0;
};

/// Newman-Girvan modularity; 0 for a graph without edges.
double modularity(const WeightedGraph& g, std::span<const std::uint32_t> membership);

struct LouvainResult {
  std::vector<std::uint32_t> membership;  // dense ids, numbered by first vertex
  std::size_t community_count = 0;
  double modularity = 0.0;
  /// Modularity of the singleton start, after every aggregation level, then after
  /// every accepted refinement round. Never decreases.
  std::vector<double> level_modularity;
};

/// Local moving plus aggregation until a level gains no more than `min_gain`.
/// Vertex visit order is shuffled from `seed`; identical seeds give identical results.
LouvainResult louvain(const WeightedGraph& g, std::uint64_t seed, double min_gain = 1e-9);

/// Undirected projection of a slice: each directed edge adds weight 1 to its pair.
WeightedGraph undirected_projection(const slicing::PartialNetwork& pn);

// ---------------------------------------------------------------------------
// Partitions

struct CommunityPartition {
  int step = 0;
  std::vector<std::string> nodes;        // sorted ids
  std::vector<std::uint32_t> community;  // parallel to nodes; dense ids
  std::size_t community_count = 0;
  double modularity = 0.0;

  /// Member ids per community, each list sorted.
  std::vector<std::vector<std::string>> members() const;
  std::vector<std::size_t> sizes() const;

  /// Validates ids and density of community numbers; throws Error(Data).
  static CommunityPartition from_assignment(int step,
                                            std::vector<std::pair<std::string, std::uint32_t>> rows);
};

/// Throws Error(InvalidArgument) unless the slice is accumulated.
CommunityPartition detect_communities(const slicing::PartialNetwork& pn, std::uint64_t seed);

struct CommunitySummary {
  std::uint32_t id = 0;
  std::size_t size = 0;
  std::size_t internal_edges = 0;
};

/// pandas-style summary: sample standard deviation, linear-interpolated quantiles.
struct Summary {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;

  static Summary of(std::vector<double> values);
  nlohmann::json to_json() const;
};

struct CommunityStats {
  std::size_t count = 0;
  std::size_t large_count = 0;  // size >= large_threshold
  std::vector<CommunitySummary> largest;
  Summary sizes;

  nlohmann::json to_json() const;
};

/// Internal edge counts come from `network` when given.
CommunityStats community_stats(const CommunityPartition& partition,
                               const InfluenceNetwork* network = nullptr,
                               std::size_t large_threshold = 10, std::size_t top_n = 3);

/// Normalised Shannon entropy of member eras: -sum p log2 p / log2 K.
/// Throws Error(InvalidArgument) for an empty member list or K < 2.
double diversity(std::span<const EraIndex> member_eras, int era_count);

/// |a ∩ b| / |a ∪ b| over sorted, duplicate-free lists.
/// Throws Error(InvalidArgument) when both are empty.
double jaccard(std::span<const std::string> a, std::span<const std::string> b);

// ---------------------------------------------------------------------------
// Tracking

struct TrackingConfig {
  double theta = 0.3;    // match iff similarity > theta
  int death_window = 1;  // unobserved steps before a dynamic community dies
};

enum class EventType { Birth, Continuation, Merge, Split, Death };

const char* to_string(EventType type) noexcept;

struct Event {
  int step = 0;
  EventType type = EventType::Birth;
  std::vector<std::size_t> dynamic_ids;
  std::optional<std::uint32_t> step_community;

  bool operator==(const Event&) const = default;
};

struct Observation {
  int step = 0;
  std::uint32_t community = 0;

  bool operator==(const Observation&) const = default;
};

struct DynamicCommunity {
  std::size_t id = 0;
  std::vector<Observation> timeline;
  std::vector<std::string> front;    // members of the latest observation
  std::vector<std::string> members;  // union over the timeline
  bool dead = false;
  int steps_unobserved = 0;
  bool merged = false;
  std::optional<std::size_t> split_from;
};

struct TrackingResult {
  std::vector<DynamicCommunity> communities;  // indexed by id
  std::vector<Event> events;
};

/// Partitions must have strictly increasing steps. The first partition seeds
/// one dynamic community (a birth) per step community. At each later step
/// every (step community, live front) pair with Jaccard similarity > theta
/// matches. A dynamic community matched to several step communities keeps the
/// lowest-numbered one and branches a new dynamic community for each other
/// (split); a step community matched by several dynamic communities is added
/// to all of them (merge). Events within a step are ordered by step community,
/// then deaths by dynamic id.
TrackingResult track(std::span<const CommunityPartition> partitions, const TrackingConfig& config);

using EraLookup = std::function<EraIndex(const std::string&)>;

struct SweepRow {
  double theta = 0.0;
  std::size_t dynamic_count = 0;
  std::size_t continued_count = 0;  // observed at two or more steps
  std::size_t merged_count = 0;     // took part in at least one merge
  Summary members;                  // distinct members per dynamic community
  Summary diversity;
};

/// One independent tracking run per theta. Throws Error(InvalidArgument) for
/// thetas outside [0, 1].
std::vector<SweepRow> theta_sweep(std::span<const CommunityPartition> partitions,
                                  std::span<const double> thetas, int death_window,
                                  const EraLookup& era_of, int era_count);

/// "lo:hi:step", inclusive of hi up to rounding.
std::vector<double> parse_theta_range(std::string_view text);

struct PresencePattern {
  std::vector<bool> observed;  // one mark per step
  std::size_t count = 0;
  double average_size = 0.0;

  std::string to_string() const;
};

/// Groups dynamic communities by the steps they were observed at; count
/// descending, ties by pattern.
std::vector<PresencePattern> era_presence_patterns(std::span<const DynamicCommunity> communities,
                                                   std::span<const int> steps);

void write_partition_csv(std::ostream& out, const CommunityPartition& partition);
CommunityPartition read_partition_csv(const std::filesystem::path& path, int step);
void write_events_csv(std::ostream& out, const std::vector<Event>& events);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_presence_csv(std::ostream& out, const std::vector<PresencePattern>& rows);

}  // namespace eranet::community
