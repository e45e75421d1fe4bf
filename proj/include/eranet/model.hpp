#pragma once

// Domain types shared by every analysis stage: the era periodization, scholars,
// and the immutable influence network with its adjacency index.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace eranet {

using Year = int;
using EraIndex = int;
using NodeIndex = std::uint32_t;

inline constexpr Year kDefaultHorizon = 2020;

struct Era {
  std::string name;
  Year upper_bound = 0;

  bool operator==(const Era&) const = default;
};

/// Ordered, contiguous periodization. Era i covers (upper[i-1], upper[i]];
/// the first era is unbounded below.
class EraScheme {
 public:
  /// Throws Error(Config) unless there are at least two eras with strictly
  /// increasing upper bounds and non-empty, unique names.
  explicit EraScheme(std::vector<Era> eras);

  /// Antiquity, MiddleAges, EarlyModern, Transition, ModernAge, Contemporary.
  static EraScheme standard();
  static EraScheme from_json(const nlohmann::json& doc);
  static EraScheme load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  int size() const noexcept { return static_cast<int>(eras_.size()); }
  const std::vector<Era>& eras() const noexcept { return eras_; }
  const Era& at(EraIndex era) const;
  const std::string& name(EraIndex era) const { return at(era).name; }

  /// Exclusive lower bound; nullopt for the first era.
  std::optional<Year> lower_bound(EraIndex era) const;
  Year upper_bound(EraIndex era) const { return at(era).upper_bound; }
  Year last_year() const noexcept { return eras_.back().upper_bound; }

  /// Throws Error(OutOfRange) for years past the final upper bound.
  EraIndex era_of_year(Year year) const;
  std::optional<EraIndex> index_of(std::string_view name) const;

  /// Years between `year` and the nearest year inside `era` (0 if inside).
  Year distance_to_era(Year year, EraIndex era) const;

  bool operator==(const EraScheme&) const = default;

 private:
  std::vector<Era> eras_;
};

struct Scholar {
  std::string id;
  std::string label;
  Year birth = 0;
  Year death = 0;
  bool birth_imputed = false;
  bool death_imputed = false;
  std::optional<EraIndex> era;

  bool operator==(const Scholar&) const = default;
};

struct InfluenceEdge {
  std::string source;
  std::string target;

  auto operator<=>(const InfluenceEdge&) const = default;
};

struct Edge {
  NodeIndex source = 0;
  NodeIndex target = 0;

  auto operator<=>(const Edge&) const = default;
};

/// Directed simple graph of influence links. Scholars are kept sorted by id,
/// so node indices follow lexicographic id order. Parallel edges are merged
/// on construction; edges whose endpoints are unknown are kept aside so that
/// validation can report them.
class InfluenceNetwork {
 public:
  InfluenceNetwork(EraScheme scheme, std::vector<Scholar> scholars,
                   std::vector<InfluenceEdge> edges);

  const EraScheme& scheme() const noexcept { return scheme_; }
  int era_count() const noexcept { return scheme_.size(); }

  std::size_t node_count() const noexcept { return scholars_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::span<const Scholar> scholars() const noexcept { return scholars_; }
  const Scholar& scholar(NodeIndex v) const { return scholars_.at(v); }
  const std::string& id(NodeIndex v) const { return scholars_.at(v).id; }

  std::optional<NodeIndex> find(std::string_view id) const;
  /// Throws Error(NotFound).
  NodeIndex index_of(std::string_view id) const;

  /// Sorted by (source, target).
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const NodeIndex> successors(NodeIndex v) const;
  std::span<const NodeIndex> predecessors(NodeIndex v) const;
  std::size_t out_degree(NodeIndex v) const { return successors(v).size(); }
  std::size_t in_degree(NodeIndex v) const { return predecessors(v).size(); }
  bool has_edge(NodeIndex source, NodeIndex target) const;

  /// Throws Error(Invariant) when the scholar has no era assigned.
  EraIndex era(NodeIndex v) const;
  bool fully_assigned() const noexcept;

  std::size_t duplicate_edge_count() const noexcept { return duplicate_edges_; }
  std::span<const InfluenceEdge> dangling_edges() const noexcept { return dangling_; }
  std::span<const std::string> duplicate_scholar_ids() const noexcept { return duplicate_ids_; }

  /// Copy with era assignments replaced; `eras` is indexed by NodeIndex.
  InfluenceNetwork with_eras(std::span<const EraIndex> eras) const;

  std::vector<InfluenceEdge> edge_list() const;

 private:
  EraScheme scheme_;
  std::vector<Scholar> scholars_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> out_offsets_;
  std::vector<NodeIndex> out_targets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeIndex> in_sources_;
  std::size_t duplicate_edges_ = 0;
  std::vector<InfluenceEdge> dangling_;
  std::vector<std::string> duplicate_ids_;

  void build_adjacency();
};

struct Violation {
  std::string entity;
  std::string rule;

  std::string message() const;
  bool operator==(const Violation&) const = default;
};

struct ValidationOptions {
  Year horizon = kDefaultHorizon;
  /// Report edges pointing from a later era to an earlier one.
  bool check_era_order = true;
};

/// Empty result iff every type invariant holds. Never throws on bad data.
std::vector<Violation> validate_network(const InfluenceNetwork& network,
                                        const ValidationOptions& options = {});

}  // namespace eranet
