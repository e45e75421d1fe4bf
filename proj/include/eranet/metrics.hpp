#pragma once

// Structural metric battery for partial networks.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eranet/graph.hpp"
#include "eranet/slicing.hpp"

namespace eranet::metrics {

struct UnipartiteMetrics {
  slicing::SliceSpec slice;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  /// N / era population; within-era slices only.
  std::optional<double> participation_ratio;
  double density = 0.0;
  bool density_undefined = false;  // N < 2
  double avg_out_degree = 0.0;
  std::size_t max_in_degree = 0;
  std::size_t max_out_degree = 0;
  std::size_t max_total_degree = 0;
  std::size_t wcc_count = 0;
  std::size_t largest_wcc_size = 0;
  double largest_wcc_fraction = 0.0;
  std::size_t scc_count = 0;  // strong components with more than one node
  double reciprocity = 0.0;
  double transitivity = 0.0;

  nlohmann::json to_json() const;
};

struct BipartiteMetrics {
  slicing::SliceSpec slice;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t sources = 0;
  std::size_t targets = 0;
  double density = 0.0;  // E / (N_s * N_t)
  double avg_in_degree = 0.0;   // over participating targets
  std::size_t max_in_degree = 0;
  double avg_out_degree = 0.0;  // over participating sources
  std::size_t max_out_degree = 0;
  bool empty = false;

  nlohmann::json to_json() const;
};

/// The slice as a locally indexed digraph; vertex i is pn.nodes[i].
graph::Digraph local_digraph(const slicing::PartialNetwork& pn);

/// Throws Error(InvalidArgument) for inter-era slices.
UnipartiteMetrics unipartite_metrics(const slicing::PartialNetwork& pn);
/// Throws Error(InvalidArgument) unless the slice is inter-era.
BipartiteMetrics bipartite_metrics(const slicing::PartialNetwork& pn);

enum class DegreeDirection { In, Out, Total };

DegreeDirection parse_direction(std::string_view text);

struct Ranked {
  std::string id;
  std::size_t value = 0;

  bool operator==(const Ranked&) const = default;
};

/// Degrees within the slice, descending, ties by id. Throws for k == 0.
std::vector<Ranked> top_k_by_degree(const slicing::PartialNetwork& pn, DegreeDirection direction,
                                    std::size_t k);

/// Combined tables, one row per slice.
void write_unipartite_csv(std::ostream& out, const std::vector<UnipartiteMetrics>& rows,
                          const EraScheme& scheme);
void write_bipartite_csv(std::ostream& out, const std::vector<BipartiteMetrics>& rows,
                         const EraScheme& scheme);

}  // namespace eranet::metrics
