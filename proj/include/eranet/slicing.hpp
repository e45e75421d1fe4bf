#pragma once

// Within-era, inter-era and accumulated-era projections of a repaired network,
// era-to-era link counts and the alive-per-year series.

#include <iosfwd>
#include <string>
#include <vector>

#include "eranet/model.hpp"

namespace eranet::slicing {

enum class SliceKind { Within, Inter, Accumulated };

struct SliceSpec {
  SliceKind kind = SliceKind::Within;
  EraIndex era = 0;     // within / accumulated era, or the inter-era source era
  EraIndex target = 0;  // inter-era target era

  static SliceSpec within(EraIndex e) { return {SliceKind::Within, e, e}; }
  static SliceSpec inter(EraIndex s, EraIndex t) { return {SliceKind::Inter, s, t}; }
  static SliceSpec accumulated(EraIndex e) { return {SliceKind::Accumulated, e, e}; }

  /// "within:0", "inter:0:2", "accumulated:3"; era names are accepted in
  /// place of indices when a scheme is given.
  static SliceSpec parse(std::string_view text, const EraScheme* scheme = nullptr);
  std::string label() const;

  bool operator==(const SliceSpec&) const = default;
};

/// A projection of an InfluenceNetwork. Node and edge indices refer to the
/// parent network, which must outlive the projection.
struct PartialNetwork {
  SliceSpec spec;
  const InfluenceNetwork* network = nullptr;
  std::vector<NodeIndex> nodes;    // sorted
  std::vector<Edge> edges;         // sorted
  std::vector<NodeIndex> sources;  // inter only: nodes of the source era with an edge
  std::vector<NodeIndex> targets;  // inter only
  /// Scholars of the era (within) or of eras up to the target (accumulated).
  std::size_t era_population = 0;
};

/// Throws Error(InvalidArgument) for inter(s, t) with s >= t, Error(OutOfRange)
/// for unknown eras and Error(Data) when the network still has reverse links.
PartialNetwork slice(const InfluenceNetwork& network, SliceSpec spec);

/// The K within-era slices followed by the K(K-1)/2 inter-era slices.
std::vector<SliceSpec> era_pair_slices(int era_count);

/// counts[s][t] = number of edges from era s to era t.
struct EraLinkMatrix {
  int size = 0;
  std::vector<std::size_t> counts;  // row-major

  std::size_t at(EraIndex s, EraIndex t) const { return counts[static_cast<std::size_t>(s * size + t)]; }
  std::size_t total() const;
};

EraLinkMatrix link_matrix(const InfluenceNetwork& network);

struct ReceivedPercentages {
  int size = 0;
  std::vector<double> fractions;   // row-major, columns sum to 1
  std::vector<bool> empty_columns; // eras that receive nothing

  double at(EraIndex s, EraIndex t) const { return fractions[static_cast<std::size_t>(s * size + t)]; }
};

ReceivedPercentages received_percentages(const EraLinkMatrix& matrix);

struct AliveSeries {
  Year first_year = 0;
  Year last_year = 0;
  int era_count = 0;
  std::vector<std::size_t> counts;  // (year - first_year) * era_count + era

  std::size_t at(Year year, EraIndex era) const {
    return counts[static_cast<std::size_t>((year - first_year) * era_count + era)];
  }
};

/// Scholars alive (birth <= y <= death) per year, grouped by assigned era.
/// Unassigned scholars are skipped.
AliveSeries alive_per_year(const InfluenceNetwork& network, Year first_year, Year last_year);

void write_link_matrix_csv(std::ostream& out, const EraLinkMatrix& matrix, const EraScheme& scheme);
void write_percentages_csv(std::ostream& out, const ReceivedPercentages& pct, const EraScheme& scheme);
void write_alive_csv(std::ostream& out, const AliveSeries& series, const EraScheme& scheme);
void write_dot(std::ostream& out, const PartialNetwork& pn);

}  // namespace eranet::slicing
