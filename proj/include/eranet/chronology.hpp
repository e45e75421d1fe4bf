#pragma once

// Era assignment by the activity-midpoint rule, and repair of era-reversing
// influence links by iterative re-assignment.

#include <string>
#include <vector>

#include "eranet/model.hpp"

namespace eranet::chronology {

inline constexpr Year kDefaultActivityOffset = 20;

/// Middle of the active part of a lifespan. Lives too short to have an
/// active part after `activity_offset` years fall back to the full lifespan.
Year activity_midpoint(Year birth, Year death, Year activity_offset = kDefaultActivityOffset);

/// Throws Error(OutOfRange) when the midpoint falls past the last era.
EraIndex assign_initial_era(const Scholar& scholar, const EraScheme& scheme,
                            Year activity_offset = kDefaultActivityOffset);

/// Assigns every scholar; existing assignments are overwritten.
InfluenceNetwork assign_eras(const InfluenceNetwork& network,
                             Year activity_offset = kDefaultActivityOffset);

/// Edges with era(source) > era(target), ordered by era gap descending, then
/// by (source id, target id). Requires every scholar to have an era.
std::vector<Edge> find_reverse_links(const InfluenceNetwork& network);

enum class RepairPolicy {
  /// Move whichever endpoint lies fewer years from the destination era,
  /// among moves that create no new reverse link.
  MinimalDisplacement,
  InfluencerBackward,
  InfluencedForward,
};

const char* to_string(RepairPolicy policy) noexcept;
RepairPolicy parse_repair_policy(std::string_view text);

enum class MoveDirection { Backward, Forward };

struct Move {
  NodeIndex scholar = 0;
  EraIndex from = 0;
  EraIndex to = 0;
  MoveDirection direction = MoveDirection::Backward;
  Edge cause;  // the reverse link this move repaired
};

struct ScholarTrace {
  std::string id;
  EraIndex initial_era = 0;
  EraIndex final_era = 0;
  std::vector<MoveDirection> moves;
};

struct AssignmentTrace {
  RepairPolicy policy = RepairPolicy::MinimalDisplacement;
  std::vector<ScholarTrace> scholars;  // indexed by NodeIndex
  std::vector<Move> moves;             // in execution order
  /// MinimalDisplacement only: step at which the policy switched to forward-only
  /// moves because neither endpoint could move without creating a new reverse link.
  std::optional<std::size_t> forward_fallback_at;

  std::size_t moved_scholars() const;
};

struct RepairResult {
  InfluenceNetwork network;
  AssignmentTrace trace;
};

struct RepairOptions {
  RepairPolicy policy = RepairPolicy::MinimalDisplacement;
  Year activity_offset = kDefaultActivityOffset;
};

/// Repairs one most-reversed link at a time until none remain. Throws
/// Error(Invariant) if |E| x |eras| moves do not suffice.
RepairResult repair_assignments(const InfluenceNetwork& network, const RepairOptions& options = {});

/// CSV `id,initial_era,final_era,n_moves`.
void write_trace_csv(std::ostream& out, const AssignmentTrace& trace);

}  // namespace eranet::chronology
