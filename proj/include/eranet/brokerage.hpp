#pragma once

// Gould-Fernandez brokerage roles with eras as the group partition.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "eranet/metrics.hpp"
#include "eranet/model.hpp"

namespace eranet::brokerage {

enum class Role { Coordinator, Gatekeeper, Representative, Liaison, Consultant };

inline constexpr std::array kRoles{Role::Coordinator, Role::Gatekeeper, Role::Representative,
                                   Role::Liaison, Role::Consultant};

const char* to_string(Role role) noexcept;
Role parse_role(std::string_view text);

struct Scores {
  std::string id;
  EraIndex era = 0;
  std::array<std::size_t, 5> counts{};  // indexed by Role

  std::size_t operator[](Role r) const { return counts[static_cast<std::size_t>(r)]; }
  std::size_t& operator[](Role r) { return counts[static_cast<std::size_t>(r)]; }
  /// Roles with a positive count.
  int distinct_roles() const;
  std::size_t total() const;
};

/// Classifies the middle node B of every two-path A->B->C with A != C and no
/// A->C edge. Indexed by NodeIndex. Throws Error(Data) on reverse era links.
/// `threads` > 1 splits the middle nodes across workers; results are identical.
std::vector<Scores> brokerage_scores(const InfluenceNetwork& network, unsigned threads = 1);

/// Role of B given the eras of A, B, C (A <= B <= C after repair).
Role classify(EraIndex a, EraIndex b, EraIndex c);

struct RoleCountRow {
  std::string label;  // era name or "overall"
  std::size_t scholars = 0;
  std::array<std::size_t, 6> holders{};  // index = number of distinct roles

  double fraction(int roles) const;
};

/// One row per era plus a final "overall" row; fractions over all scholars.
std::vector<RoleCountRow> role_count_distribution(const std::vector<Scores>& scores,
                                                  const EraScheme& scheme);

/// Scholars of `era` with a positive count for `role`, descending, ties by id.
std::vector<metrics::Ranked> top_brokers(const std::vector<Scores>& scores, Role role,
                                         EraIndex era, std::size_t k);

/// `id,era,coordinator,gatekeeper,representative,liaison`.
void write_scores_csv(std::ostream& out, const std::vector<Scores>& scores, const EraScheme& scheme);
void write_distribution_csv(std::ostream& out, const std::vector<RoleCountRow>& rows);

}  // namespace eranet::brokerage
