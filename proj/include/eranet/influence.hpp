#pragma once

// Influence signatures, longitudinal influence power and influence patterns.

#include <iosfwd>
#include <string>
#include <vector>

#include "eranet/model.hpp"

namespace eranet::influence {

/// values[j] = out-links from the scholar into era own_era + j.
struct Signature {
  std::string id;
  EraIndex own_era = 0;
  std::vector<std::size_t> values;

  std::size_t total() const;
};

/// Throws Error(NotFound) for an unknown id and Error(Data) if the scholar
/// influences an earlier era.
Signature signature(const InfluenceNetwork& network, std::string_view id);
Signature signature(const InfluenceNetwork& network, NodeIndex scholar);
std::vector<Signature> all_signatures(const InfluenceNetwork& network);

/// Mean of the signature, zero entries included.
double influence_power(const Signature& sig);
double influence_power(std::span<const std::size_t> values);

/// Signature with every positive entry replaced by a mark; true = X.
struct Pattern {
  EraIndex own_era = 0;
  std::vector<bool> marks;

  std::string to_string() const;  // "[X,0,0]"
  auto operator<=>(const Pattern&) const = default;
};

Pattern pattern(const Signature& sig);

struct PatternFrequency {
  Pattern pattern;
  std::size_t count = 0;
  double fraction = 0.0;
};

/// Over scholars of `era` with at least one out-link; fraction descending,
/// ties by pattern (marks before blanks, left to right).
std::vector<PatternFrequency> pattern_frequencies(const InfluenceNetwork& network, EraIndex era);

/// One decimal, printf rounding (an exact binary tie such as 18.25 rounds to even).
std::string format_power(double power);

/// `id,era,s0..s{K-1},power`; entries before the scholar's era are blank.
void write_signatures_csv(std::ostream& out, const std::vector<Signature>& sigs,
                          const EraScheme& scheme);
void write_patterns_csv(std::ostream& out, const std::vector<std::vector<PatternFrequency>>& per_era,
                        const EraScheme& scheme);

}  // namespace eranet::influence
