#include "eranet/influence.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "eranet/csv.hpp"
#include "eranet/error.hpp"

namespace eranet::influence {

std::size_t Signature::total() const {
  return std::accumulate(values.begin(), values.end(), std::size_t{0});
}

Signature signature(const InfluenceNetwork& network, NodeIndex scholar) {
  const EraIndex own = network.era(scholar);
  Signature sig{network.id(scholar), own,
                std::vector<std::size_t>(static_cast<std::size_t>(network.era_count() - own), 0)};
  for (NodeIndex w : network.successors(scholar)) {
    const EraIndex target = network.era(w);
    if (target < own) {
      throw Error(ErrorKind::Data, fmt::format("reverse era link {}->{}; repair era assignments first",
                                               sig.id, network.id(w)));
    }
    ++sig.values[static_cast<std::size_t>(target - own)];
  }
  return sig;
}

Signature signature(const InfluenceNetwork& network, std::string_view id) {
  return signature(network, network.index_of(id));
}

std::vector<Signature> all_signatures(const InfluenceNetwork& network) {
  std::vector<Signature> out;
  out.reserve(network.node_count());
  for (NodeIndex v = 0; v < network.node_count(); ++v) out.push_back(signature(network, v));
  return out;
}

double influence_power(std::span<const std::size_t> values) {
  if (values.empty()) return 0.0;
  const auto sum = std::accumulate(values.begin(), values.end(), std::size_t{0});
  return static_cast<double>(sum) / static_cast<double>(values.size());
}

double influence_power(const Signature& sig) { return influence_power(sig.values); }

std::string Pattern::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < marks.size(); ++i) {
    if (i > 0) s += ',';
    s += marks[i] ? 'X' : '0';
  }
  return s + ']';
}

Pattern pattern(const Signature& sig) {
  Pattern p{sig.own_era, {}};
  p.marks.reserve(sig.values.size());
  for (auto v : sig.values) p.marks.push_back(v > 0);
  return p;
}

std::vector<PatternFrequency> pattern_frequencies(const InfluenceNetwork& network, EraIndex era) {
  std::map<std::vector<bool>, std::size_t> counts;
  std::size_t active = 0;
  for (NodeIndex v = 0; v < network.node_count(); ++v) {
    if (network.era(v) != era || network.out_degree(v) == 0) continue;
    ++active;
    ++counts[pattern(signature(network, v)).marks];
  }
  std::vector<PatternFrequency> out;
  for (auto& [marks, count] : counts) {
    out.push_back({Pattern{era, marks}, count,
                   static_cast<double>(count) / static_cast<double>(active)});
  }
  std::sort(out.begin(), out.end(), [](const PatternFrequency& a, const PatternFrequency& b) {
    if (a.count != b.count) return a.count > b.count;
    // marks sort before blanks
    return a.pattern.marks > b.pattern.marks;
  });
  return out;
}

std::string format_power(double power) { return fmt::format("{:.1f}", power); }

void write_signatures_csv(std::ostream& out, const std::vector<Signature>& sigs,
                          const EraScheme& scheme) {
  csv::Writer w(out);
  std::vector<std::string> header{"id", "era"};
  for (const auto& era : scheme.eras()) header.push_back(era.name);
  header.push_back("power");
  w.row(header);
  for (const auto& sig : sigs) {
    std::vector<std::string> row{sig.id, scheme.name(sig.own_era)};
    for (EraIndex e = 0; e < sig.own_era; ++e) row.emplace_back();
    for (auto v : sig.values) row.push_back(std::to_string(v));
    row.push_back(fmt::format("{:.6f}", influence_power(sig)));
    w.row(row);
  }
}

void write_patterns_csv(std::ostream& out, const std::vector<std::vector<PatternFrequency>>& per_era,
                        const EraScheme& scheme) {
  csv::Writer w(out);
  w.row({"era", "rank", "pattern", "count", "fraction"});
  for (std::size_t e = 0; e < per_era.size(); ++e) {
    std::size_t rank = 0;
    for (const auto& f : per_era[e]) {
      w.row({scheme.name(static_cast<EraIndex>(e)), std::to_string(++rank), f.pattern.to_string(),
             std::to_string(f.count), fmt::format("{:.6f}", f.fraction)});
    }
  }
}

}  // namespace eranet::influence
