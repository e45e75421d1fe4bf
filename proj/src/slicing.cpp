#include "eranet/slicing.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <ostream>

#include <fmt/format.h>

#include "eranet/csv.hpp"
#include "eranet/error.hpp"

namespace eranet::slicing {

namespace {

void require_repaired(const InfluenceNetwork& network) {
  for (const auto& e : network.edges()) {
    if (network.era(e.source) > network.era(e.target)) {
      throw Error(ErrorKind::Data,
                  fmt::format("reverse era link {}->{}; repair era assignments first",
                              network.id(e.source), network.id(e.target)));
    }
  }
}

EraIndex parse_era(std::string_view text, const EraScheme* scheme) {
  EraIndex value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec == std::errc{} && ptr == text.data() + text.size()) return value;
  if (scheme != nullptr) {
    if (auto idx = scheme->index_of(text)) return *idx;
  }
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown era '{}'", text));
}

std::string fmt_fraction(double x) { return fmt::format("{:.6f}", x); }

}  // namespace

SliceSpec SliceSpec::parse(std::string_view text, const EraScheme* scheme) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::InvalidArgument, fmt::format("bad slice '{}'", text));
  }
  const auto kind = text.substr(0, colon);
  auto rest = text.substr(colon + 1);
  if (kind == "within") return within(parse_era(rest, scheme));
  if (kind == "accumulated") return accumulated(parse_era(rest, scheme));
  if (kind == "inter") {
    const auto sep = rest.find_first_of(":-");
    if (sep == std::string_view::npos) {
      throw Error(ErrorKind::InvalidArgument, fmt::format("inter slice needs two eras: '{}'", text));
    }
    return inter(parse_era(rest.substr(0, sep), scheme), parse_era(rest.substr(sep + 1), scheme));
  }
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown slice kind '{}'", kind));
}

std::string SliceSpec::label() const {
  switch (kind) {
    case SliceKind::Within: return fmt::format("within:{}", era);
    case SliceKind::Inter: return fmt::format("inter:{}:{}", era, target);
    case SliceKind::Accumulated: return fmt::format("accumulated:{}", era);
  }
  return {};
}

PartialNetwork slice(const InfluenceNetwork& network, SliceSpec spec) {
  const int k = network.era_count();
  auto check_era = [k](EraIndex e) {
    if (e < 0 || e >= k) {
      throw Error(ErrorKind::OutOfRange, fmt::format("era index {} outside [0, {})", e, k));
    }
  };
  check_era(spec.era);
  check_era(spec.target);
  if (spec.kind == SliceKind::Inter && spec.era >= spec.target) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("inter slice needs source era < target era, got {} -> {}", spec.era,
                            spec.target));
  }
  require_repaired(network);

  PartialNetwork pn;
  pn.spec = spec;
  pn.network = &network;
  std::vector<char> touched(network.node_count(), 0);

  switch (spec.kind) {
    case SliceKind::Within:
      for (NodeIndex v = 0; v < network.node_count(); ++v) {
        if (network.era(v) == spec.era) ++pn.era_population;
      }
      for (const auto& e : network.edges()) {
        if (network.era(e.source) == spec.era && network.era(e.target) == spec.era) {
          pn.edges.push_back(e);
          touched[e.source] = touched[e.target] = 1;
        }
      }
      for (NodeIndex v = 0; v < touched.size(); ++v) {
        if (touched[v]) pn.nodes.push_back(v);
      }
      break;
    case SliceKind::Inter: {
      std::vector<char> is_target(network.node_count(), 0);
      for (const auto& e : network.edges()) {
        if (network.era(e.source) == spec.era && network.era(e.target) == spec.target) {
          pn.edges.push_back(e);
          touched[e.source] = 1;
          is_target[e.target] = 1;
        }
      }
      for (NodeIndex v = 0; v < touched.size(); ++v) {
        if (touched[v]) pn.sources.push_back(v);
        if (is_target[v]) pn.targets.push_back(v);
        if (touched[v] || is_target[v]) pn.nodes.push_back(v);
      }
      break;
    }
    case SliceKind::Accumulated:
      for (NodeIndex v = 0; v < network.node_count(); ++v) {
        if (network.era(v) <= spec.era) pn.nodes.push_back(v);
      }
      pn.era_population = pn.nodes.size();
      for (const auto& e : network.edges()) {
        if (network.era(e.source) <= spec.era && network.era(e.target) <= spec.era) {
          pn.edges.push_back(e);
        }
      }
      break;
  }
  return pn;
}

std::vector<SliceSpec> era_pair_slices(int era_count) {
  std::vector<SliceSpec> out;
  for (EraIndex e = 0; e < era_count; ++e) out.push_back(SliceSpec::within(e));
  for (EraIndex s = 0; s < era_count; ++s) {
    for (EraIndex t = s + 1; t < era_count; ++t) out.push_back(SliceSpec::inter(s, t));
  }
  return out;
}

std::size_t EraLinkMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

EraLinkMatrix link_matrix(const InfluenceNetwork& network) {
  require_repaired(network);
  EraLinkMatrix m;
  m.size = network.era_count();
  m.counts.assign(static_cast<std::size_t>(m.size * m.size), 0);
  for (const auto& e : network.edges()) {
    ++m.counts[static_cast<std::size_t>(network.era(e.source) * m.size + network.era(e.target))];
  }
  return m;
}

ReceivedPercentages received_percentages(const EraLinkMatrix& matrix) {
  ReceivedPercentages pct;
  pct.size = matrix.size;
  pct.fractions.assign(matrix.counts.size(), 0.0);
  pct.empty_columns.assign(static_cast<std::size_t>(matrix.size), false);
  for (EraIndex t = 0; t < matrix.size; ++t) {
    std::size_t column = 0;
    for (EraIndex s = 0; s < matrix.size; ++s) column += matrix.at(s, t);
    if (column == 0) {
      pct.empty_columns[static_cast<std::size_t>(t)] = true;
      continue;
    }
    for (EraIndex s = 0; s < matrix.size; ++s) {
      pct.fractions[static_cast<std::size_t>(s * matrix.size + t)] =
          static_cast<double>(matrix.at(s, t)) / static_cast<double>(column);
    }
  }
  return pct;
}

AliveSeries alive_per_year(const InfluenceNetwork& network, Year first_year, Year last_year) {
  if (last_year < first_year) {
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("empty year range [{}, {}]", first_year, last_year));
  }
  AliveSeries series;
  series.first_year = first_year;
  series.last_year = last_year;
  series.era_count = network.era_count();
  const auto years = static_cast<std::size_t>(last_year - first_year + 1);
  const auto k = static_cast<std::size_t>(series.era_count);
  // difference array over years, one column per era
  std::vector<long long> delta((years + 1) * k, 0);
  for (const auto& s : network.scholars()) {
    if (!s.era) continue;
    const Year lo = std::max(s.birth, first_year);
    const Year hi = std::min(s.death, last_year);
    if (lo > hi) continue;
    delta[static_cast<std::size_t>(lo - first_year) * k + static_cast<std::size_t>(*s.era)] += 1;
    delta[static_cast<std::size_t>(hi - first_year + 1) * k + static_cast<std::size_t>(*s.era)] -= 1;
  }
  series.counts.assign(years * k, 0);
  std::vector<long long> running(k, 0);
  for (std::size_t y = 0; y < years; ++y) {
    for (std::size_t e = 0; e < k; ++e) {
      running[e] += delta[y * k + e];
      series.counts[y * k + e] = static_cast<std::size_t>(running[e]);
    }
  }
  return series;
}

void write_link_matrix_csv(std::ostream& out, const EraLinkMatrix& matrix, const EraScheme& scheme) {
  csv::Writer w(out);
  std::vector<std::string> header{"source_era"};
  for (const auto& era : scheme.eras()) header.push_back(era.name);
  w.row(header);
  for (EraIndex s = 0; s < matrix.size; ++s) {
    std::vector<std::string> row{scheme.name(s)};
    for (EraIndex t = 0; t < matrix.size; ++t) row.push_back(std::to_string(matrix.at(s, t)));
    w.row(row);
  }
}

void write_percentages_csv(std::ostream& out, const ReceivedPercentages& pct,
                           const EraScheme& scheme) {
  csv::Writer w(out);
  std::vector<std::string> header{"source_era"};
  for (const auto& era : scheme.eras()) header.push_back(era.name);
  w.row(header);
  for (EraIndex s = 0; s < pct.size; ++s) {
    std::vector<std::string> row{scheme.name(s)};
    for (EraIndex t = 0; t < pct.size; ++t) row.push_back(fmt_fraction(pct.at(s, t)));
    w.row(row);
  }
}

void write_alive_csv(std::ostream& out, const AliveSeries& series, const EraScheme& scheme) {
  csv::Writer w(out);
  std::vector<std::string> header{"year"};
  for (const auto& era : scheme.eras()) header.push_back(era.name);
  w.row(header);
  for (Year y = series.first_year; y <= series.last_year; ++y) {
    std::vector<std::string> row{std::to_string(y)};
    for (EraIndex e = 0; e < series.era_count; ++e) row.push_back(std::to_string(series.at(y, e)));
    w.row(row);
  }
}

void write_dot(std::ostream& out, const PartialNetwork& pn) {
  const auto& net = *pn.network;
  auto quote = [](std::string_view s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + '"';
  };
  out << "digraph " << quote(pn.spec.label()) << " {\n";
  for (NodeIndex v : pn.nodes) {
    const auto& s = net.scholar(v);
    out << "  " << quote(s.id) << " [label=" << quote(s.label.empty() ? s.id : s.label)
        << ", era=" << net.era(v) << "];\n";
  }
  for (const auto& e : pn.edges) {
    out << "  " << quote(net.id(e.source)) << " -> " << quote(net.id(e.target)) << ";\n";
  }
  out << "}\n";
}

}  // namespace eranet::slicing
