#include "eranet/metrics.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "eranet/csv.hpp"
#include "eranet/error.hpp"

namespace eranet::metrics {

using slicing::PartialNetwork;
using slicing::SliceKind;

namespace {

graph::Vertex local_index(const PartialNetwork& pn, NodeIndex v) {
  auto it = std::lower_bound(pn.nodes.begin(), pn.nodes.end(), v);
  return static_cast<graph::Vertex>(it - pn.nodes.begin());
}

std::string slice_name(const slicing::SliceSpec& spec, const EraScheme& scheme) {
  switch (spec.kind) {
    case SliceKind::Within: return scheme.name(spec.era);
    case SliceKind::Inter: return fmt::format("{}->{}", scheme.name(spec.era), scheme.name(spec.target));
    case SliceKind::Accumulated: return fmt::format("<= {}", scheme.name(spec.era));
  }
  return {};
}

std::string num(double x) { return fmt::format("{:.6g}", x); }

}  // namespace

graph::Digraph local_digraph(const PartialNetwork& pn) {
  std::vector<graph::Arc> arcs;
  arcs.reserve(pn.edges.size());
  for (const auto& e : pn.edges) arcs.emplace_back(local_index(pn, e.source), local_index(pn, e.target));
  return graph::Digraph(pn.nodes.size(), arcs);
}

UnipartiteMetrics unipartite_metrics(const PartialNetwork& pn) {
  if (pn.spec.kind == SliceKind::Inter) {
    throw Error(ErrorKind::InvalidArgument, "unipartite metrics need a within or accumulated slice");
  }
  const auto g = local_digraph(pn);
  UnipartiteMetrics m;
  m.slice = pn.spec;
  m.nodes = g.size();
  m.edges = g.arc_count();
  if (pn.spec.kind == SliceKind::Within) {
    m.participation_ratio =
        pn.era_population == 0 ? 0.0
                               : static_cast<double>(m.nodes) / static_cast<double>(pn.era_population);
  }
  if (m.nodes < 2) {
    m.density_undefined = true;
  } else {
    m.density = static_cast<double>(m.edges) /
                (static_cast<double>(m.nodes) * static_cast<double>(m.nodes - 1));
  }
  if (m.nodes > 0) m.avg_out_degree = static_cast<double>(m.edges) / static_cast<double>(m.nodes);
  for (graph::Vertex v = 0; v < g.size(); ++v) {
    const auto in = g.in(v).size();
    const auto out = g.out(v).size();
    m.max_in_degree = std::max(m.max_in_degree, in);
    m.max_out_degree = std::max(m.max_out_degree, out);
    m.max_total_degree = std::max(m.max_total_degree, in + out);
  }
  const auto wcc = graph::weak_components(g);
  m.wcc_count = wcc.count;
  for (auto size : wcc.sizes()) m.largest_wcc_size = std::max(m.largest_wcc_size, size);
  if (m.nodes > 0) {
    m.largest_wcc_fraction = static_cast<double>(m.largest_wcc_size) / static_cast<double>(m.nodes);
  }
  const auto scc = graph::strong_components(g);
  for (auto size : scc.sizes()) {
    if (size > 1) ++m.scc_count;
  }
  m.reciprocity = graph::reciprocity(g);
  m.transitivity = graph::undirected_triads(g).transitivity();
  return m;
}

BipartiteMetrics bipartite_metrics(const PartialNetwork& pn) {
  if (pn.spec.kind != SliceKind::Inter) {
    throw Error(ErrorKind::InvalidArgument, "bipartite metrics need an inter-era slice");
  }
  BipartiteMetrics m;
  m.slice = pn.spec;
  m.edges = pn.edges.size();
  m.sources = pn.sources.size();
  m.targets = pn.targets.size();
  m.nodes = m.sources + m.targets;
  if (m.edges == 0) {
    m.empty = true;
    return m;
  }
  m.density = static_cast<double>(m.edges) /
              (static_cast<double>(m.sources) * static_cast<double>(m.targets));
  m.avg_in_degree = static_cast<double>(m.edges) / static_cast<double>(m.targets);
  m.avg_out_degree = static_cast<double>(m.edges) / static_cast<double>(m.sources);
  const auto g = local_digraph(pn);
  for (graph::Vertex v = 0; v < g.size(); ++v) {
    m.max_in_degree = std::max(m.max_in_degree, g.in(v).size());
    m.max_out_degree = std::max(m.max_out_degree, g.out(v).size());
  }
  return m;
}

DegreeDirection parse_direction(std::string_view text) {
  if (text == "in") return DegreeDirection::In;
  if (text == "out") return DegreeDirection::Out;
  if (text == "total") return DegreeDirection::Total;
  throw Error(ErrorKind::InvalidArgument, fmt::format("unknown degree direction '{}'", text));
}

std::vector<Ranked> top_k_by_degree(const PartialNetwork& pn, DegreeDirection direction,
                                    std::size_t k) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  const auto g = local_digraph(pn);
  std::vector<Ranked> all;
  all.reserve(g.size());
  for (graph::Vertex v = 0; v < g.size(); ++v) {
    std::size_t d = 0;
    if (direction != DegreeDirection::Out) d += g.in(v).size();
    if (direction != DegreeDirection::In) d += g.out(v).size();
    all.push_back({pn.network->id(pn.nodes[v]), d});
  }
  const auto n = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n), all.end(),
                    [](const Ranked& a, const Ranked& b) {
                      return a.value != b.value ? a.value > b.value : a.id < b.id;
                    });
  all.resize(n);
  return all;
}

nlohmann::json UnipartiteMetrics::to_json() const {
  nlohmann::json j{{"slice", slice.label()},
                   {"N", nodes},
                   {"E", edges},
                   {"density", density},
                   {"density_undefined", density_undefined},
                   {"avg_out_degree", avg_out_degree},
                   {"max_in_degree", max_in_degree},
                   {"max_out_degree", max_out_degree},
                   {"max_degree", max_total_degree},
                   {"wcc", wcc_count},
                   {"largest_wcc", largest_wcc_size},
                   {"largest_wcc_fraction", largest_wcc_fraction},
                   {"scc", scc_count},
                   {"reciprocity", reciprocity},
                   {"transitivity", transitivity}};
  if (participation_ratio) j["participation_ratio"] = *participation_ratio;
  return j;
}

nlohmann::json BipartiteMetrics::to_json() const {
  return {{"slice", slice.label()},
          {"N", nodes},
          {"E", edges},
          {"N_s", sources},
          {"N_t", targets},
          {"density", density},
          {"avg_in_degree", avg_in_degree},
          {"max_in_degree", max_in_degree},
          {"avg_out_degree", avg_out_degree},
          {"max_out_degree", max_out_degree},
          {"empty", empty}};
}

void write_unipartite_csv(std::ostream& out, const std::vector<UnipartiteMetrics>& rows,
                          const EraScheme& scheme) {
  csv::Writer w(out);
  w.row({"slice", "era", "N", "E", "N/A", "density", "avg_out_degree", "max_in_degree",
         "max_out_degree", "max_degree", "wcc", "largest_wcc", "largest_wcc_fraction", "scc",
         "reciprocity", "transitivity"});
  for (const auto& m : rows) {
    w.row({m.slice.label(), slice_name(m.slice, scheme), std::to_string(m.nodes),
           std::to_string(m.edges), m.participation_ratio ? num(*m.participation_ratio) : "",
           num(m.density), num(m.avg_out_degree), std::to_string(m.max_in_degree),
           std::to_string(m.max_out_degree), std::to_string(m.max_total_degree),
           std::to_string(m.wcc_count), std::to_string(m.largest_wcc_size),
           num(m.largest_wcc_fraction), std::to_string(m.scc_count), num(m.reciprocity),
           num(m.transitivity)});
  }
}

void write_bipartite_csv(std::ostream& out, const std::vector<BipartiteMetrics>& rows,
                         const EraScheme& scheme) {
  csv::Writer w(out);
  w.row({"slice", "eras", "N", "E", "N_s", "N_t", "density", "avg_in_degree", "max_in_degree",
         "avg_out_degree", "max_out_degree"});
  for (const auto& m : rows) {
    w.row({m.slice.label(), slice_name(m.slice, scheme), std::to_string(m.nodes),
           std::to_string(m.edges), std::to_string(m.sources), std::to_string(m.targets),
           num(m.density), num(m.avg_in_degree), std::to_string(m.max_in_degree),
           num(m.avg_out_degree), std::to_string(m.max_out_degree)});
  }
}

}  // namespace eranet::metrics
