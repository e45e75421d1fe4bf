#pragma once

// Structural primitives over compact, locally indexed directed graphs.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace eranet::graph {

using Vertex = std::uint32_t;
using Arc = std::pair<Vertex, Vertex>;

/// CSR adjacency with sorted, de-duplicated neighbor lists.
class Digraph {
 public:
  Digraph(std::size_t vertex_count, std::span<const Arc> arcs);

  std::size_t size() const noexcept { return out_offsets_.size() - 1; }
  std::size_t arc_count() const noexcept { return out_.size(); }
  std::span<const Vertex> out(Vertex v) const {
    return {out_.data() + out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]};
  }
  std::span<const Vertex> in(Vertex v) const {
    return {in_.data() + in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]};
  }
  bool has_arc(Vertex u, Vertex v) const;

 private:
  std::vector<std::size_t> out_offsets_, in_offsets_;
  std::vector<Vertex> out_, in_;
};

/// Component label per vertex plus the number of components.
struct Components {
  std::vector<std::uint32_t> label;
  std::size_t count = 0;

  std::vector<std::size_t> sizes() const;
};

Components weak_components(const Digraph& g);
/// Tarjan's algorithm, iterative.
Components strong_components(const Digraph& g);

/// Fraction of arcs whose reverse arc is also present.
double reciprocity(const Digraph& g);

struct TriadCounts {
  std::uint64_t triangles = 0;
  std::uint64_t connected_triples = 0;  // paths of length two, centred anywhere

  double transitivity() const {
    return connected_triples == 0 ? 0.0 : 3.0 * static_cast<double>(triangles) /
                                              static_cast<double>(connected_triples);
  }
};

/// Counts on the undirected simple projection (self-loops ignored).
TriadCounts undirected_triads(const Digraph& g);

}  // namespace eranet::graph
