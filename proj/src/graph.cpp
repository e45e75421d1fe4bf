#include "eranet/graph.hpp"

#include <algorithm>
#include <limits>

namespace eranet::graph {

Digraph::Digraph(std::size_t vertex_count, std::span<const Arc> arcs) {
  std::vector<Arc> sorted(arcs.begin(), arcs.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  out_offsets_.assign(vertex_count + 1, 0);
  in_offsets_.assign(vertex_count + 1, 0);
  for (const auto& [u, v] : sorted) {
    ++out_offsets_[u + 1];
    ++in_offsets_[v + 1];
  }
  for (std::size_t i = 0; i < vertex_count; ++i) {
    out_offsets_[i + 1] += out_offsets_[i];
    in_offsets_[i + 1] += in_offsets_[i];
  }
  out_.resize(sorted.size());
  in_.resize(sorted.size());
  auto out_fill = std::vector<std::size_t>(out_offsets_.begin(), out_offsets_.end() - 1);
  auto in_fill = std::vector<std::size_t>(in_offsets_.begin(), in_offsets_.end() - 1);
  for (const auto& [u, v] : sorted) {
    out_[out_fill[u]++] = v;
    in_[in_fill[v]++] = u;
  }
}

bool Digraph::has_arc(Vertex u, Vertex v) const {
  auto nbrs = out(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<std::size_t> Components::sizes() const {
  std::vector<std::size_t> s(count, 0);
  for (auto c : label) ++s[c];
  return s;
}

Components weak_components(const Digraph& g) {
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  Components c;
  c.label.assign(g.size(), kUnset);
  std::vector<Vertex> stack;
  for (Vertex root = 0; root < g.size(); ++root) {
    if (c.label[root] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(c.count++);
    c.label[root] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      for (auto nbrs : {g.out(v), g.in(v)}) {
        for (Vertex w : nbrs) {
          if (c.label[w] == kUnset) {
            c.label[w] = id;
            stack.push_back(w);
          }
        }
      }
    }
  }
  return c;
}

Components strong_components(const Digraph& g) {
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  const std::size_t n = g.size();
  Components c;
  c.label.assign(n, kUnset);
  std::vector<std::uint32_t> index(n, kUnset), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<Vertex> tarjan_stack;
  // call stack frames: (vertex, next out-neighbor position)
  std::vector<std::pair<Vertex, std::size_t>> frames;
  std::uint32_t next_index = 0;

  for (Vertex root = 0; root < n; ++root) {
    if (index[root] != kUnset) continue;
    frames.emplace_back(root, 0);
    index[root] = low[root] = next_index++;
    tarjan_stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      auto nbrs = g.out(v);
      if (pos < nbrs.size()) {
        const Vertex w = nbrs[pos++];
        if (index[w] == kUnset) {
          index[w] = low[w] = next_index++;
          tarjan_stack.push_back(w);
          on_stack[w] = 1;
          frames.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const Vertex done = v;
      frames.pop_back();
      if (!frames.empty()) {
        const Vertex parent = frames.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        const auto id = static_cast<std::uint32_t>(c.count++);
        Vertex w;
        do {
          w = tarjan_stack.back();
          tarjan_stack.pop_back();
          on_stack[w] = 0;
          c.label[w] = id;
        } while (w != done);
      }
    }
  }
  return c;
}

double reciprocity(const Digraph& g) {
  if (g.arc_count() == 0) return 0.0;
  std::size_t reciprocated = 0;
  for (Vertex u = 0; u < g.size(); ++u) {
    for (Vertex v : g.out(u)) {
      if (u != v && g.has_arc(v, u)) ++reciprocated;
    }
  }
  return static_cast<double>(reciprocated) / static_cast<double>(g.arc_count());
}

TriadCounts undirected_triads(const Digraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<Vertex>> nbrs(n);
  for (Vertex v = 0; v < n; ++v) {
    auto& list = nbrs[v];
    for (auto side : {g.out(v), g.in(v)}) {
      for (Vertex w : side) {
        if (w != v) list.push_back(w);
      }
    }
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  TriadCounts t;
  for (Vertex v = 0; v < n; ++v) {
    const auto d = static_cast<std::uint64_t>(nbrs[v].size());
    t.connected_triples += d * (d - (d > 0 ? 1 : 0)) / 2;
  }
  // each triangle u < v < w counted once from its lowest edge (u, v)
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v : nbrs[u]) {
      if (v <= u) continue;
      const auto& a = nbrs[u];
      const auto& b = nbrs[v];
      auto ia = std::upper_bound(a.begin(), a.end(), v);
      auto ib = std::upper_bound(b.begin(), b.end(), v);
      while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
          ++ia;
        } else if (*ib < *ia) {
          ++ib;
        } else {
          ++t.triangles;
          ++ia;
          ++ib;
        }
      }
    }
  }
  return t;
}

}  // namespace eranet::graph
