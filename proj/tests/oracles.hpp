#pragma once

// Brute-force oracles for the test suite only. These deliberately take a
// different route from the library (simple-path enumeration instead of
// component labelling) and are exponential, so keep inputs tiny.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "qtk/graph.hpp"

namespace qtk::oracle {

inline void all_simple_paths(const Graph& g, Vertex current, Vertex target,
                             std::vector<bool>& used, std::uint32_t length,
                             const std::vector<bool>& forbidden, std::uint32_t& best,
                             bool& found) {
  if (current == target) {
    found = true;
    best = std::min(best, length);
    return;
  }
  for (Vertex w : g.neighbors(current)) {
    if (used[w] || forbidden[w]) continue;
    used[w] = true;
    all_simple_paths(g, w, target, used, length + 1, forbidden, best, found);
    used[w] = false;
  }
}

// Shortest path by exhaustive simple-path enumeration.
inline std::uint32_t brute_shortest_path(const Graph& g, Vertex x, Vertex y) {
  std::vector<bool> used(g.vertex_count(), false), forbidden(g.vertex_count(), false);
  used[x] = true;
  std::uint32_t best = kUnreached;
  bool found = false;
  all_simple_paths(g, x, y, used, 0, forbidden, best, found);
  return best;
}

// Connectivity under vertex deletion by path enumeration; deleted endpoints
// count as disconnected, matching the library convention.
inline bool brute_connected_avoiding(const Graph& g, Vertex x, Vertex y,
                                     const std::vector<Vertex>& removed) {
  std::vector<bool> forbidden(g.vertex_count(), false);
  for (Vertex v : removed) forbidden[v] = true;
  if (forbidden[x] || forbidden[y]) return false;
  if (x == y) return true;
  std::vector<bool> used(g.vertex_count(), false);
  used[x] = true;
  std::uint32_t best = kUnreached;
  bool found = false;
  all_simple_paths(g, x, y, used, 0, forbidden, best, found);
  return found;
}

inline std::uint32_t brute_separation_radius(const Graph& g, Vertex a, Vertex x, Vertex y) {
  const DistanceOracle from_a = bfs_distances(g, a);
  for (std::uint32_t k = 0;; ++k) {
    std::vector<Vertex> removed;
    for (Vertex v = 0; v < g.vertex_count(); ++v)
      if (from_a[v] <= k) removed.push_back(v);
    if (!brute_connected_avoiding(g, x, y, removed)) return k;
  }
}

inline std::uint32_t brute_bottleneck_delta(const Graph& g) {
  const Vertex n = g.vertex_count();
  std::vector<DistanceOracle> dist;
  for (Vertex v = 0; v < n; ++v) dist.push_back(bfs_distances(g, v));
  std::uint32_t delta = 0;
  for (Vertex x = 0; x < n; ++x) {
    for (Vertex y = x + 1; y < n; ++y) {
      for (Vertex p = 0; p < n; ++p) {
        if (dist[x][p] + dist[p][y] != dist[x][y]) continue;
        for (std::uint32_t k = 0;; ++k) {
          std::vector<Vertex> removed;
          for (Vertex v = 0; v < n; ++v)
            if (dist[p][v] <= k) removed.push_back(v);
          if (!brute_connected_avoiding(g, x, y, removed)) {
            delta = std::max(delta, k);
            break;
          }
        }
      }
    }
  }
  return delta;
}

}  // namespace qtk::oracle
