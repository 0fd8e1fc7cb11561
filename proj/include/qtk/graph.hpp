#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtk/errors.hpp"

namespace qtk {

using Vertex = std::uint32_t;

inline constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// Finite undirected connected graph with the edge-path metric. Immutable
// after construction; construction validates connectivity, simple edges and
// vertex ids.
class Graph {
 public:
  Graph(Vertex vertex_count, std::vector<std::pair<Vertex, Vertex>> edge_list,
        std::map<Vertex, std::string> labels = {})
      : adjacency_(vertex_count), labels_(std::move(labels)) {
    if (vertex_count == 0) fail(ErrorCode::InvalidSpec, "graph needs at least one vertex");
    for (auto& [u, v] : edge_list) {
      if (u >= vertex_count || v >= vertex_count)
        fail(ErrorCode::InvalidVertex, "edge endpoint out of range");
      if (u == v) fail(ErrorCode::InvalidSpec, "self-loop");
      if (u > v) std::swap(u, v);
    }
    std::sort(edge_list.begin(), edge_list.end());
    if (std::adjacent_find(edge_list.begin(), edge_list.end()) != edge_list.end())
      fail(ErrorCode::InvalidSpec, "duplicate edge");
    for (const auto& [u, v] : edge_list) {
      adjacency_[u].push_back(v);
      adjacency_[v].push_back(u);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
    for (const auto& [v, label] : labels_) {
      (void)label;
      if (v >= vertex_count) fail(ErrorCode::InvalidVertex, "label vertex out of range");
    }
    edges_ = std::move(edge_list);
    if (!is_connected()) fail(ErrorCode::InvalidSpec, "graph not connected");
  }

  Vertex vertex_count() const { return static_cast<Vertex>(adjacency_.size()); }
  const std::vector<Vertex>& neighbors(Vertex v) const {
    check_vertex(v);
    return adjacency_[v];
  }
  const std::vector<std::pair<Vertex, Vertex>>& edges() const { return edges_; }
  const std::map<Vertex, std::string>& labels() const { return labels_; }

  bool has_edge(Vertex u, Vertex v) const {
    check_vertex(u);
    check_vertex(v);
    return std::binary_search(adjacency_[u].begin(), adjacency_[u].end(), v);
  }

  void check_vertex(Vertex v) const {
    if (v >= adjacency_.size()) fail(ErrorCode::InvalidVertex, "vertex " + std::to_string(v));
  }

 private:
  bool is_connected() const {
    std::vector<bool> seen(adjacency_.size(), false);
    std::queue<Vertex> queue;
    queue.push(0);
    seen[0] = true;
    std::size_t reached = 1;
    while (!queue.empty()) {
      const Vertex v = queue.front();
      queue.pop();
      for (Vertex w : adjacency_[v]) {
        if (!seen[w]) {
          seen[w] = true;
          ++reached;
          queue.push(w);
        }
      }
    }
    return reached == adjacency_.size();
  }

  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<std::pair<Vertex, Vertex>> edges_;
  std::map<Vertex, std::string> labels_;
};

struct DistanceOracle {
  Vertex source = 0;
  std::vector<std::uint32_t> distances;  // exact hop counts

  std::uint32_t operator[](Vertex v) const { return distances[v]; }
};

inline DistanceOracle bfs_distances(const Graph& g, Vertex source) {
  g.check_vertex(source);
  DistanceOracle oracle{source, std::vector<std::uint32_t>(g.vertex_count(), kUnreached)};
  oracle.distances[source] = 0;
  std::queue<Vertex> queue;
  queue.push(source);
  while (!queue.empty()) {
    const Vertex v = queue.front();
    queue.pop();
    for (Vertex w : g.neighbors(v)) {
      if (oracle.distances[w] == kUnreached) {
        oracle.distances[w] = oracle.distances[v] + 1;
        queue.push(w);
      }
    }
  }
  return oracle;
}

// Row-major matrix of all pairwise distances.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(const Graph& g) : n_(g.vertex_count()) {
    rows_.reserve(n_);
    for (Vertex v = 0; v < n_; ++v) rows_.push_back(bfs_distances(g, v).distances);
  }

  std::uint32_t operator()(Vertex u, Vertex v) const { return rows_[u][v]; }
  Vertex size() const { return n_; }
  const std::vector<std::uint32_t>& row(Vertex v) const { return rows_[v]; }

  std::uint32_t eccentricity(Vertex v) const {
    return *std::max_element(rows_[v].begin(), rows_[v].end());
  }
  std::uint32_t diameter() const {
    std::uint32_t d = 0;
    for (Vertex v = 0; v < n_; ++v) d = std::max(d, eccentricity(v));
    return d;
  }

 private:
  Vertex n_;
  std::vector<std::vector<std::uint32_t>> rows_;
};

inline std::vector<Vertex> ball(const Graph& g, Vertex a, std::uint32_t k) {
  const DistanceOracle d = bfs_distances(g, a);
  std::vector<Vertex> members;
  for (Vertex v = 0; v < g.vertex_count(); ++v)
    if (d[v] <= k) members.push_back(v);
  return members;
}

// Component labels of the induced subgraph on the complement of `removed`;
// removed vertices get label -1.
inline std::vector<std::int32_t> component_labels_avoiding(const Graph& g,
                                                           const std::vector<bool>& removed) {
  const Vertex n = g.vertex_count();
  std::vector<std::int32_t> label(n, -1);
  std::int32_t next = 0;
  std::vector<Vertex> stack;
  for (Vertex s = 0; s < n; ++s) {
    if (removed[s] || label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      for (Vertex w : g.neighbors(v)) {
        if (!removed[w] && label[w] < 0) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

// Convention: false whenever x or y is removed, so deletion queries are total.
inline bool connected_avoiding(const Graph& g, Vertex x, Vertex y,
                               std::span<const Vertex> removed) {
  g.check_vertex(x);
  g.check_vertex(y);
  std::vector<bool> gone(g.vertex_count(), false);
  for (Vertex v : removed) {
    g.check_vertex(v);
    gone[v] = true;
  }
  if (gone[x] || gone[y]) return false;
  if (x == y) return true;
  const auto label = component_labels_avoiding(g, gone);
  return label[x] == label[y];
}

// Least delta such that for every pair (x,y) and every vertex p on a geodesic
// between them, deleting B(p,delta) separates x from y. Exhaustive; vertices
// lying on geodesics are exactly those with d(x,p)+d(p,y) = d(x,y).
inline std::uint32_t bottleneck_delta(const Graph& g, Vertex vertex_cap = 64) {
  const Vertex n = g.vertex_count();
  if (n > vertex_cap)
    fail(ErrorCode::SizeCapExceeded,
         "bottleneck oracle needs n <= " + std::to_string(vertex_cap));
  const DistanceMatrix dist(g);
  std::uint32_t delta = 0;
  std::vector<std::vector<std::int32_t>> labels_by_k;
  std::vector<bool> removed(n, false);
  for (Vertex p = 0; p < n; ++p) {
    const std::uint32_t ecc = dist.eccentricity(p);
    labels_by_k.clear();
    for (std::uint32_t k = 0; k <= ecc; ++k) {
      for (Vertex v = 0; v < n; ++v) removed[v] = dist(p, v) <= k;
      labels_by_k.push_back(component_labels_avoiding(g, removed));
    }
    for (Vertex x = 0; x < n; ++x) {
      for (Vertex y = x + 1; y < n; ++y) {
        if (dist(x, p) + dist(p, y) != dist(x, y)) continue;
        std::uint32_t k = 0;
        while (true) {
          const auto& label = labels_by_k[k];
          const bool connected = label[x] >= 0 && label[x] == label[y];
          if (!connected) break;
          ++k;  // terminates by k = min(d(p,x), d(p,y)): x or y gets removed
        }
        delta = std::max(delta, k);
      }
    }
  }
  return delta;
}

// ---- Family constructors ----

inline Graph make_path(Vertex n) {
  if (n < 1) fail(ErrorCode::InvalidSpec, "path needs n >= 1");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, std::move(edges));
}

inline Graph make_cycle(Vertex n) {
  if (n < 3) fail(ErrorCode::InvalidSpec, "cycle needs n >= 3");
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  edges.emplace_back(0, n - 1);
  return Graph(n, std::move(edges));
}

inline Graph make_random_tree(Vertex n, std::uint64_t seed) {
  if (n < 1) fail(ErrorCode::InvalidSpec, "tree needs n >= 1");
  std::mt19937_64 rng(seed);
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (Vertex i = 1; i < n; ++i) {
    std::uniform_int_distribution<Vertex> pick(0, i - 1);
    edges.emplace_back(pick(rng), i);
  }
  return Graph(n, std::move(edges));
}

inline Graph with_extra_chords(const Graph& base,
                               std::vector<std::pair<Vertex, Vertex>> chords) {
  auto edges = base.edges();
  for (auto [u, v] : chords) {
    base.check_vertex(u);
    base.check_vertex(v);
    if (u == v) fail(ErrorCode::InvalidSpec, "chord self-loop");
    if (base.has_edge(u, v)) fail(ErrorCode::InvalidSpec, "chord duplicates edge");
    edges.emplace_back(u, v);
  }
  return Graph(base.vertex_count(), std::move(edges), base.labels());
}

// Random tree plus `chord_count` random chords between vertices at tree
// distance in [2, max_span]. Bounded chord span keeps the bottleneck
// property; output is deterministic per seed.
inline Graph make_random_quasi_tree(Vertex n, std::uint32_t max_span,
                                    std::uint32_t chord_count, std::uint64_t seed) {
  if (max_span < 2) fail(ErrorCode::InvalidSpec, "quasi-tree chord span must be >= 2");
  Graph tree = make_random_tree(n, seed);
  const DistanceMatrix dist(tree);
  std::vector<std::pair<Vertex, Vertex>> candidates;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (dist(u, v) >= 2 && dist(u, v) <= max_span) candidates.emplace_back(u, v);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::shuffle(candidates.begin(), candidates.end(), rng);
  const std::size_t take = std::min<std::size_t>(chord_count, candidates.size());
  candidates.resize(take);
  return with_extra_chords(tree, std::move(candidates));
}

// Finite product of graphs with the l1 metric; used as the ambient space for
// multi-factor kernels and tensor embeddings.
struct ProductSpace {
  std::vector<Graph> factors;
  std::vector<Vertex> basepoints;

  ProductSpace(std::vector<Graph> f, std::vector<Vertex> base)
      : factors(std::move(f)), basepoints(std::move(base)) {
    if (factors.empty()) fail(ErrorCode::InvalidSpec, "product needs at least one factor");
    if (factors.size() != basepoints.size())
      fail(ErrorCode::ArityMismatch, "one basepoint per factor");
    for (std::size_t i = 0; i < factors.size(); ++i) factors[i].check_vertex(basepoints[i]);
  }

  std::size_t arity() const { return factors.size(); }

  void check_tuple(std::span<const Vertex> x) const {
    if (x.size() != factors.size()) fail(ErrorCode::ArityMismatch, "tuple arity mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) factors[i].check_vertex(x[i]);
  }
};

inline std::uint32_t product_distance(const ProductSpace& p,
                                      const std::vector<DistanceMatrix>& dists,
                                      std::span<const Vertex> x, std::span<const Vertex> y) {
  p.check_tuple(x);
  p.check_tuple(y);
  std::uint32_t total = 0;
  for (std::size_t i = 0; i < p.arity(); ++i) total += dists[i](x[i], y[i]);
  return total;
}

}  // namespace qtk
