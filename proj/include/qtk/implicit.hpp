#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "qtk/separation.hpp"

namespace qtk {

// Reduced words over a free group of given rank. Letters are packed into
// strings: generator i is 'a'+i, its inverse is 'A'+i.
namespace free_words {

inline char letter(std::size_t generator_index, std::size_t rank) {
  return generator_index < rank ? static_cast<char>('a' + generator_index)
                                : static_cast<char>('A' + (generator_index - rank));
}

inline char invert_letter(char c) {
  return (c >= 'a') ? static_cast<char>(c - 'a' + 'A') : static_cast<char>(c - 'A' + 'a');
}

inline std::string reduce(const std::string& w) {
  std::string out;
  out.reserve(w.size());
  for (char c : w) {
    if (!out.empty() && out.back() == invert_letter(c)) {
      out.pop_back();
    } else {
      out.push_back(c);
    }
  }
  return out;
}

inline std::string inverse(const std::string& w) {
  std::string out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(invert_letter(*it));
  return out;
}

inline std::uint32_t word_distance(const std::string& u, const std::string& v) {
  return static_cast<std::uint32_t>(reduce(inverse(u) + v).size());
}

}  // namespace free_words

// Bounded exploration of a graph given only by a neighbor oracle. The
// explored region is the ball of the declared radius around the root;
// anything outside is unknown and queries about it fail loudly.
class ImplicitGraph {
 public:
  using NeighborFn = std::function<std::vector<std::string>(const std::string&)>;

  ImplicitGraph(const NeighborFn& neighbors, const std::string& root, std::uint32_t radius)
      : radius_(radius) {
    intern(root);
    depth_.push_back(0);
    std::queue<Vertex> queue;
    queue.push(0);
    std::set<std::pair<Vertex, Vertex>> edges;
    while (!queue.empty()) {
      const Vertex v = queue.front();
      queue.pop();
      for (const std::string& w_label : neighbors(labels_[v])) {
        auto it = ids_.find(w_label);
        Vertex w;
        if (it != ids_.end()) {
          w = it->second;
        } else if (depth_[v] < radius_) {
          w = intern(w_label);
          depth_.push_back(depth_[v] + 1);
          queue.push(w);
        } else {
          continue;  // outside the explored region
        }
        if (v != w) edges.emplace(std::min(v, w), std::max(v, w));
      }
    }
    graph_.emplace(static_cast<Vertex>(labels_.size()),
                   std::vector<std::pair<Vertex, Vertex>>(edges.begin(), edges.end()));
  }

  const Graph& explored() const { return *graph_; }
  std::uint32_t radius() const { return radius_; }
  Vertex root() const { return 0; }

  Vertex id_of(const std::string& label) const {
    auto it = ids_.find(label);
    if (it == ids_.end())
      fail(ErrorCode::ExplorationExceeded, "point '" + label + "' outside explored region");
    return it->second;
  }
  const std::string& label_of(Vertex v) const {
    graph_->check_vertex(v);
    return labels_[v];
  }

 private:
  Vertex intern(const std::string& label) {
    const Vertex id = static_cast<Vertex>(labels_.size());
    labels_.push_back(label);
    ids_.emplace(label, id);
    return id;
  }

  std::uint32_t radius_;
  std::vector<std::string> labels_;
  std::vector<std::uint32_t> depth_;
  std::unordered_map<std::string, Vertex> ids_;
  std::optional<Graph> graph_;
};

inline ImplicitGraph::NeighborFn free_group_neighbors(std::size_t rank) {
  return [rank](const std::string& w) {
    std::vector<std::string> out;
    out.reserve(2 * rank);
    for (std::size_t g = 0; g < 2 * rank; ++g)
      out.push_back(free_words::reduce(std::string(1, free_words::letter(g, rank)) + w));
    return out;
  };
}

struct CertifiedRadius {
  std::uint32_t value = 0;
  std::uint32_t certified_radius = 0;
};

// Separation radius on an implicit graph, restricted to the ball of
// search_radius = d(a,x) + d(a,y) + 6*delta_hat + 2 around the basepoint.
// The result is exact for any graph whose avoiding paths stay within that
// ball (trees in particular need only d(a,x) + d(a,y)); the certified radius
// records how far the search looked.
inline CertifiedRadius separation_radius_certified(const ImplicitGraph& ig, Vertex a, Vertex x,
                                                   Vertex y, std::uint32_t delta_hat) {
  const Graph& g = ig.explored();
  const DistanceOracle from_a = bfs_distances(g, a);
  if (from_a[x] == kUnreached || from_a[y] == kUnreached)
    fail(ErrorCode::ExplorationExceeded, "query endpoints not in explored region");
  const std::uint32_t search_radius = from_a[x] + from_a[y] + 6 * delta_hat + 2;
  if (search_radius > ig.radius())
    fail(ErrorCode::ExplorationExceeded,
         "search radius " + std::to_string(search_radius) + " exceeds explored " +
             std::to_string(ig.radius()));

  std::vector<Vertex> keep;
  std::vector<Vertex> new_id(g.vertex_count(), kUnreached);
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    if (from_a[v] <= search_radius) {
      new_id[v] = static_cast<Vertex>(keep.size());
      keep.push_back(v);
    }
  }
  std::vector<std::pair<Vertex, Vertex>> edges;
  for (const auto& [u, v] : g.edges())
    if (new_id[u] != kUnreached && new_id[v] != kUnreached)
      edges.emplace_back(new_id[u], new_id[v]);
  const Graph restricted(static_cast<Vertex>(keep.size()), std::move(edges));
  return {separation_radius(restricted, new_id[a], new_id[x], new_id[y]), search_radius};
}

}  // namespace qtk
