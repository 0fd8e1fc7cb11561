#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qtk/graph.hpp"

namespace qtk {

// Per-basepoint separation radii R(x,y) = least k such that deleting the
// radius-k ball around the basepoint leaves x and y in different components
// (a deleted endpoint counts as disconnected), and the induced semimetric
// d_a(x,y) = d(a,x) + d(a,y) - 2 R(x,y). Values are exact integers.
class SeparationTable {
 public:
  SeparationTable(const Graph& g, Vertex basepoint)
      : basepoint_(basepoint), n_(g.vertex_count()), dist_a_(bfs_distances(g, basepoint).distances) {
    r_.assign(static_cast<std::size_t>(n_) * n_, kUnreached);
    std::vector<bool> removed(n_, false);
    const std::uint32_t ecc = *std::max_element(dist_a_.begin(), dist_a_.end());
    std::size_t unset = (static_cast<std::size_t>(n_) * (n_ + 1)) / 2;
    for (std::uint32_t k = 0; k <= ecc && unset > 0; ++k) {
      for (Vertex v = 0; v < n_; ++v) removed[v] = dist_a_[v] <= k;
      const auto label = component_labels_avoiding(g, removed);
      for (Vertex x = 0; x < n_; ++x) {
        for (Vertex y = x; y < n_; ++y) {
          if (at(x, y) != kUnreached) continue;
          const bool connected = label[x] >= 0 && label[x] == label[y];
          if (!connected) {
            at(x, y) = k;
            at(y, x) = k;
            --unset;
          }
        }
      }
    }
  }

  Vertex basepoint() const { return basepoint_; }
  Vertex size() const { return n_; }
  std::uint32_t dist_from_basepoint(Vertex x) const { return dist_a_[x]; }

  std::uint32_t separation_radius(Vertex x, Vertex y) const {
    check(x);
    check(y);
    return r_[static_cast<std::size_t>(x) * n_ + y];
  }

  std::uint32_t semimetric(Vertex x, Vertex y) const {
    return dist_a_[x] + dist_a_[y] - 2 * separation_radius(x, y);
  }

 private:
  std::uint32_t& at(Vertex x, Vertex y) { return r_[static_cast<std::size_t>(x) * n_ + y]; }
  void check(Vertex v) const {
    if (v >= n_) fail(ErrorCode::InvalidVertex, "vertex " + std::to_string(v));
  }

  Vertex basepoint_;
  Vertex n_;
  std::vector<std::uint32_t> dist_a_;
  std::vector<std::uint32_t> r_;
};

// Single-pair scan, one deletion ball at a time. Same semantics as the table
// builder; kept as the direct realization of the definition and for one-off
// queries.
inline std::uint32_t separation_radius(const Graph& g, Vertex a, Vertex x, Vertex y) {
  g.check_vertex(a);
  g.check_vertex(x);
  g.check_vertex(y);
  const DistanceOracle from_a = bfs_distances(g, a);
  std::vector<bool> removed(g.vertex_count(), false);
  for (std::uint32_t k = 0;; ++k) {
    for (Vertex v = 0; v < g.vertex_count(); ++v) removed[v] = from_a[v] <= k;
    if (removed[x] || removed[y]) return k;
    const auto label = component_labels_avoiding(g, removed);
    if (label[x] != label[y]) return k;
    // terminates by k = min(d(a,x), d(a,y))
  }
}

inline std::uint32_t semimetric_da(const SeparationTable& table, Vertex x, Vertex y) {
  return table.semimetric(x, y);
}

// The family of separation balls V(x,k) = {y | R(x,y) >= k}, k = 0..d(a,x),
// interned so that set equality is id equality.
class BallFamily {
 public:
  explicit BallFamily(const SeparationTable& table) : basepoint_(table.basepoint()) {
    const Vertex n = table.size();
    ids_.resize(n);
    std::map<std::vector<Vertex>, std::uint32_t> intern;
    for (Vertex x = 0; x < n; ++x) {
      const std::uint32_t dax = table.dist_from_basepoint(x);
      ids_[x].reserve(dax + 1);
      for (std::uint32_t k = 0; k <= dax; ++k) {
        std::vector<Vertex> members;
        for (Vertex y = 0; y < n; ++y)
          if (table.separation_radius(x, y) >= k) members.push_back(y);
        auto [it, inserted] = intern.emplace(std::move(members), static_cast<std::uint32_t>(members_.size()));
        if (inserted) members_.push_back(it->first);
        ids_[x].push_back(it->second);
      }
    }
  }

  Vertex basepoint() const { return basepoint_; }

  // Valid for k <= d(a,x).
  std::uint32_t id(Vertex x, std::uint32_t k) const {
    if (x >= ids_.size() || k >= ids_[x].size())
      fail(ErrorCode::InvalidVertex, "ball index out of range");
    return ids_[x][k];
  }

  std::uint32_t radius_count(Vertex x) const { return static_cast<std::uint32_t>(ids_[x].size()); }
  std::span<const Vertex> members(std::uint32_t id) const { return members_[id]; }
  std::uint32_t distinct_count() const { return static_cast<std::uint32_t>(members_.size()); }

 private:
  Vertex basepoint_;
  std::vector<std::vector<std::uint32_t>> ids_;  // ids_[x][k]
  std::vector<std::vector<Vertex>> members_;
};

struct Verdict {
  bool pass = true;
  std::string detail;  // first violating tuple, empty when pass
};

// R(x,y) >= min(R(x,z), R(z,y)) over all triples.
inline Verdict ultrametric_check(const SeparationTable& table) {
  const Vertex n = table.size();
  for (Vertex x = 0; x < n; ++x)
    for (Vertex y = 0; y < n; ++y)
      for (Vertex z = 0; z < n; ++z) {
        const std::uint32_t lhs = table.separation_radius(x, y);
        const std::uint32_t rhs =
            std::min(table.separation_radius(x, z), table.separation_radius(z, y));
        if (lhs < rhs) {
          std::ostringstream msg;
          msg << "triple (" << x << "," << y << "," << z << "): R=" << lhs << " < min=" << rhs;
          return {false, msg.str()};
        }
      }
  return {};
}

// {R(x,y) | y} must be exactly {0,...,d(a,x)} for every x.
inline Verdict range_check(const SeparationTable& table) {
  const Vertex n = table.size();
  for (Vertex x = 0; x < n; ++x) {
    const std::uint32_t dax = table.dist_from_basepoint(x);
    std::vector<bool> seen(dax + 1, false);
    for (Vertex y = 0; y < n; ++y) {
      const std::uint32_t r = table.separation_radius(x, y);
      if (r > dax) {
        std::ostringstream msg;
        msg << "R(" << x << "," << y << ")=" << r << " exceeds d(a,x)=" << dax;
        return {false, msg.str()};
      }
      seen[r] = true;
    }
    for (std::uint32_t k = 0; k <= dax; ++k) {
      if (!seen[k]) {
        std::ostringstream msg;
        msg << "value " << k << " missing from {R(" << x << ",y)} with d(a,x)=" << dax;
        return {false, msg.str()};
      }
    }
  }
  return {};
}

// V(x,k) = V(y,j) iff (k = j and R(x,y) >= k), over all admissible
// quadruples. Checked through the interned ids: within one id class all k
// agree and all pairs satisfy R >= k; conversely k = j with R >= k forces the
// same id. Together these cover every quadruple.
inline Verdict ball_equality_check(const SeparationTable& table, const BallFamily& balls) {
  const Vertex n = table.size();
  std::vector<std::vector<std::pair<Vertex, std::uint32_t>>> by_id(balls.distinct_count());
  for (Vertex x = 0; x < n; ++x)
    for (std::uint32_t k = 0; k < balls.radius_count(x); ++k)
      by_id[balls.id(x, k)].emplace_back(x, k);

  for (const auto& group : by_id) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        const auto [x, k] = group[i];
        const auto [y, l] = group[j];
        if (k != l || table.separation_radius(x, y) < k) {
          std::ostringstream msg;
          msg << "same ball id but (" << x << "," << k << ") vs (" << y << "," << l
              << "), R=" << table.separation_radius(x, y);
          return {false, msg.str()};
        }
      }
    }
  }
  for (Vertex x = 0; x < n; ++x) {
    for (Vertex y = 0; y < n; ++y) {
      const std::uint32_t upper =
          std::min(table.separation_radius(x, y),
                   std::min(table.dist_from_basepoint(x), table.dist_from_basepoint(y)));
      for (std::uint32_t k = 0; k <= upper; ++k) {
        if (balls.id(x, k) != balls.id(y, k)) {
          std::ostringstream msg;
          msg << "(" << x << "," << k << ") and (" << y << "," << k << ") with R="
              << table.separation_radius(x, y) << " should share a ball";
          return {false, msg.str()};
        }
      }
    }
  }
  return {};
}

// Direct quadruple loop; quadratically slower than ball_equality_check but
// with no interning shortcut. Test-oracle use on small graphs.
inline Verdict ball_equality_check_exhaustive(const SeparationTable& table,
                                              const BallFamily& balls) {
  const Vertex n = table.size();
  for (Vertex x = 0; x < n; ++x)
    for (std::uint32_t k = 0; k < balls.radius_count(x); ++k)
      for (Vertex y = 0; y < n; ++y)
        for (std::uint32_t j = 0; j < balls.radius_count(y); ++j) {
          const bool same_set = balls.id(x, k) == balls.id(y, j);
          const bool criterion = (k == j) && table.separation_radius(x, y) >= k;
          if (same_set != criterion) {
            std::ostringstream msg;
            msg << "quadruple (" << x << "," << k << "," << y << "," << j << ")";
            return {false, msg.str()};
          }
        }
  return {};
}

struct SandwichViolation {
  Vertex a = 0, x = 0, y = 0;
  std::uint32_t d = 0;
  std::uint32_t d_a = 0;
};

// d(x,y) - (6*delta + 2) <= d_a(x,y) <= d(x,y) over all basepoints and
// pairs. delta_x is the largest observed gap d - d_a, the least constant
// that works for this graph.
struct SandwichReport {
  std::uint32_t delta = 0;
  std::uint32_t delta_prime = 0;  // 6*delta + 2
  std::uint32_t delta_x = 0;      // max gap observed
  std::uint32_t max_gap = 0;      // == delta_x
  std::vector<SandwichViolation> violations;
  bool pass() const { return violations.empty(); }
};

inline SandwichReport sandwich_check(const Graph& g, Vertex vertex_cap = 64) {
  SandwichReport report;
  report.delta = bottleneck_delta(g, vertex_cap);
  report.delta_prime = 6 * report.delta + 2;
  const DistanceMatrix dist(g);
  const Vertex n = g.vertex_count();
  for (Vertex a = 0; a < n; ++a) {
    const SeparationTable table(g, a);
    for (Vertex x = 0; x < n; ++x) {
      for (Vertex y = x; y < n; ++y) {
        const std::uint32_t d = dist(x, y);
        const std::uint32_t da = table.semimetric(x, y);
        if (da > d || d - da > report.delta_prime) {
          if (report.violations.size() < 16) report.violations.push_back({a, x, y, d, da});
          continue;
        }
        report.max_gap = std::max(report.max_gap, d - da);
      }
    }
  }
  report.delta_x = report.max_gap;
  return report;
}

// Factor-wise tables over a product space; the product semimetric is the sum
// of the factor semimetrics.
struct ProductSeparation {
  std::vector<SeparationTable> factors;

  explicit ProductSeparation(const ProductSpace& space) {
    factors.reserve(space.arity());
    for (std::size_t i = 0; i < space.arity(); ++i)
      factors.emplace_back(space.factors[i], space.basepoints[i]);
  }
};

inline std::uint32_t product_da(const ProductSeparation& p, std::span<const Vertex> x,
                                std::span<const Vertex> y) {
  if (x.size() != p.factors.size() || y.size() != p.factors.size())
    fail(ErrorCode::ArityMismatch, "tuple arity does not match factor count");
  std::uint32_t total = 0;
  for (std::size_t i = 0; i < p.factors.size(); ++i) total += p.factors[i].semimetric(x[i], y[i]);
  return total;
}

}  // namespace qtk
