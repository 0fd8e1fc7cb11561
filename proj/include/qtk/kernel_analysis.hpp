#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qtk/jacobi.hpp"
#include "qtk/rational.hpp"
#include "qtk/separation.hpp"

namespace qtk {

using KernelFn = std::function<double(Vertex, Vertex)>;

struct GramMatrix {
  std::vector<Vertex> points;
  SymMatrix entries;
};

inline GramMatrix gram_from_kernel(std::vector<Vertex> points, const KernelFn& kernel) {
  SymMatrix m(points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i; j < points.size(); ++j)
      m.set(i, j, kernel(points[i], points[j]));
  return {std::move(points), std::move(m)};
}

// Entries r^{d_a(x,y)} over the listed vertices.
inline GramMatrix gram_power_kernel(const SeparationTable& table, double r,
                                    std::optional<std::vector<Vertex>> points = {}) {
  std::vector<Vertex> pts;
  if (points) {
    pts = std::move(*points);
  } else {
    pts.resize(table.size());
    for (Vertex v = 0; v < table.size(); ++v) pts[v] = v;
  }
  return gram_from_kernel(std::move(pts), [&table, r](Vertex x, Vertex y) {
    return std::pow(r, static_cast<double>(table.semimetric(x, y)));
  });
}

struct CndReport {
  bool cnd = true;
  SpectrumReport projected;  // spectrum of -P psi P on the mean-zero space
};

// Conditional negative definiteness via the projected form: with
// P = I - (1/n) ones, psi is CND iff -P psi P is PSD. Requires a symmetric
// kernel with zero diagonal.
inline CndReport cnd_check(const SymMatrix& psi, double rel_tol = 1e-9) {
  const std::size_t n = psi.size();
  for (std::size_t i = 0; i < n; ++i)
    if (psi(i, i) != 0.0) fail(ErrorCode::NonZeroDiagonal, "kernel diagonal must vanish");
  std::vector<double> row_mean(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += psi(i, j);
    total += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  total /= static_cast<double>(n) * static_cast<double>(n);
  SymMatrix projected(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      projected.set(i, j, -(psi(i, j) - row_mean[i] - row_mean[j] + total));
  CndReport report;
  report.projected = psd_check(projected, rel_tol);
  report.cnd = report.projected.psd;
  return report;
}

struct SchoenbergPoint {
  double t = 0.0;
  SpectrumReport spectrum;
};

// e^{-t psi} entrywise must be PSD for each sampled t when psi is CND.
inline std::vector<SchoenbergPoint> schoenberg_scan(const SymMatrix& psi,
                                                    std::span<const double> t_grid,
                                                    double rel_tol = 1e-9) {
  const std::size_t n = psi.size();
  for (std::size_t i = 0; i < n; ++i)
    if (psi(i, i) != 0.0) fail(ErrorCode::NonZeroDiagonal, "kernel diagonal must vanish");
  std::vector<SchoenbergPoint> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) m.set(i, j, std::exp(-t * psi(i, j)));
    out.push_back({t, psd_check(m, rel_tol)});
  }
  return out;
}

// One point of the explicit Hilbert embedding for a basepoint and rate r in
// (0,1): a finite part indexed by interned separation balls (entry k carries
// weight r^k, the common factor sqrt(1-r^2) stays implicit) plus a geometric
// tail shifted by d(a,x). Ball ids are only comparable between vectors built
// from the same BallFamily.
struct EmbeddingVector {
  Vertex basepoint = 0;
  Rational rate;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> finite_part;  // (ball id, k), sorted by id
  std::uint32_t tail_offset = 0;                                     // d(a,x)
};

inline EmbeddingVector explicit_embedding(const SeparationTable& table, const BallFamily& balls,
                                          const Rational& r, Vertex x) {
  if (!(r > 0 && r < 1)) fail(ErrorCode::RateOutOfRange, "rate must lie in (0,1)");
  if (balls.basepoint() != table.basepoint())
    fail(ErrorCode::BasepointMismatch, "ball family built for a different basepoint");
  EmbeddingVector v;
  v.basepoint = table.basepoint();
  v.rate = r;
  const std::uint32_t dax = table.dist_from_basepoint(x);
  v.tail_offset = dax;
  v.finite_part.reserve(dax);
  for (std::uint32_t k = 0; k < dax; ++k) v.finite_part.emplace_back(balls.id(x, dax - k), k);
  std::sort(v.finite_part.begin(), v.finite_part.end());
  return v;
}

// <u,v> = (1-r^2) * sum over matching ball ids of r^{k_u+k_v}
//         + r^{tail_u + tail_v}   (tails summed in closed form).
// Exact rational arithmetic; equals r^{d_a(x,y)} by construction of the
// separation balls, which the callers assert.
inline Rational embedding_inner(const EmbeddingVector& u, const EmbeddingVector& v,
                                PowerCache* cache = nullptr) {
  if (u.basepoint != v.basepoint)
    fail(ErrorCode::BasepointMismatch, "embedding vectors from different basepoints");
  if (u.rate != v.rate) fail(ErrorCode::RateMismatch, "embedding vectors with different rates");
  if (cache && cache->base() != u.rate)
    fail(ErrorCode::RateMismatch, "power cache built for a different rate");
  PowerCache local(u.rate);
  PowerCache& pow = cache ? *cache : local;
  Rational matched(0);
  std::size_t i = 0, j = 0;
  while (i < u.finite_part.size() && j < v.finite_part.size()) {
    if (u.finite_part[i].first < v.finite_part[j].first) {
      ++i;
    } else if (u.finite_part[i].first > v.finite_part[j].first) {
      ++j;
    } else {
      matched += pow.pow(u.finite_part[i].second + v.finite_part[j].second);
      ++i;
      ++j;
    }
  }
  const Rational one_minus_r2 = Rational(1) - u.rate * u.rate;
  return one_minus_r2 * matched + pow.pow(u.tail_offset + v.tail_offset);
}

inline Rational tensor_inner(std::span<const Rational> factor_inners) {
  if (factor_inners.empty()) fail(ErrorCode::EmptyFactorList, "tensor of zero factors");
  Rational product(1);
  for (const Rational& f : factor_inners) product *= f;
  return product;
}

struct GramIdentityReport {
  bool exact = true;
  std::size_t pairs_checked = 0;
  std::string first_mismatch;
};

// Exact check of <xi(x), xi(y)> == r^{d_a(x,y)} over all pairs.
inline GramIdentityReport gram_identity_check(const SeparationTable& table,
                                              const BallFamily& balls, const Rational& r) {
  GramIdentityReport report;
  PowerCache cache(r);
  const Vertex n = table.size();
  std::vector<EmbeddingVector> xi;
  xi.reserve(n);
  for (Vertex x = 0; x < n; ++x) xi.push_back(explicit_embedding(table, balls, r, x));
  for (Vertex x = 0; x < n; ++x) {
    for (Vertex y = x; y < n; ++y) {
      const Rational lhs = embedding_inner(xi[x], xi[y], &cache);
      const Rational rhs = cache.pow(table.semimetric(x, y));
      ++report.pairs_checked;
      if (lhs != rhs) {
        report.exact = false;
        std::ostringstream msg;
        msg << "pair (" << x << "," << y << "): inner " << rational_to_string(lhs)
            << " != " << rational_to_string(rhs);
        report.first_mismatch = msg.str();
        return report;
      }
    }
  }
  return report;
}

}  // namespace qtk
