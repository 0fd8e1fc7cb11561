#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qtk/jacobi.hpp"
#include "qtk/kernel_analysis.hpp"

namespace qtk {

// Finitely supported real function with zero sum, sparse over point ids.
// Coefficients are doubles; the mean-zero gate is |sum| <= 1e-12.
class MeanZeroVector {
 public:
  MeanZeroVector() = default;

  static MeanZeroVector from_coeffs(std::vector<std::pair<std::uint32_t, double>> coeffs) {
    std::sort(coeffs.begin(), coeffs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    MeanZeroVector v;
    for (const auto& [p, c] : coeffs) {
      if (!v.entries_.empty() && v.entries_.back().first == p) {
        v.entries_.back().second += c;
      } else {
        v.entries_.emplace_back(p, c);
      }
    }
    std::erase_if(v.entries_, [](const auto& e) { return e.second == 0.0; });
    return v;
  }

  static MeanZeroVector delta_diff(std::uint32_t p, std::uint32_t q) {
    if (p == q) return {};
    return from_coeffs({{p, 1.0}, {q, -1.0}});
  }

  const std::vector<std::pair<std::uint32_t, double>>& entries() const { return entries_; }
  bool zero() const { return entries_.empty(); }

  double coefficient_sum() const {
    double s = 0.0;
    for (const auto& [p, c] : entries_) s += c;
    return s;
  }

  // Magnitudes are summed in sorted order so that any reindexing of the
  // support (e.g. transport along a bijection) yields the bit-identical norm.
  double l1() const { return sorted_sum([](double c) { return std::fabs(c); }); }
  double sum_of_squares() const { return sorted_sum([](double c) { return c * c; }); }

  MeanZeroVector scaled(double factor) const {
    auto coeffs = entries_;
    for (auto& [p, c] : coeffs) c *= factor;
    return from_coeffs(std::move(coeffs));
  }

  MeanZeroVector plus(const MeanZeroVector& other) const {
    auto coeffs = entries_;
    coeffs.insert(coeffs.end(), other.entries_.begin(), other.entries_.end());
    return from_coeffs(std::move(coeffs));
  }

  MeanZeroVector minus(const MeanZeroVector& other) const {
    return plus(other.scaled(-1.0));
  }

  bool operator==(const MeanZeroVector& other) const { return entries_ == other.entries_; }

 private:
  template <typename F>
  double sorted_sum(F&& term) const {
    std::vector<double> values;
    values.reserve(entries_.size());
    for (const auto& [p, c] : entries_) values.push_back(term(c));
    std::sort(values.begin(), values.end());
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }

  std::vector<std::pair<std::uint32_t, double>> entries_;
};

struct CndCertificate {
  std::string mode;  // "exhaustive" or "subsample"
  std::size_t points_checked = 0;
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

// Kernel-parametrized bilinear form over a point set. Generic in psi: the
// same machinery serves the graph semimetric and the squared-difference
// kernels coming from weak-Haagerup data.
class GnsForm {
 public:
  GnsForm(std::vector<std::uint32_t> points, KernelFn psi, CndCertificate cert)
      : points_(std::move(points)), psi_(std::move(psi)), cert_(cert) {
    std::sort(points_.begin(), points_.end());
  }

  // Certifies psi CND on construction: exhaustive Jacobi up to jacobi_cap
  // points, deterministic subsample beyond that.
  static GnsForm certified(std::vector<std::uint32_t> points, KernelFn psi, double rel_tol = 1e-9,
                           std::uint64_t seed = 1, std::size_t jacobi_cap = 128) {
    std::vector<std::uint32_t> sample = points;
    CndCertificate cert;
    if (sample.size() > jacobi_cap) {
      std::mt19937_64 rng(seed);
      std::shuffle(sample.begin(), sample.end(), rng);
      sample.resize(jacobi_cap);
      std::sort(sample.begin(), sample.end());
      cert.mode = "subsample";
    } else {
      cert.mode = "exhaustive";
    }
    SymMatrix m(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i)
      for (std::size_t j = i; j < sample.size(); ++j) m.set(i, j, psi(sample[i], sample[j]));
    const CndReport report = cnd_check(m, rel_tol);
    cert.points_checked = sample.size();
    cert.min_eigenvalue = report.projected.min_eigenvalue;
    cert.tolerance = report.projected.tolerance;
    cert.pass = report.cnd;
    return GnsForm(std::move(points), std::move(psi), cert);
  }

  const std::vector<std::uint32_t>& points() const { return points_; }
  bool contains(std::uint32_t p) const {
    return std::binary_search(points_.begin(), points_.end(), p);
  }
  double psi(std::uint32_t x, std::uint32_t y) const { return psi_(x, y); }
  const CndCertificate& certificate() const { return cert_; }

 private:
  std::vector<std::uint32_t> points_;
  KernelFn psi_;
  CndCertificate cert_;
};

namespace detail {
inline void require_mean_zero(const MeanZeroVector& v) {
  if (std::fabs(v.coefficient_sum()) > 1e-12)
    fail(ErrorCode::NotMeanZero, "coefficients sum to " + std::to_string(v.coefficient_sum()));
}
inline void require_supported(const MeanZeroVector& v, const GnsForm& form) {
  for (const auto& [p, c] : v.entries()) {
    (void)c;
    if (!form.contains(p))
      fail(ErrorCode::SupportOutsidePoints, "point " + std::to_string(p) + " outside the form");
  }
}
}  // namespace detail

// <v,w> = -sum v(x) w(y) psi(x,y) + sum v(x) w(x).
inline double gns_inner(const MeanZeroVector& v, const MeanZeroVector& w, const GnsForm& form) {
  detail::require_mean_zero(v);
  detail::require_mean_zero(w);
  detail::require_supported(v, form);
  detail::require_supported(w, form);
  double kernel_part = 0.0;
  for (const auto& [x, vc] : v.entries())
    for (const auto& [y, wc] : w.entries()) kernel_part += vc * wc * form.psi(x, y);
  double diagonal_part = 0.0;
  std::size_t i = 0, j = 0;
  const auto& ve = v.entries();
  const auto& we = w.entries();
  while (i < ve.size() && j < we.size()) {
    if (ve[i].first < we[j].first) {
      ++i;
    } else if (ve[i].first > we[j].first) {
      ++j;
    } else {
      diagonal_part += ve[i].second * we[j].second;
      ++i;
      ++j;
    }
  }
  return -kernel_part + diagonal_part;
}

struct ENormValue {
  double h_norm = 0.0;
  double l1_norm = 0.0;
  double e_norm = 0.0;
};

inline ENormValue e_norm(const MeanZeroVector& v, const GnsForm& form) {
  double self = gns_inner(v, v, form);
  const double floor = -1e-9 * std::max(1.0, v.sum_of_squares());
  if (self < floor)
    fail(ErrorCode::NegativeSelfInner, "self inner " + std::to_string(self) +
                                           "; kernel is not CND on this support");
  if (self < 0.0) self = 0.0;
  ENormValue out;
  out.h_norm = std::sqrt(self);
  out.l1_norm = v.l1();
  out.e_norm = out.h_norm + out.l1_norm;
  return out;
}

struct L1WitnessReport {
  double estimate_h = 0.0;   // sqrt(pi/2) * mean |<v,g>|
  double stderr_h = 0.0;
  double target_h = 0.0;     // ||v||_psi
  double estimate_e = 0.0;   // estimate_h + ||v||_1 (the l1 block is exact)
  double target_e = 0.0;
  double coordinate_norm_gap = 0.0;  // |sum c_j^2 - <v,v>|, Gram-Schmidt consistency
  std::size_t samples = 0;
  std::size_t rank = 0;
  bool within_3se = false;
};

// Monte-Carlo witness of the L1 isometry: the coordinates of v in an
// orthonormalized basis of the mean-zero span feed Gaussian functionals g,
// and sqrt(pi/2) * E|<v,g>| recovers the GNS norm. Dense in the point count,
// so capped.
inline L1WitnessReport l1_witness(const MeanZeroVector& v, const GnsForm& form, std::size_t samples,
                                  std::uint64_t seed, std::size_t point_cap = 256) {
  detail::require_mean_zero(v);
  detail::require_supported(v, form);
  const std::size_t m = form.points().size();
  if (m > point_cap)
    fail(ErrorCode::SizeCapExceeded, "witness needs at most " + std::to_string(point_cap) + " points");
  if (m < 2) fail(ErrorCode::DegenerateForm, "mean-zero space has rank 0");

  // Gram of the form on delta coefficients; valid on mean-zero vectors only.
  std::vector<double> b(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      b[i * m + j] = -form.psi(form.points()[i], form.points()[j]) + (i == j ? 1.0 : 0.0);
  const auto form_inner = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j) row += b[i * m + j] * y[j];
      s += x[i] * row;
    }
    return s;
  };

  // Modified Gram-Schmidt over the centered deltas delta_p - mean.
  std::vector<std::vector<double>> basis;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> w(m, -1.0 / static_cast<double>(m));
    w[i] += 1.0;
    for (const auto& u : basis) {
      const double proj = form_inner(w, u);
      for (std::size_t j = 0; j < m; ++j) w[j] -= proj * u[j];
    }
    const double norm2 = form_inner(w, w);
    if (norm2 > 1e-10) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& c : w) c *= inv;
      basis.push_back(std::move(w));
    }
  }
  if (basis.empty()) fail(ErrorCode::DegenerateForm, "form has rank 0");

  std::vector<double> dense(m, 0.0);
  for (const auto& [p, c] : v.entries()) {
    const auto it = std::lower_bound(form.points().begin(), form.points().end(), p);
    dense[static_cast<std::size_t>(it - form.points().begin())] = c;
  }
  std::vector<double> coords;
  coords.reserve(basis.size());
  for (const auto& u : basis) coords.push_back(form_inner(dense, u));

  double coord_norm2 = 0.0;
  for (double c : coords) coord_norm2 += c * c;

  const double half_pi_factor = std::sqrt(std::acos(-1.0) / 2.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double acc = 0.0, acc2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    double z = 0.0;
    for (double c : coords) z += c * gauss(rng);
    const double a = std::fabs(z);
    acc += a;
    acc2 += a * a;
  }
  const double mean = acc / static_cast<double>(samples);
  const double var = std::max(0.0, acc2 / static_cast<double>(samples) - mean * mean);

  const ENormValue norms = e_norm(v, form);
  L1WitnessReport report;
  report.samples = samples;
  report.rank = basis.size();
  report.estimate_h = half_pi_factor * mean;
  report.stderr_h = half_pi_factor * std::sqrt(var / static_cast<double>(samples));
  report.target_h = norms.h_norm;
  report.estimate_e = report.estimate_h + norms.l1_norm;
  report.target_e = norms.e_norm;
  report.coordinate_norm_gap = std::fabs(coord_norm2 - gns_inner(v, v, form));
  report.within_3se = std::fabs(report.estimate_h - report.target_h) <= 3.0 * report.stderr_h;
  return report;
}

// Random support of size 2..max_support with centered coefficients.
inline MeanZeroVector random_mean_zero(std::span<const std::uint32_t> points, std::mt19937_64& rng,
                                       std::size_t max_support = 6) {
  if (points.size() < 2) fail(ErrorCode::DegenerateForm, "need at least two points");
  const std::size_t cap = std::min(max_support, points.size());
  std::uniform_int_distribution<std::size_t> size_dist(2, cap);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  while (true) {
    const std::size_t k = size_dist(rng);
    std::vector<std::uint32_t> support(points.begin(), points.end());
    std::shuffle(support.begin(), support.end(), rng);
    support.resize(k);
    std::vector<std::pair<std::uint32_t, double>> coeffs;
    double mean = 0.0;
    for (std::uint32_t p : support) {
      const double c = coeff(rng);
      coeffs.emplace_back(p, c);
      mean += c;
    }
    mean /= static_cast<double>(k);
    for (auto& [p, c] : coeffs) c -= mean;
    MeanZeroVector v = MeanZeroVector::from_coeffs(std::move(coeffs));
    if (v.l1() > 1e-6) return v;
  }
}

}  // namespace qtk
