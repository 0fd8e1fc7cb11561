#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "qtk/errors.hpp"

namespace qtk {

// Dense symmetric matrix, full row-major storage. from_rows rejects
// asymmetric input; the in-place accessors keep both triangles in sync.
class SymMatrix {
 public:
  explicit SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  static SymMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    SymMatrix m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) fail(ErrorCode::NotSymmetric, "matrix not square");
      for (std::size_t j = 0; j < rows.size(); ++j) m.a_[i * rows.size() + j] = rows[i][j];
    }
    for (std::size_t i = 0; i < m.n_; ++i)
      for (std::size_t j = i + 1; j < m.n_; ++j)
        if (m(i, j) != m(j, i)) fail(ErrorCode::NotSymmetric, "entry mismatch across diagonal");
    return m;
  }

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = v;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::fabs(v));
    return m;
  }

  double off_diagonal_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j) s += 2.0 * (*this)(i, j) * (*this)(i, j);
    return std::sqrt(s);
  }

 private:
  std::size_t n_;
  std::vector<double> a_;
};

struct JacobiResult {
  std::vector<double> eigenvalues;           // ascending
  std::vector<std::vector<double>> vectors;  // vectors[i] pairs with eigenvalues[i]
  std::size_t sweeps = 0;
};

// Cyclic Jacobi with optional eigenvector accumulation. Convergence:
// off-diagonal Frobenius norm below off_tol * max|entry| of the input; hard
// error at the sweep cap rather than a silently inaccurate spectrum.
inline JacobiResult jacobi_eigen(SymMatrix a, double off_tol = 1e-12,
                                 std::size_t sweep_cap = 100, bool with_vectors = true) {
  const std::size_t n = a.size();
  const double scale = a.max_abs();
  const double threshold = off_tol * scale;
  std::vector<std::vector<double>> v;
  if (with_vectors) {
    v.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;
  }

  std::size_t sweeps = 0;
  while (a.off_diagonal_norm() > threshold) {
    if (sweeps >= sweep_cap)
      fail(ErrorCode::NoConvergence, "jacobi sweep cap reached");
    ++sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);
        const double app = a(p, p), aqq = a(q, q);
        a.set(p, p, app - t * apq);
        a.set(q, q, aqq + t * apq);
        a.set(p, q, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p), aiq = a(i, q);
          a.set(i, p, aip - s * (aiq + tau * aip));
          a.set(i, q, aiq + s * (aip - tau * aiq));
        }
        if (with_vectors) {
          for (std::size_t i = 0; i < n; ++i) {
            const double vip = v[i][p], viq = v[i][q];
            v[i][p] = vip - s * (viq + tau * vip);
            v[i][q] = viq + s * (vip - tau * viq);
          }
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
  JacobiResult result;
  result.sweeps = sweeps;
  result.eigenvalues.reserve(n);
  result.vectors.reserve(n);
  for (std::size_t k : order) {
    result.eigenvalues.push_back(a(k, k));
    if (with_vectors) {
      std::vector<double> col(n);
      for (std::size_t i = 0; i < n; ++i) col[i] = v[i][k];
      result.vectors.push_back(std::move(col));
    }
  }
  return result;
}

struct SpectrumReport {
  double min_eigenvalue = 0.0;
  double tolerance = 0.0;  // absolute threshold actually used
  double scale = 0.0;
  bool psd = true;
  std::vector<double> witness;  // eigenvector for the min eigenvalue on failure
};

// PSD iff min eigenvalue >= -rel_tol * max|entry|. Scale-relative so the
// verdict does not depend on the kernel's magnitude.
inline SpectrumReport psd_check(const SymMatrix& m, double rel_tol = 1e-9) {
  SpectrumReport report;
  report.scale = m.max_abs();
  report.tolerance = rel_tol * report.scale;
  if (m.size() == 0) return report;
  JacobiResult eig = jacobi_eigen(m, 1e-12, 100, /*with_vectors=*/false);
  report.min_eigenvalue = eig.eigenvalues.front();
  report.psd = report.min_eigenvalue >= -report.tolerance;
  if (!report.psd) report.witness = jacobi_eigen(m).vectors.front();
  return report;
}

}  // namespace qtk
