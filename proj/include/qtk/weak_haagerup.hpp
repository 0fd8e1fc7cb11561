#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qtk/action.hpp"
#include "qtk/gns.hpp"

namespace qtk {

// Sampled decomposition data (phi, R, S) on a window of integers under
// addition: phi(x - y) = ||R(x) - R(y)||^2 + ||S(x) + S(y)||^2 on every pair
// whose difference stays in the window, and 4||S(x)||^2 = phi(0).
struct WeakHaagerupData {
  std::vector<std::int64_t> elements;  // sorted, contains 0
  std::map<std::int64_t, double> phi;
  std::map<std::int64_t, std::vector<double>> r_vectors;
  std::map<std::int64_t, std::vector<double>> s_vectors;
};

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) fail(ErrorCode::ArityMismatch, "vector dimensions differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

inline double squared_sum_norm(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) fail(ErrorCode::ArityMismatch, "vector dimensions differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] + b[i]) * (a[i] + b[i]);
  return s;
}

// The integers with phi(n) = |n|, R(n) the cumulative basis sums and S = 0.
// ||R(m) - R(n)||^2 = |m - n| exactly.
inline WeakHaagerupData make_z_instance(std::int64_t radius) {
  if (radius < 1) fail(ErrorCode::InvalidSpec, "window radius must be >= 1");
  WeakHaagerupData data;
  const std::size_t dim = static_cast<std::size_t>(2 * radius);
  for (std::int64_t n = -radius; n <= radius; ++n) {
    data.elements.push_back(n);
    data.phi[n] = static_cast<double>(n < 0 ? -n : n);
    std::vector<double> r(dim, 0.0);
    // coordinates indexed by k = -radius .. radius-1; R(n) sums e_k for k in [0,n) or [n,0)
    for (std::int64_t k = -radius; k < radius; ++k) {
      const bool on = (n > 0 && k >= 0 && k < n) || (n < 0 && k >= n && k < 0);
      if (on) r[static_cast<std::size_t>(k + radius)] = (n > 0 ? 1.0 : -1.0);
    }
    data.r_vectors[n] = std::move(r);
    data.s_vectors[n] = std::vector<double>(dim, 0.0);
  }
  return data;
}

struct WeakHaagerupLoad {
  GnsForm form;                 // psi_R(x,y) = ||R(x)-R(y)||^2 over window ids
  double bound_constant = 1.0;  // 1 + sqrt(phi(e))
  double phi_at_identity = 0.0;
  Verdict properness_bound;     // ||R(s)-R(e)||^2 >= phi(s) - phi(e)
  bool properness_bound_tight = true;  // equality everywhere (holds when S = 0)
  std::size_t pairs_validated = 0;
};

// Validates the decomposition identity and the constant-S invariant, then
// wraps psi_R as a certified GNS form over the window. Point ids match
// TranslationWindowAction over the same window.
inline WeakHaagerupLoad load_weak_haagerup(const WeakHaagerupData& data, double tol = 1e-9,
                                           std::uint64_t seed = 1) {
  if (data.elements.empty()) fail(ErrorCode::InvalidSpec, "no elements");
  for (std::size_t i = 1; i < data.elements.size(); ++i)
    if (data.elements[i] <= data.elements[i - 1])
      fail(ErrorCode::InvalidSpec, "elements must be strictly increasing");
  if (!data.phi.count(0)) fail(ErrorCode::InvalidSpec, "identity element 0 must be sampled");
  for (std::int64_t n : data.elements)
    if (!data.phi.count(n) || !data.r_vectors.count(n) || !data.s_vectors.count(n))
      fail(ErrorCode::InvalidSpec, "phi/R/S missing for element " + std::to_string(n));

  const double phi_e = data.phi.at(0);
  for (std::int64_t n : data.elements) {
    const auto& s = data.s_vectors.at(n);
    double norm2 = 0.0;
    for (double c : s) norm2 += c * c;
    if (std::fabs(4.0 * norm2 - phi_e) > tol)
      fail(ErrorCode::NonConstantS,
           "4||S(" + std::to_string(n) + ")||^2 = " + std::to_string(4.0 * norm2) +
               " but phi(e) = " + std::to_string(phi_e));
  }

  WeakHaagerupLoad load{
      GnsForm({}, KernelFn{}, {}), 1.0 + std::sqrt(std::max(0.0, phi_e)), phi_e, {}, true, 0};
  for (std::int64_t x : data.elements) {
    for (std::int64_t y : data.elements) {
      const std::int64_t diff = x - y;
      if (!data.phi.count(diff)) continue;
      const double lhs = data.phi.at(diff);
      const double rhs = squared_distance(data.r_vectors.at(x), data.r_vectors.at(y)) +
                         squared_sum_norm(data.s_vectors.at(x), data.s_vectors.at(y));
      if (std::fabs(lhs - rhs) > tol)
        fail(ErrorCode::DecompositionMismatch,
             "phi(" + std::to_string(diff) + ") = " + std::to_string(lhs) +
                 " but decomposition gives " + std::to_string(rhs));
      ++load.pairs_validated;
    }
  }

  // properness lower bound per element
  const auto& r_e = data.r_vectors.at(0);
  for (std::int64_t n : data.elements) {
    const double lhs = squared_distance(data.r_vectors.at(n), r_e);
    const double rhs = data.phi.at(n) - phi_e;
    if (lhs < rhs - tol) {
      load.properness_bound = {false, "element " + std::to_string(n)};
    }
    if (std::fabs(lhs - rhs) > tol) load.properness_bound_tight = false;
  }

  // window ids 0..m-1 aligned with TranslationWindowAction(lo, hi)
  const std::int64_t lo = data.elements.front();
  std::vector<std::uint32_t> points;
  std::vector<std::vector<double>> r_by_id;
  points.reserve(data.elements.size());
  for (std::size_t i = 0; i < data.elements.size(); ++i) {
    if (data.elements[i] != lo + static_cast<std::int64_t>(i))
      fail(ErrorCode::InvalidSpec, "elements must form a contiguous window");
    points.push_back(static_cast<std::uint32_t>(i));
    r_by_id.push_back(data.r_vectors.at(data.elements[i]));
  }
  auto psi = [r_by_id](std::uint32_t x, std::uint32_t y) {
    return squared_distance(r_by_id[x], r_by_id[y]);
  };
  load.form = GnsForm::certified(std::move(points), std::move(psi), tol, seed);
  return load;
}

inline TranslationWindowAction make_window_action(const WeakHaagerupData& data) {
  return TranslationWindowAction(data.elements.front(), data.elements.back());
}

}  // namespace qtk
