#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "qtk/gns.hpp"
#include "qtk/separation.hpp"

using namespace qtk;

namespace {

GnsForm form_for(const Graph& g, Vertex a) {
  auto table = std::make_shared<SeparationTable>(g, a);
  std::vector<std::uint32_t> points(g.vertex_count());
  for (Vertex v = 0; v < g.vertex_count(); ++v) points[v] = v;
  return GnsForm::certified(
      std::move(points),
      [table](Vertex x, Vertex y) { return static_cast<double>(table->semimetric(x, y)); });
}

}  // namespace

TEST_CASE("gns inner product on delta differences") {
  const Graph tree = make_random_tree(16, 4);
  const DistanceMatrix d(tree);
  const GnsForm form = form_for(tree, 0);
  for (Vertex x = 0; x < tree.vertex_count(); ++x)
    for (Vertex y = 0; y < tree.vertex_count(); ++y) {
      const MeanZeroVector v = MeanZeroVector::delta_diff(x, y);
      if (x == y) {
        CHECK(gns_inner(v, v, form) == 0.0);
      } else {
        CHECK(gns_inner(v, v, form) == 2.0 * d(x, y) + 2.0);
      }
    }

  // strictly positive even where the kernel vanishes off-diagonal
  const GnsForm c6 = form_for(make_cycle(6), 0);
  const MeanZeroVector v = MeanZeroVector::delta_diff(1, 5);
  CHECK(gns_inner(v, v, c6) == 2.0);  // 2 psi(1,5) + 2 with psi(1,5) = 0
}

TEST_CASE("gns inner is bilinear and symmetric") {
  const GnsForm form = form_for(make_random_quasi_tree(14, 3, 3, 8), 0);
  std::mt19937_64 rng(41);
  for (int i = 0; i < 50; ++i) {
    const MeanZeroVector v = random_mean_zero(form.points(), rng);
    const MeanZeroVector w = random_mean_zero(form.points(), rng);
    const MeanZeroVector u = random_mean_zero(form.points(), rng);
    const double a = std::uniform_real_distribution<double>(-2, 2)(rng);
    CHECK(gns_inner(v, w, form) == Catch::Approx(gns_inner(w, v, form)).margin(1e-12));
    CHECK(gns_inner(v.scaled(a).plus(u), w, form) ==
          Catch::Approx(a * gns_inner(v, w, form) + gns_inner(u, w, form)).margin(1e-9));
  }
  const MeanZeroVector zero;
  CHECK(gns_inner(zero, random_mean_zero(form.points(), rng), form) == 0.0);
}

TEST_CASE("gns positivity") {
  const GnsForm form = form_for(make_random_quasi_tree(18, 3, 4, 12), 0);
  REQUIRE(form.certificate().pass);
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const MeanZeroVector v = random_mean_zero(form.points(), rng);
    const double q = gns_inner(v, v, form);
    CHECK(q >= v.sum_of_squares() - 1e-9);
    CHECK(q > 0.0);
  }
}

TEST_CASE("gns input validation") {
  const GnsForm form = form_for(make_path(4), 0);
  const MeanZeroVector not_mean_zero = MeanZeroVector::from_coeffs({{0, 1.0}, {1, 0.5}});
  const MeanZeroVector outside = MeanZeroVector::delta_diff(0, 99);
  const MeanZeroVector ok = MeanZeroVector::delta_diff(0, 1);
  CHECK_THROWS_AS(gns_inner(not_mean_zero, ok, form), Error);
  CHECK_THROWS_AS(gns_inner(ok, outside, form), Error);
  try {
    gns_inner(ok, outside, form);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SupportOutsidePoints);
  }
}

TEST_CASE("e_norm values and homogeneity") {
  const Graph tree = make_random_tree(12, 19);
  const DistanceMatrix d(tree);
  const GnsForm form = form_for(tree, 0);
  for (Vertex x = 0; x < tree.vertex_count(); ++x)
    for (Vertex y = 0; y < tree.vertex_count(); ++y) {
      if (x == y) continue;
      const ENormValue n = e_norm(MeanZeroVector::delta_diff(x, y), form);
      CHECK(n.h_norm == std::sqrt(2.0 * d(x, y) + 2.0));
      CHECK(n.l1_norm == 2.0);
      CHECK(n.e_norm == n.h_norm + n.l1_norm);
    }

  const ENormValue zero = e_norm(MeanZeroVector{}, form);
  CHECK(zero.h_norm == 0.0);
  CHECK(zero.l1_norm == 0.0);
  CHECK(zero.e_norm == 0.0);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    const MeanZeroVector v = random_mean_zero(form.points(), rng);
    const double c = std::uniform_real_distribution<double>(-3, 3)(rng);
    const ENormValue nv = e_norm(v, form);
    const ENormValue ncv = e_norm(v.scaled(c), form);
    CHECK(ncv.e_norm == Catch::Approx(std::fabs(c) * nv.e_norm).epsilon(1e-12));
  }

  // triangle inequality on random triples
  for (int i = 0; i < 50; ++i) {
    const MeanZeroVector v = random_mean_zero(form.points(), rng);
    const MeanZeroVector w = random_mean_zero(form.points(), rng);
    CHECK(e_norm(v.plus(w), form).e_norm <=
          e_norm(v, form).e_norm + e_norm(w, form).e_norm + 1e-9);
  }
}

TEST_CASE("negative self inner product is loud") {
  // not a CND kernel: -3 off the diagonal pushes <v,v> below zero
  std::vector<std::uint32_t> points{0, 1};
  const GnsForm bogus(std::move(points),
                      [](std::uint32_t x, std::uint32_t y) { return x == y ? 0.0 : -3.0; }, {});
  bool threw = false;
  try {
    e_norm(MeanZeroVector::delta_diff(0, 1), bogus);
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::NegativeSelfInner;
  }
  CHECK(threw);
}

TEST_CASE("parallelogram law holds for the GNS norm, fails for the E norm") {
  const GnsForm form = form_for(make_path(4), 0);
  const MeanZeroVector v = MeanZeroVector::delta_diff(0, 1);
  const MeanZeroVector w = MeanZeroVector::delta_diff(2, 3);
  const double h_lhs = gns_inner(v.plus(w), v.plus(w), form) +
                       gns_inner(v.minus(w), v.minus(w), form);
  const double h_rhs = 2.0 * gns_inner(v, v, form) + 2.0 * gns_inner(w, w, form);
  CHECK(h_lhs == Catch::Approx(h_rhs).margin(1e-12));

  auto e2 = [&](const MeanZeroVector& u) {
    const double e = e_norm(u, form).e_norm;
    return e * e;
  };
  const double e_lhs = e2(v.plus(w)) + e2(v.minus(w));
  const double e_rhs = 2.0 * e2(v) + 2.0 * e2(w);
  CHECK(std::fabs(e_lhs - e_rhs) > 1.0);  // witness: the E norm is not Hilbertian
}

TEST_CASE("l1 witness") {
  const Graph tree = make_random_tree(14, 23);
  const DistanceMatrix d(tree);
  const GnsForm form = form_for(tree, 0);

  const MeanZeroVector v = MeanZeroVector::delta_diff(2, 7);
  const L1WitnessReport report = l1_witness(v, form, 100000, 2024);
  CHECK(report.target_h == std::sqrt(2.0 * d(2, 7) + 2.0));
  CHECK(report.within_3se);
  CHECK(report.estimate_e == report.estimate_h + 2.0);
  CHECK(report.coordinate_norm_gap < 1e-9);
  CHECK(report.rank == form.points().size() - 1);

  // deterministic given the seed
  const L1WitnessReport again = l1_witness(v, form, 100000, 2024);
  CHECK(report.estimate_h == again.estimate_h);
  CHECK(report.stderr_h == again.stderr_h);

  // zero vector: estimate is exactly zero
  const L1WitnessReport zero = l1_witness(MeanZeroVector{}, form, 2000, 1);
  CHECK(zero.estimate_h == 0.0);
  CHECK(zero.within_3se);

  std::mt19937_64 rng(6);
  for (int i = 0; i < 3; ++i) {
    const MeanZeroVector u = random_mean_zero(form.points(), rng);
    CHECK(l1_witness(u, form, 50000, rng()).within_3se);
  }

  const GnsForm tiny(std::vector<std::uint32_t>{0},
                     [](std::uint32_t, std::uint32_t) { return 0.0; }, {});
  CHECK_THROWS_AS(l1_witness(MeanZeroVector{}, tiny, 2000, 1), Error);
}
