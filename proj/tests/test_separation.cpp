#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qtk/separation.hpp"

using namespace qtk;

TEST_CASE("separation radius, frozen examples") {
  const Graph p5 = make_path(5);
  CHECK(separation_radius(p5, 0, 2, 4) == 2);
  const Graph c6 = make_cycle(6);
  CHECK(separation_radius(c6, 0, 1, 5) == 1);
  const SeparationTable t(c6, 0);
  CHECK(t.separation_radius(1, 5) == 1);
  CHECK(semimetric_da(t, 1, 5) == 0);  // below d(1,5) = 2: semimetrics may vanish off-diagonal
}

TEST_CASE("table agrees with the single-pair scan and the brute oracle") {
  for (std::uint64_t seed : {2ull, 8ull}) {
    const Graph g = make_random_quasi_tree(9, 3, 2, seed);
    for (Vertex a = 0; a < g.vertex_count(); ++a) {
      const SeparationTable table(g, a);
      for (Vertex x = 0; x < g.vertex_count(); ++x) {
        for (Vertex y = x; y < g.vertex_count(); ++y) {
          CHECK(table.separation_radius(x, y) == separation_radius(g, a, x, y));
          CHECK(table.separation_radius(x, y) == oracle::brute_separation_radius(g, a, x, y));
        }
      }
    }
  }
}

TEST_CASE("on trees the separation radius is the Gromov product") {
  for (std::uint64_t seed : {5ull, 6ull, 7ull}) {
    const Graph g = make_random_tree(32, seed);
    const DistanceMatrix d(g);
    for (Vertex a = 0; a < g.vertex_count(); ++a) {
      const SeparationTable table(g, a);
      for (Vertex x = 0; x < g.vertex_count(); ++x)
        for (Vertex y = 0; y < g.vertex_count(); ++y) {
          CHECK(2 * table.separation_radius(x, y) == d(a, x) + d(a, y) - d(x, y));
          CHECK(table.semimetric(x, y) == d(x, y));  // hence d_a = d on trees
        }
    }
  }
}

TEST_CASE("basic radius and semimetric invariants") {
  const Graph g = make_random_quasi_tree(20, 4, 4, 31);
  const DistanceMatrix d(g);
  const std::uint32_t delta_prime = 6 * bottleneck_delta(g) + 2;
  for (Vertex a = 0; a < g.vertex_count(); ++a) {
    const SeparationTable t(g, a);
    for (Vertex x = 0; x < g.vertex_count(); ++x) {
      CHECK(t.separation_radius(x, a) == 0);
      CHECK(t.separation_radius(x, x) == d(a, x));
      CHECK(t.semimetric(x, x) == 0);
      CHECK(t.semimetric(x, a) == d(a, x));
      for (Vertex y = 0; y < g.vertex_count(); ++y) {
        CHECK(t.separation_radius(x, y) <= std::min(d(a, x), d(a, y)));
        CHECK(t.separation_radius(x, y) == t.separation_radius(y, x));
        CHECK(t.semimetric(x, y) <= d(x, y));
        CHECK(d(x, y) - t.semimetric(x, y) <= delta_prime);
      }
    }
  }
}

TEST_CASE("value range is exactly 0..d(a,x)") {
  const Graph p5 = make_path(5);
  const SeparationTable t(p5, 0);
  for (std::uint32_t k = 0; k <= 4; ++k) CHECK(t.separation_radius(k, 4) == k);
  CHECK(range_check(t).pass);
  const SeparationTable ta(p5, 2);
  CHECK(ta.separation_radius(2, 2) == 0);  // x = a has range {0}
  for (std::uint64_t seed : {12ull, 13ull}) {
    const Graph g = make_random_quasi_tree(24, 3, 3, seed);
    for (Vertex a = 0; a < g.vertex_count(); ++a) CHECK(range_check(SeparationTable(g, a)).pass);
  }
}

TEST_CASE("ultrametric inequality, exhaustive") {
  for (std::uint64_t seed : {17ull, 18ull}) {
    const Graph tree = make_random_tree(24, seed);
    const Graph quasi = make_random_quasi_tree(24, 4, 4, seed);
    for (const Graph* g : {&tree, &quasi})
      for (Vertex a = 0; a < g->vertex_count(); ++a)
        CHECK(ultrametric_check(SeparationTable(*g, a)).pass);
  }
  const SeparationTable t(make_cycle(6), 0);
  CHECK(t.separation_radius(2, 2) >=
        std::min(t.separation_radius(2, 2), t.separation_radius(2, 2)));  // degenerate triple
}

TEST_CASE("ball family: nesting, member-is-center, frozen 6-cycle values") {
  const Graph c6 = make_cycle(6);
  const SeparationTable t(c6, 0);
  const BallFamily balls(t);

  // paper-true value: R_0(1,y) = 1 for every y with d(0,y) >= 1
  const auto v11 = balls.members(balls.id(1, 1));
  CHECK(std::vector<Vertex>(v11.begin(), v11.end()) == std::vector<Vertex>{1, 2, 3, 4, 5});
  CHECK(balls.id(1, 1) == balls.id(5, 1));  // since R_0(1,5) = 1

  for (Vertex x = 0; x < 6; ++x) {
    for (std::uint32_t k = 0; k + 1 < balls.radius_count(x); ++k) {
      const auto outer = balls.members(balls.id(x, k));
      const auto inner = balls.members(balls.id(x, k + 1));
      CHECK(std::includes(outer.begin(), outer.end(), inner.begin(), inner.end()));
    }
    for (std::uint32_t k = 0; k < balls.radius_count(x); ++k)
      for (Vertex y : balls.members(balls.id(x, k)))
        CHECK(balls.id(y, k) == balls.id(x, k));  // every member is a center
  }
}

TEST_CASE("ball equality criterion, exhaustive and reduced routes agree") {
  for (std::uint64_t seed : {3ull, 4ull}) {
    const Graph tree = make_random_tree(14, seed);
    const Graph quasi = make_random_quasi_tree(14, 3, 3, seed);
    for (const Graph* g : {&tree, &quasi}) {
      for (Vertex a = 0; a < g->vertex_count(); ++a) {
        const SeparationTable t(*g, a);
        const BallFamily balls(t);
        const Verdict fast = ball_equality_check(t, balls);
        const Verdict slow = ball_equality_check_exhaustive(t, balls);
        CHECK(fast.pass);
        CHECK(slow.pass);
      }
    }
  }
}

TEST_CASE("sandwich report") {
  const SandwichReport tree = sandwich_check(make_random_tree(24, 5));
  CHECK(tree.pass());
  CHECK(tree.delta == 0);
  CHECK(tree.delta_prime == 2);
  CHECK(tree.delta_x == 0);

  const SandwichReport c6 = sandwich_check(make_cycle(6));
  CHECK(c6.pass());
  CHECK(c6.delta == 1);
  CHECK(c6.delta_prime == 8);
  CHECK(c6.delta_x == 2);  // attained e.g. at a=0, (x,y)=(1,5)
  CHECK(c6.max_gap == 2);

  const SandwichReport q = sandwich_check(make_random_quasi_tree(22, 4, 5, 41));
  CHECK(q.pass());
  CHECK(q.delta_x <= q.delta_prime);
}

TEST_CASE("product semimetric") {
  const ProductSpace one({make_path(5)}, {0});
  const ProductSeparation sep1(one);
  const SeparationTable t(make_path(5), 0);
  CHECK(product_da(sep1, std::vector<Vertex>{2}, std::vector<Vertex>{4}) == t.semimetric(2, 4));

  const ProductSpace two({make_path(5), make_path(5)}, {0, 0});
  const ProductSeparation sep2(two);
  CHECK(product_da(sep2, std::vector<Vertex>{2, 3}, std::vector<Vertex>{4, 1}) == 4);
  CHECK(product_da(sep2, std::vector<Vertex>{2, 3}, std::vector<Vertex>{2, 3}) == 0);
  CHECK_THROWS_AS(product_da(sep2, std::vector<Vertex>{1}, std::vector<Vertex>{2, 3}), Error);

  // gap of the product is the sum of factor gaps, attained coordinatewise
  const ProductSpace cycles({make_cycle(6), make_cycle(6)}, {0, 0});
  const ProductSeparation sepc(cycles);
  std::vector<DistanceMatrix> d;
  for (const auto& f : cycles.factors) d.emplace_back(f);
  const std::vector<Vertex> x{1, 1}, y{5, 5};
  const std::uint32_t dist = product_distance(cycles, d, x, y);
  CHECK(dist == 4);
  CHECK(product_da(sepc, x, y) == 0);  // gap 4 = 2 + 2, the sum of factor gaps
}
