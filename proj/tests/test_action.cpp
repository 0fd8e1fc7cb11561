#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "qtk/action.hpp"

using namespace qtk;

namespace {

GroupElement element_for(const Action& action, Word word) {
  GroupElement e;
  e.key = action.element_key(word);
  e.length = static_cast<std::uint32_t>(word.size());
  e.word = std::move(word);
  return e;
}

}  // namespace

TEST_CASE("automorphism validation") {
  const Graph c6 = make_cycle(6);
  CHECK_THROWS_AS(GraphAutomorphismAction(c6, {{"x", {0, 0, 1, 2, 3, 4}}}, 0), Error);  // not 1-1
  CHECK_THROWS_AS(GraphAutomorphismAction(c6, {{"x", {1, 0, 2, 3, 4, 5}}}, 0), Error);  // breaks edges
  CHECK_THROWS_AS(GraphAutomorphismAction(c6, {{"x", {0, 1}}}, 0), Error);
  const GraphAutomorphismAction rot = make_cycle_rotation_action(c6, 0);
  CHECK(rot.generator_count() == 2);  // inverse derived
  CHECK(rot.generator_name(1) == "r^-1");
  CHECK(rot.inverse_generator(0) == 1);
  CHECK_THROWS_AS(make_cycle_rotation_action(make_path(4), 0), Error);
}

TEST_CASE("apply_rep transports coefficients") {
  const Graph c6 = make_cycle(6);
  const GraphAutomorphismAction rot = make_cycle_rotation_action(c6, 0);
  const MeanZeroVector v = MeanZeroVector::delta_diff(1, 0);

  const GroupElement id = element_for(rot, {});
  CHECK(apply_rep(rot, id, v) == v);

  const GroupElement step = element_for(rot, {0});
  CHECK(apply_rep(rot, step, v) == MeanZeroVector::delta_diff(2, 1));
  CHECK(apply_rep(rot, step, v).l1() == v.l1());
}

TEST_CASE("representation is a homomorphism on realized words") {
  const Graph theta = with_extra_chords(make_cycle(8), {{0, 4}});
  std::vector<Vertex> r1(8), r2(8);
  for (Vertex v = 0; v < 8; ++v) {
    r1[v] = (8 - v) % 8;
    r2[v] = (12 - v) % 8;
  }
  const GraphAutomorphismAction action(theta, {{"s", r1}, {"t", r2}}, 1);
  std::mt19937_64 rng(17);
  const auto orbit = action.orbit_of_basepoint();
  CHECK(orbit == std::vector<PointId>{1, 3, 5, 7});
  std::uniform_int_distribution<std::uint32_t> gen(0, action.generator_count() - 1);
  for (int i = 0; i < 60; ++i) {
    Word s, t;
    for (int k = 0; k < 3; ++k) {
      s.push_back(gen(rng));
      t.push_back(gen(rng));
    }
    const MeanZeroVector v = random_mean_zero(orbit, rng);
    const MeanZeroVector lhs = apply_rep(action, element_for(action, concat_words(s, t)), v);
    const MeanZeroVector rhs =
        apply_rep(action, element_for(action, s), apply_rep(action, element_for(action, t), v));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("word enumeration deduplicates by realized map") {
  const Graph c6 = make_cycle(6);
  const GraphAutomorphismAction rot = make_cycle_rotation_action(c6, 0);
  const WordEnumeration words = enumerate_elements(rot, 4);
  CHECK(words.elements.size() == 6);  // the full rotation group
  CHECK(words.elements[0].length == 0);
  for (std::size_t i = 0; i < words.elements.size(); ++i) {
    const auto& inv = words.elements[words.inverse_of[i]];
    const Word product = concat_words(words.elements[i].word, inv.word);
    CHECK(rot.element_key(product) == words.elements[0].key);
  }

  const FreeGroupTreeAction free2(2, 8);
  CHECK(enumerate_elements(free2, 4).elements.size() == 161);  // reduced words up to length 4
}

TEST_CASE("cocycle identity and norms on the cycle rotation") {
  const Graph c6 = make_cycle(6);
  const GraphAutomorphismAction rot = make_cycle_rotation_action(c6, 0);
  const WordEnumeration words = enumerate_elements(rot, 4);
  auto table = std::make_shared<SeparationTable>(c6, 0);
  const GnsForm form = form_from_separation(rot, table);

  CHECK(cocycle(rot, words.elements[0]).zero());  // b(e) = 0
  CHECK(cocycle_identity_check(rot, words).pass);
  CHECK(cocycle_inverse_check(rot, words).pass);

  const CocycleNormReport norms = cocycle_norm_check(rot, words, form, 1e-12);
  CHECK(norms.pass);
  CHECK(norms.max_abs_dev == 0.0);

  // rotation by one step: ||b(r)||_E = sqrt(2*1+2) + 2 = 4
  const GroupElement step = element_for(rot, {0});
  CHECK(e_norm(cocycle(rot, step), form).e_norm == 4.0);
}

TEST_CASE("a generator fixing the basepoint gives the zero cocycle") {
  const Graph p7 = make_path(7);
  std::vector<Vertex> flip(7);
  for (Vertex v = 0; v < 7; ++v) flip[v] = 6 - v;
  const GraphAutomorphismAction action(p7, {{"f", flip}}, 3);  // the reflection fixes 3
  CHECK(cocycle(action, element_for(action, {0})).zero());
}

TEST_CASE("rep bound: invariant kernel stays isometric, d_a is uniformly bounded") {
  const Graph p7 = make_path(7);
  std::vector<Vertex> flip(7);
  for (Vertex v = 0; v < 7; ++v) flip[v] = 6 - v;
  const GraphAutomorphismAction refl(p7, {{"f", flip}}, 0);
  auto p7_table = std::make_shared<SeparationTable>(p7, 0);
  const GnsForm tree_form = form_from_separation(refl, p7_table);
  const WordEnumeration refl_words = enumerate_elements(refl, 4);
  const RepBoundReport invariant =
      rep_bound_report(refl, refl_words, tree_form, 50, 1, 0.0);
  CHECK(invariant.pass);
  CHECK(invariant.defect == 0.0);  // trees: the kernel is the metric, preserved exactly
  CHECK(invariant.max_ratio <= 1.0 + 1e-12);

  const Graph c6 = make_cycle(6);
  const GraphAutomorphismAction rot = make_cycle_rotation_action(c6, 0);
  auto table = std::make_shared<SeparationTable>(c6, 0);
  const GnsForm form = form_from_separation(rot, table);
  const WordEnumeration words = enumerate_elements(rot, 4);
  const double delta_x = sandwich_check(c6).delta_x;
  const RepBoundReport report = rep_bound_report(rot, words, form, 200, 7, delta_x);
  CHECK(report.pass);
  CHECK(report.max_ratio <= 1.0 + std::sqrt(delta_x) + 1e-9);
  CHECK(report.max_ratio > 1.0);  // the rotation genuinely distorts d_0
  CHECK(report.defect <= delta_x);
  CHECK(report.max_l1_drift == 0.0);

  // the identity element is exactly isometric
  const MeanZeroVector v = MeanZeroVector::delta_diff(2, 5);
  CHECK(apply_rep(rot, words.elements[0], v) == v);
}

TEST_CASE("free group action: envelope and exploration bounds") {
  const FreeGroupTreeAction free2(2, 6);
  const GnsForm form = form_from_metric(free2);
  const WordEnumeration words = enumerate_elements(free2, 6);
  CHECK(cocycle_norm_check(free2, words, form, 1e-12).pass);

  const PropernessReport prop = properness_report(free2, words, form);
  CHECK(prop.lower_envelope_strictly_increasing);
  for (const auto& row : prop.rows) {
    if (row.count == 0) continue;
    const double expected = row.length == 0 ? 0.0 : std::sqrt(2.0 * row.length + 2.0) + 2.0;
    CHECK(row.min_norm == expected);
    CHECK(row.max_norm == expected);
  }

  // leaving the explored region is loud
  const GroupElement far = element_for(free2, {0, 0, 0, 0});
  const MeanZeroVector edge = MeanZeroVector::delta_diff(free2.point_count() - 1, 0);
  bool threw = false;
  try {
    apply_rep(free2, far, MeanZeroVector::delta_diff(
                              *free2.try_apply_word(Word{0, 0, 0}, free2.basepoint()), 0));
    const auto word6 = Word{0, 0, 0, 0, 0, 0};
    apply_rep(free2, element_for(free2, word6), edge);
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::ExplorationExceeded;
  }
  CHECK(threw);

  // stable points for cap c are the words of length <= radius - c
  const auto stable = free2.stable_points(2);
  for (PointId p : stable) CHECK(free2.distance(p, free2.basepoint()) <= 4);
  CHECK(stable.size() == 161);  // words of length <= 4
}

TEST_CASE("finite-graph properness envelope is bounded by the diameter") {
  const Graph c6 = make_cycle(6);
  const GraphAutomorphismAction rot = make_cycle_rotation_action(c6, 0);
  auto table = std::make_shared<SeparationTable>(c6, 0);
  const GnsForm form = form_from_separation(rot, table);
  const WordEnumeration words = enumerate_elements(rot, 6);
  const PropernessReport prop = properness_report(rot, words, form);
  const double bound = std::sqrt(2.0 * 3 + 2.0) + 2.0;  // diameter 3
  for (const auto& row : prop.rows)
    if (row.count > 0) CHECK(row.max_norm <= bound + 1e-12);
}

TEST_CASE("coarse envelopes") {
  const Graph c6 = make_cycle(6);
  const GraphAutomorphismAction rot = make_cycle_rotation_action(c6, 0);
  auto table = std::make_shared<SeparationTable>(c6, 0);
  const GnsForm form = form_from_separation(rot, table);
  const WordEnumeration words = enumerate_elements(rot, 6);
  const RepBoundReport bound = rep_bound_report(rot, words, form, 100, 3, sandwich_check(c6).delta_x);
  const CoarseEnvelopeReport report =
      coarse_envelopes(rot, words, form, std::max(bound.max_ratio, 1.0), 3);
  CHECK(report.displacement_exact);
  CHECK(report.bounds_hold);
  CHECK(report.rows[0].count > 0);
  CHECK(report.rows[0].rho_plus == 0.0);  // s = t pairs

  // isometric case: both envelopes collapse onto the norm formula
  const FreeGroupTreeAction free2(2, 6);
  const GnsForm tree_form = form_from_metric(free2);
  const WordEnumeration free_words = enumerate_elements(free2, 4);
  const CoarseEnvelopeReport iso = coarse_envelopes(free2, free_words, tree_form, 1.0, 2);
  CHECK(iso.displacement_exact);
  CHECK(iso.bounds_hold);
  for (const auto& row : iso.rows) {
    if (row.count == 0) continue;
    const double expected = row.length == 0 ? 0.0 : std::sqrt(2.0 * row.length + 2.0) + 2.0;
    CHECK(row.rho_minus == Catch::Approx(expected).margin(1e-12));
    CHECK(row.rho_plus == Catch::Approx(expected).margin(1e-12));
  }
}

TEST_CASE("product automorphism action") {
  const ProductSpace space({make_cycle(6), make_path(5)}, {0, 2});
  std::vector<Vertex> rot(6), flip(5);
  for (Vertex v = 0; v < 6; ++v) rot[v] = (v + 1) % 6;
  for (Vertex v = 0; v < 5; ++v) flip[v] = 4 - v;
  const ProductAutomorphismAction action(space, {{"g", {rot, flip}}});
  CHECK(action.point_count() == 30);
  const PointId base = action.basepoint();
  CHECK(action.tuple_of(base) == std::vector<Vertex>{0, 2});
  const PointId moved = *action.try_apply_generator(0, base);
  CHECK(action.tuple_of(moved) == std::vector<Vertex>{1, 2});
  CHECK(action.distance(base, moved) == 1);

  const WordEnumeration words = enumerate_elements(action, 4);
  CHECK(cocycle_identity_check(action, words).pass);
  CHECK_THROWS_AS(ProductAutomorphismAction(space, {{"g", {rot}}}), Error);  // arity
}
