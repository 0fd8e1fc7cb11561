#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qtk/weak_haagerup.hpp"

using namespace qtk;

TEST_CASE("the integer instance loads and certifies") {
  const WeakHaagerupData data = make_z_instance(8);
  const WeakHaagerupLoad load = load_weak_haagerup(data);
  CHECK(load.form.certificate().pass);
  CHECK(load.bound_constant == 1.0);  // phi(e) = 0
  CHECK(load.phi_at_identity == 0.0);
  CHECK(load.properness_bound.pass);
  CHECK(load.properness_bound_tight);  // S = 0 makes the bound an equality
  CHECK(load.pairs_validated == 217);  // pairs of the 17-window with difference inside it
}

TEST_CASE("cocycle norms on the integer instance are exact") {
  const WeakHaagerupData data = make_z_instance(8);
  const WeakHaagerupLoad load = load_weak_haagerup(data);
  const TranslationWindowAction action = make_window_action(data);
  for (std::int64_t n = -8; n <= 8; ++n) {
    const MeanZeroVector b = MeanZeroVector::delta_diff(action.id_of(n), action.basepoint());
    const double expected = n == 0 ? 0.0 : std::sqrt(2.0 * std::llabs(n) + 2.0) + 2.0;
    CHECK(e_norm(b, load.form).e_norm == expected);
  }
}

TEST_CASE("window action: cocycle identity within the window") {
  const WeakHaagerupData data = make_z_instance(8);
  WeakHaagerupLoad load = load_weak_haagerup(data);
  const TranslationWindowAction action = make_window_action(data);
  const WordEnumeration words = enumerate_elements(action, 4);
  CHECK(words.elements.size() == 9);  // translations by -4..4
  CHECK(cocycle_identity_check(action, words).pass);
  CHECK(cocycle_inverse_check(action, words).pass);
  CHECK(cocycle_norm_check(action, words, load.form, 1e-12).pass);

  // past the window edge the action is undefined, loudly
  CHECK_FALSE(action.try_apply_generator(0, action.id_of(8)).has_value());
  CHECK_THROWS_AS(action.id_of(9), Error);
}

TEST_CASE("validation failures") {
  {
    WeakHaagerupData data = make_z_instance(4);
    data.s_vectors[3][0] = 1.0;  // 4||S(3)||^2 = 4 != phi(e) = 0
    CHECK_THROWS_AS(load_weak_haagerup(data), Error);
    try {
      load_weak_haagerup(data);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonConstantS);
    }
  }
  {
    WeakHaagerupData data = make_z_instance(4);
    data.phi[2] += 0.5;
    CHECK_THROWS_AS(load_weak_haagerup(data), Error);
    try {
      load_weak_haagerup(data);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DecompositionMismatch);
    }
  }
  {
    WeakHaagerupData data = make_z_instance(4);
    data.elements.erase(data.elements.begin() + 5);  // drop 1: window no longer contiguous
    CHECK_THROWS_AS(load_weak_haagerup(data), Error);
  }
  {
    WeakHaagerupData data = make_z_instance(4);
    data.elements.erase(data.elements.begin() + 4);  // drop the identity
    CHECK_THROWS_AS(load_weak_haagerup(data), Error);
  }
  {
    // an asymmetric but contiguous window is fine
    WeakHaagerupData data = make_z_instance(4);
    data.elements.erase(data.elements.begin());  // -3..4
    CHECK(load_weak_haagerup(data).bound_constant == 1.0);
  }
}

TEST_CASE("rotating every R vector leaves the kernel unchanged") {
  WeakHaagerupData data = make_z_instance(6);
  const WeakHaagerupLoad before = load_weak_haagerup(data);

  // apply a product of Givens rotations to all R vectors
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> angle(0.0, 6.28318);
  const std::size_t dim = data.r_vectors.at(0).size();
  for (int rotations = 0; rotations < 8; ++rotations) {
    const std::size_t i = rng() % dim;
    std::size_t j = rng() % dim;
    if (i == j) j = (j + 1) % dim;
    const double t = angle(rng), c = std::cos(t), s = std::sin(t);
    for (auto& [n, r] : data.r_vectors) {
      const double ri = r[i], rj = r[j];
      r[i] = c * ri - s * rj;
      r[j] = s * ri + c * rj;
    }
  }
  // S = 0 is rotation invariant, so the data still validates
  const WeakHaagerupLoad after = load_weak_haagerup(data, 1e-6);
  for (std::uint32_t x = 0; x < 13; ++x)
    for (std::uint32_t y = 0; y < 13; ++y)
      CHECK(after.form.psi(x, y) == Catch::Approx(before.form.psi(x, y)).margin(1e-9));
}

TEST_CASE("properness report over the window") {
  const WeakHaagerupData data = make_z_instance(8);
  WeakHaagerupLoad load = load_weak_haagerup(data);
  const TranslationWindowAction action = make_window_action(data);
  const WordEnumeration words = enumerate_elements(action, 8);
  const PropernessReport prop = properness_report(action, words, load.form);
  CHECK(prop.lower_envelope_strictly_increasing);
  for (const auto& row : prop.rows) {
    if (row.count == 0) continue;
    const double expected = row.length == 0 ? 0.0 : std::sqrt(2.0 * row.length + 2.0) + 2.0;
    CHECK(row.min_norm == expected);  // phi(n) = |n| with S = 0: the bound is tight
    // the lower bound sqrt(2(phi(s) - phi(e)) + 2) + 2 coincides here
  }
}
