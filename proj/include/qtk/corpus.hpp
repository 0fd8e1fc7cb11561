#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "qtk/action.hpp"
#include "qtk/gns.hpp"
#include "qtk/json_io.hpp"
#include "qtk/kernel_analysis.hpp"
#include "qtk/separation.hpp"
#include "qtk/weak_haagerup.hpp"

namespace qtk {

struct SizeProfile {
  std::string name;
  std::size_t tree_count = 50;
  Vertex tree_max_n = 32;
  std::size_t quasi_count = 50;
  Vertex quasi_max_n = 30;
  std::size_t product_count = 10;
  std::uint32_t free_radius = 8;
  std::uint32_t cocycle_cap = 4;
  std::uint32_t coarse_pair_cap = 3;
  std::size_t witness_vectors = 20;
  std::size_t witness_samples = 100000;
  std::size_t positivity_vectors = 10000;
  std::size_t rep_vectors = 200;
};

inline SizeProfile size_profile(const std::string& name) {
  if (name == "small") return SizeProfile{.name = "small"};
  if (name == "tiny")
    return SizeProfile{.name = "tiny",
                       .tree_count = 8,
                       .tree_max_n = 12,
                       .quasi_count = 8,
                       .quasi_max_n = 12,
                       .product_count = 3,
                       .free_radius = 6,
                       .cocycle_cap = 3,
                       .coarse_pair_cap = 2,
                       .witness_vectors = 6,
                       .witness_samples = 5000,
                       .positivity_vectors = 500,
                       .rep_vectors = 40};
  fail(ErrorCode::InvalidConfig, "unknown size profile '" + name + "'");
}

struct Corpus {
  std::vector<Graph> trees;
  std::vector<Graph> quasi_trees;
  std::vector<ProductSpace> products;
  Graph cycle6;
  Graph theta;  // 8-cycle with a chord across {0,4}
  Graph path7;
};

inline Corpus build_corpus(const SizeProfile& prof, std::uint64_t seed) {
  Corpus corpus{{},
                {},
                {},
                make_cycle(6),
                with_extra_chords(make_cycle(8), {{0, 4}}),
                make_path(7)};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Vertex> tree_n(4, prof.tree_max_n);
  for (std::size_t i = 0; i < prof.tree_count; ++i)
    corpus.trees.push_back(make_random_tree(tree_n(rng), rng()));
  corpus.trees.push_back(make_path(2));
  corpus.trees.push_back(make_path(9));
  corpus.trees.push_back(make_path(std::min<Vertex>(16, prof.tree_max_n)));
  std::uniform_int_distribution<Vertex> quasi_n(8, prof.quasi_max_n);
  std::uniform_int_distribution<std::uint32_t> span(2, 4), chords(1, 5);
  for (std::size_t i = 0; i < prof.quasi_count; ++i)
    corpus.quasi_trees.push_back(
        make_random_quasi_tree(quasi_n(rng), span(rng), chords(rng), rng()));
  corpus.quasi_trees.push_back(make_cycle(4));
  corpus.quasi_trees.push_back(make_cycle(6));
  corpus.quasi_trees.push_back(make_cycle(9));
  corpus.quasi_trees.push_back(corpus.theta);
  std::uniform_int_distribution<Vertex> factor_n(4, 8);
  std::uniform_int_distribution<int> coin(0, 1);
  for (std::size_t i = 0; i < prof.product_count; ++i) {
    const std::size_t arity = 2 + (i % 2);
    std::vector<Graph> factors;
    for (std::size_t f = 0; f < arity; ++f) {
      if (coin(rng))
        factors.push_back(make_random_tree(factor_n(rng), rng()));
      else
        factors.push_back(make_random_quasi_tree(factor_n(rng) + 2, 3, 2, rng()));
    }
    corpus.products.emplace_back(std::move(factors), std::vector<Vertex>(arity, 0));
  }
  return corpus;
}

struct CheckResult {
  std::string name;
  bool pass = true;
  ordered_json evidence;
  double seconds = 0.0;
};

struct CorpusOptions {
  std::uint64_t seed = 424242;
  std::string sizes = "small";
  double tol = 1e-9;
  std::uint32_t cap = 64;
};

namespace detail {
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline std::vector<Rational> standard_rates() {
  std::vector<Rational> rates;
  for (int k = 1; k <= 9; ++k) rates.emplace_back(k, 10);
  return rates;
}

inline std::vector<double> schoenberg_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(0.1 * k);
  return grid;
}
}  // namespace detail

// Runs every law-level check over the generated corpus. The individual
// checks are public so the acceptance suite can time and gate them one by
// one; run_all() is what `qtk corpus` executes.
class CorpusRunner {
 public:
  explicit CorpusRunner(CorpusOptions options)
      : opt_(std::move(options)),
        prof_(size_profile(opt_.sizes)),
        corpus_(build_corpus(prof_, opt_.seed)) {}

  const Corpus& corpus() const { return corpus_; }
  const SizeProfile& profile() const { return prof_; }

  // d_a == d and zero gap on every tree, every basepoint, every pair.
  CheckResult tree_identity() {
    detail::Stopwatch timer;
    CheckResult result;
    result.name = "tree_identity";
    std::size_t pairs = 0;
    std::uint32_t max_gap = 0;
    for (const Graph& g : corpus_.trees) {
      const DistanceMatrix dist(g);
      for (Vertex a = 0; a < g.vertex_count(); ++a) {
        const SeparationTable table(g, a);
        for (Vertex x = 0; x < g.vertex_count(); ++x) {
          for (Vertex y = x; y < g.vertex_count(); ++y) {
            ++pairs;
            if (table.semimetric(x, y) != dist(x, y)) {
              result.pass = false;
              const std::uint32_t gap = dist(x, y) > table.semimetric(x, y)
                                            ? dist(x, y) - table.semimetric(x, y)
                                            : table.semimetric(x, y) - dist(x, y);
              max_gap = std::max(max_gap, gap);
            }
          }
        }
      }
    }
    result.evidence = {{"trees", corpus_.trees.size()},
                       {"pairs_checked", pairs},
                       {"max_gap", max_gap},
                       {"delta_x", max_gap}};
    result.seconds = timer.seconds();
    return result;
  }

  // d_a <= d and d - d_a <= 6 delta + 2 on every quasi-tree.
  CheckResult sandwich() {
    detail::Stopwatch timer;
    CheckResult result;
    result.name = "sandwich";
    std::uint32_t max_delta = 0, max_delta_x = 0;
    std::size_t violations = 0;
    for (const Graph& g : corpus_.quasi_trees) {
      const SandwichReport report = sandwich_check(g, opt_.cap);
      violations += report.violations.size();
      max_delta = std::max(max_delta, report.delta);
      max_delta_x = std::max(max_delta_x, report.delta_x);
      if (!report.pass()) result.pass = false;
    }
    result.evidence = {{"quasi_trees", corpus_.quasi_trees.size()},
                       {"max_delta", max_delta},
                       {"max_delta_x", max_delta_x},
                       {"violations", violations}};
    result.seconds = timer.seconds();
    return result;
  }

  // Ultrametric, value-range and ball-equality laws, exhaustively, all
  // basepoints, trees and quasi-trees alike. Also records (without gating)
  // whether the plain distance stayed CND on the quasi corpus.
  CheckResult separation_laws() {
    detail::Stopwatch timer;
    CheckResult result;
    result.name = "separation_laws";
    std::size_t tables = 0;
    std::string first_failure;
    auto run_graph = [&](const Graph& g) {
      for (Vertex a = 0; a < g.vertex_count(); ++a) {
        const SeparationTable table(g, a);
        const BallFamily balls(table);
        ++tables;
        for (const Verdict& v :
             {ultrametric_check(table), range_check(table), ball_equality_check(table, balls)}) {
          if (!v.pass) {
            result.pass = false;
            if (first_failure.empty()) first_failure = v.detail;
          }
        }
      }
    };
    for (const Graph& g : corpus_.trees) run_graph(g);
    for (const Graph& g : corpus_.quasi_trees) run_graph(g);

    std::size_t plain_d_not_cnd = 0;
    for (const Graph& g : corpus_.quasi_trees) {
      const DistanceMatrix dist(g);
      SymMatrix psi(g.vertex_count());
      for (Vertex x = 0; x < g.vertex_count(); ++x)
        for (Vertex y = x; y < g.vertex_count(); ++y)
          psi.set(x, y, static_cast<double>(dist(x, y)));
      if (!cnd_check(psi, opt_.tol).cnd) ++plain_d_not_cnd;
    }
    result.evidence = {{"tables_checked", tables},
                       {"violations", result.pass ? 0 : 1},
                       {"plain_distance_cnd_failures", plain_d_not_cnd}};
    if (!first_failure.empty()) result.evidence["first_failure"] = first_failure;
    result.seconds = timer.seconds();
    return result;
  }

  // <xi(x), xi(y)> == r^{d_a(x,y)} in exact rationals, every basepoint and
  // pair, nine rates; tensor factorization on the product corpus.
  CheckResult gram_identity() {
    detail::Stopwatch timer;
    CheckResult result;
    result.name = "gram_identity";
    const auto rates = detail::standard_rates();
    std::size_t pairs = 0;
    std::string first_mismatch;
    auto run_graph = [&](const Graph& g) {
      for (Vertex a = 0; a < g.vertex_count(); ++a) {
        const SeparationTable table(g, a);
        const BallFamily balls(table);
        for (const Rational& r : rates) {
          const GramIdentityReport report = gram_identity_check(table, balls, r);
          pairs += report.pairs_checked;
          if (!report.exact) {
            result.pass = false;
            if (first_mismatch.empty()) first_mismatch = report.first_mismatch;
          }
        }
      }
    };
    for (const Graph& g : corpus_.trees) run_graph(g);
    for (const Graph& g : corpus_.quasi_trees) run_graph(g);

    std::size_t tensor_pairs = 0;
    std::mt19937_64 rng(opt_.seed ^ 0x7e4501ULL);
    for (const ProductSpace& space : corpus_.products) {
      const ProductSeparation sep(space);
      std::vector<BallFamily> families;
      std::size_t total_points = 1;
      for (const auto& t : sep.factors) {
        families.emplace_back(t);
        total_points *= t.size();
      }
      std::vector<std::vector<Vertex>> tuples = sample_tuples(space, total_points, rng);
      for (const Rational& r : rates) {
        PowerCache cache(r);
        std::vector<std::vector<EmbeddingVector>> xi(space.arity());
        for (std::size_t f = 0; f < space.arity(); ++f)
          for (Vertex v = 0; v < sep.factors[f].size(); ++v)
            xi[f].push_back(explicit_embedding(sep.factors[f], families[f], r, v));
        for (std::size_t i = 0; i < tuples.size(); ++i) {
          for (std::size_t j = i; j < tuples.size(); ++j) {
            std::vector<Rational> factor_inners;
            for (std::size_t f = 0; f < space.arity(); ++f)
              factor_inners.push_back(
                  embedding_inner(xi[f][tuples[i][f]], xi[f][tuples[j][f]], &cache));
            const Rational lhs = tensor_inner(factor_inners);
            const Rational rhs = cache.pow(product_da(sep, tuples[i], tuples[j]));
            ++tensor_pairs;
            if (lhs != rhs) {
              result.pass = false;
              if (first_mismatch.empty()) first_mismatch = "tensor pair mismatch";
            }
          }
        }
      }
    }
    result.evidence = {{"pairs_checked", pairs},
                       {"tensor_pairs_checked", tensor_pairs},
                       {"rates", rates.size()},
                       {"exact", result.pass}};
    if (!first_mismatch.empty()) result.evidence["first_mismatch"] = first_mismatch;
    result.seconds = timer.seconds();
    return result;
  }

  // Numeric side: Gram(r^{d_a}) PSD, projected CND form of d_a PSD,
  // Schoenberg grid, all within -tol * scale.
  CheckResult psd_cnd_schoenberg() {
    detail::Stopwatch timer;
    CheckResult result;
    result.name = "psd_cnd_schoenberg";
    const auto grid = detail::schoenberg_grid();
    double worst_margin = 0.0;  // most negative (min_eig + tol), should stay >= 0
    std::size_t spectra = 0;
    std::mt19937_64 rng(opt_.seed ^ 0xC0FFEEULL);
    auto note = [&](const SpectrumReport& s) {
      worst_margin = std::min(worst_margin, s.min_eigenvalue + s.tolerance);
      if (!s.psd) result.pass = false;
      ++spectra;
    };
    auto run_graph = [&](const Graph& g) {
      std::uniform_int_distribution<Vertex> pick(0, g.vertex_count() - 1);
      const Vertex second = pick(rng);
      for (Vertex a : std::vector<Vertex>{0, second}) {
        const SeparationTable table(g, a);
        for (int k = 1; k <= 9; ++k)
          note(psd_check(gram_power_kernel(table, 0.1 * k).entries, opt_.tol));
        SymMatrix psi(g.vertex_count());
        for (Vertex x = 0; x < g.vertex_count(); ++x)
          for (Vertex y = x; y < g.vertex_count(); ++y)
            psi.set(x, y, static_cast<double>(table.semimetric(x, y)));
        const CndReport cnd = cnd_check(psi, opt_.tol);
        note(cnd.projected);
        for (const SchoenbergPoint& p : schoenberg_scan(psi, grid, opt_.tol)) note(p.spectrum);
      }
    };
    for (const Graph& g : corpus_.trees) run_graph(g);
    for (const Graph& g : corpus_.quasi_trees) run_graph(g);

    for (const ProductSpace& space : corpus_.products) {
      const ProductSeparation sep(space);
      std::size_t total = 1;
      for (const auto& t : sep.factors) total *= t.size();
      const auto tuples = sample_tuples(space, total, rng, 48, 48);
      SymMatrix psi(tuples.size());
      for (std::size_t i = 0; i < tuples.size(); ++i)
        for (std::size_t j = i; j < tuples.size(); ++j)
          psi.set(i, j, static_cast<double>(product_da(sep, tuples[i], tuples[j])));
      note(cnd_check(psi, opt_.tol).projected);
    }
    result.evidence = {{"spectra_checked", spectra}, {"worst_margin", worst_margin}};
    result.seconds = timer.seconds();
    return result;
  }

  // <v,v> >= sum v^2 (and strictly positive for v != 0) on random mean-zero
  // vectors across representative instances.
  CheckResult gns_positivity() {
    detail::Stopwatch timer;
    CheckResult result;
    result.name = "gns_positivity";
    double min_margin = 0.0;
    std::size_t vectors = 0;
    std::mt19937_64 rng(opt_.seed ^ 0x90517ULL);
    auto run_form = [&](const GnsForm& form) {
      if (!form.certificate().pass) result.pass = false;
      for (std::size_t k = 0; k < prof_.positivity_vectors; ++k) {
        const MeanZeroVector v = random_mean_zero(form.points(), rng);
        const double q = gns_inner(v, v, form);
        const double ssq = v.sum_of_squares();
        const double margin = q - ssq;
        min_margin = std::min(min_margin, margin);
        if (margin < -opt_.tol * std::max(1.0, ssq) || q <= 0.0) result.pass = false;
        ++vectors;
      }
    };
    run_form(semimetric_form(corpus_.trees.front(), 0));
    run_form(semimetric_form(corpus_.quasi_trees.front(), 0));
    run_form(semimetric_form(corpus_.cycle6, 0));
    run_form(product_form(corpus_.products.front(), rng));
    run_form(load_weak_haagerup(make_z_instance(8), opt_.tol, opt_.seed).form);
    result.evidence = {{"vectors_checked", vectors}, {"min_margin", min_margin}};
    result.seconds = timer.seconds();
    return result;
  }

  // Sampled operator ratios against 1 + sqrt(delta_x) on the action corpus.
  CheckResult rep_bound() {
    detail::Stopwatch timer;
    CheckResult result;
    result.name = "rep_bound";
    result.evidence["actions"] = ordered_json::array();
    for (auto& [name, bundle] : action_bundles()) {
      const RepBoundReport report =
          rep_bound_report(bundle.act(), bundle.words, bundle.form, prof_.rep_vectors,
                           opt_.seed ^ std::hash<std::string>{}(name), bundle.delta_x, opt_.tol);
      rep_bound_c_[name] = std::max(report.max_ratio, 1.0);
      if (!report.pass) result.pass = false;
      result.evidence["actions"].push_back({{"name", name},
                                            {"max_ratio", report.max_ratio},
                                            {"bound", report.bound},
                                            {"defect", report.defect},
                                            {"delta_x", bundle.delta_x ? *bundle.delta_x : -1.0},
                                            {"vectors", report.vectors_sampled},
                                            {"pass", report.pass}});
    }
    result.seconds = timer.seconds();
    return result;
  }

  // Cocycle identity, inverse identity, the exact norm formula, and the
  // free-group properness envelope.
  CheckResult cocycle() {
    detail::Stopwatch timer;
    CheckResult result;
    result.name = "cocycle";
    result.evidence["actions"] = ordered_json::array();
    for (auto& [name, bundle] : action_bundles(true)) {
      const WordEnumeration& words = bundle.words;  // cap = cocycle_cap here
      const Verdict identity = cocycle_identity_check(bundle.act(), words);
      const Verdict inverse = cocycle_inverse_check(bundle.act(), words);
      const CocycleNormReport norms =
          cocycle_norm_check(bundle.act(), words, bundle.form, 1e-12);
      if (!identity.pass || !inverse.pass || !norms.pass) result.pass = false;
      result.evidence["actions"].push_back({{"name", name},
                                            {"elements", words.elements.size()},
                                            {"identity", identity.pass},
                                            {"inverse", inverse.pass},
                                            {"norm_max_dev", norms.max_abs_dev}});
    }

    // free-group lower envelope out to the full exploration radius
    FreeGroupTreeAction free_action(2, prof_.free_radius);
    const GnsForm form = form_from_metric(free_action, opt_.tol, opt_.seed);
    const WordEnumeration words = enumerate_elements(free_action, prof_.free_radius);
    const PropernessReport prop = properness_report(free_action, words, form);
    bool envelope_exact = prop.lower_envelope_strictly_increasing;
    ordered_json rows = ordered_json::array();
    for (const auto& row : prop.rows) {
      const double expected = row.length == 0
                                  ? 0.0
                                  : std::sqrt(2.0 * row.length + 2.0) + 2.0;
      if (row.count == 0 || std::fabs(row.min_norm - expected) > 1e-12 ||
          std::fabs(row.max_norm - expected) > 1e-12)
        envelope_exact = false;
      rows.push_back({{"length", row.length},
                      {"count", row.count},
                      {"min", row.min_norm},
                      {"max", row.max_norm}});
    }
    if (!envelope_exact) result.pass = false;
    result.evidence["free_group_envelope"] = std::move(rows);
    result.evidence["free_group_envelope_exact"] = envelope_exact;
    result.seconds = timer.seconds();
    return result;
  }

  // Monte-Carlo witness of the L1 isometry on random vectors.
  CheckResult l1_witness_check() {
    detail::Stopwatch timer;
    CheckResult result;
    result.name = "l1_witness";
    std::mt19937_64 rng(opt_.seed ^ 0x11abcdULL);
    std::vector<GnsForm> forms;
    forms.push_back(semimetric_form(corpus_.trees.front(), 0));
    forms.push_back(semimetric_form(corpus_.quasi_trees.front(), 0));
    forms.push_back(semimetric_form(corpus_.cycle6, 0));
    double max_pull = 0.0;  // |estimate - target| / stderr
    std::size_t vectors = 0;
    for (std::size_t k = 0; k < prof_.witness_vectors; ++k) {
      const GnsForm& form = forms[k % forms.size()];
      const MeanZeroVector v = random_mean_zero(form.points(), rng);
      const L1WitnessReport report = l1_witness(v, form, prof_.witness_samples, rng());
      if (!report.within_3se) result.pass = false;
      if (report.stderr_h > 0.0)
        max_pull = std::max(max_pull, std::fabs(report.estimate_h - report.target_h) / report.stderr_h);
      ++vectors;
    }
    result.evidence = {{"vectors", vectors},
                       {"samples_each", prof_.witness_samples},
                       {"max_pull_sigma", max_pull}};
    result.seconds = timer.seconds();
    return result;
  }

  // The integer instance end to end: load, certify, bound constant 1, exact
  // cocycle norms, tight properness lower bound.
  CheckResult weak_haagerup() {
    detail::Stopwatch timer;
    CheckResult result;
    result.name = "weak_haagerup";
    const WeakHaagerupData data = make_z_instance(8);
    const WeakHaagerupLoad load = load_weak_haagerup(data, opt_.tol, opt_.seed);
    const TranslationWindowAction action = make_window_action(data);
    double max_norm_dev = 0.0;
    double min_bound_margin = 0.0;  // ||b(n)||_E - (sqrt(2(phi(n)-phi(e))+2)+2)
    for (std::int64_t n = -8; n <= 8; ++n) {
      const MeanZeroVector b =
          MeanZeroVector::delta_diff(action.id_of(n), action.basepoint());
      const double actual = e_norm(b, load.form).e_norm;
      const double expected = n == 0 ? 0.0 : std::sqrt(2.0 * std::llabs(n) + 2.0) + 2.0;
      max_norm_dev = std::max(max_norm_dev, std::fabs(actual - expected));
      if (n != 0) {
        const double lower =
            std::sqrt(2.0 * (data.phi.at(n) - load.phi_at_identity) + 2.0) + 2.0;
        min_bound_margin = std::min(min_bound_margin, actual - lower);
      }
    }
    const bool norms_exact = max_norm_dev == 0.0;
    if (!load.form.certificate().pass || load.bound_constant != 1.0 || !norms_exact ||
        !load.properness_bound.pass || !load.properness_bound_tight ||
        min_bound_margin < -opt_.tol)
      result.pass = false;
    result.evidence = {{"cnd", certificate_to_json(load.form.certificate())},
                       {"bound_constant", load.bound_constant},
                       {"norms_exact", norms_exact},
                       {"max_norm_dev", max_norm_dev},
                       {"properness_bound", load.properness_bound.pass},
                       {"properness_bound_tight", load.properness_bound_tight},
                       {"norm_lower_bound_margin", min_bound_margin},
                       {"pairs_validated", load.pairs_validated}};
    result.seconds = timer.seconds();
    return result;
  }

  // Displacement identity and two-sided envelope bounds with the constant
  // observed by rep_bound.
  CheckResult coarse_embedding() {
    detail::Stopwatch timer;
    CheckResult result;
    result.name = "coarse_embedding";
    result.evidence["actions"] = ordered_json::array();
    for (auto& [name, bundle] : action_bundles()) {
      if (!rep_bound_c_.count(name)) {
        const RepBoundReport report =
            rep_bound_report(bundle.act(), bundle.words, bundle.form, prof_.rep_vectors,
                             opt_.seed ^ std::hash<std::string>{}(name), bundle.delta_x, opt_.tol);
        rep_bound_c_[name] = std::max(report.max_ratio, 1.0);
      }
      const std::uint32_t pair_cap = prof_.coarse_pair_cap;
      const WordEnumeration words = enumerate_elements(bundle.act(), 2 * pair_cap);
      const CoarseEnvelopeReport report =
          coarse_envelopes(bundle.act(), words, bundle.form, rep_bound_c_[name], pair_cap, opt_.tol);
      if (!report.displacement_exact || !report.bounds_hold) result.pass = false;
      ordered_json rows = ordered_json::array();
      for (const auto& row : report.rows)
        if (row.count > 0)
          rows.push_back({{"length", row.length},
                          {"count", row.count},
                          {"rho_minus", row.rho_minus},
                          {"rho_plus", row.rho_plus}});
      result.evidence["actions"].push_back({{"name", name},
                                            {"displacement_exact", report.displacement_exact},
                                            {"bounds_hold", report.bounds_hold},
                                            {"c_used", rep_bound_c_[name]},
                                            {"pairs", report.pairs_checked},
                                            {"rows", std::move(rows)}});
    }
    result.seconds = timer.seconds();
    return result;
  }

  std::vector<CheckResult> run_all() {
    std::vector<CheckResult> checks;
    checks.push_back(tree_identity());
    checks.push_back(sandwich());
    checks.push_back(separation_laws());
    checks.push_back(gram_identity());
    checks.push_back(psd_cnd_schoenberg());
    checks.push_back(gns_positivity());
    checks.push_back(rep_bound());
    checks.push_back(cocycle());
    checks.push_back(l1_witness_check());
    checks.push_back(weak_haagerup());
    checks.push_back(coarse_embedding());
    return checks;
  }

 private:
  struct ActionBundle {
    std::unique_ptr<Action> action;
    GnsForm form;
    WordEnumeration words;
    std::optional<double> delta_x;
    const Action* borrowed = nullptr;  // set instead of `action` for shared instances

    const Action& act() const { return action ? *action : *borrowed; }
  };

  GnsForm semimetric_form(const Graph& g, Vertex a) {
    auto table = std::make_shared<SeparationTable>(g, a);
    std::vector<std::uint32_t> points(g.vertex_count());
    for (Vertex v = 0; v < g.vertex_count(); ++v) points[v] = v;
    return GnsForm::certified(
        std::move(points),
        [table](Vertex x, Vertex y) { return static_cast<double>(table->semimetric(x, y)); },
        opt_.tol, opt_.seed);
  }

  GnsForm product_form(const ProductSpace& space, std::mt19937_64& rng) {
    auto sep = std::make_shared<ProductSeparation>(space);
    std::size_t total = 1;
    std::vector<Vertex> sizes;
    for (const auto& t : sep->factors) {
      total *= t.size();
      sizes.push_back(t.size());
    }
    const auto tuples = sample_tuples(space, total, rng, 40, 40);
    std::vector<std::uint32_t> ids;
    for (const auto& tuple : tuples) {
      std::uint32_t id = 0;
      for (std::size_t f = 0; f < tuple.size(); ++f) id = id * sizes[f] + tuple[f];
      ids.push_back(id);
    }
    auto decode = [sizes](std::uint32_t id) {
      std::vector<Vertex> tuple(sizes.size());
      for (std::size_t f = sizes.size(); f-- > 0;) {
        tuple[f] = id % sizes[f];
        id /= sizes[f];
      }
      return tuple;
    };
    return GnsForm::certified(
        std::move(ids),
        [sep, decode](std::uint32_t x, std::uint32_t y) {
          return static_cast<double>(product_da(*sep, decode(x), decode(y)));
        },
        opt_.tol, opt_.seed);
  }

  // All tuples when the product has at most enumerate_cap points, otherwise
  // a seeded sample of sample_count.
  static std::vector<std::vector<Vertex>> sample_tuples(const ProductSpace& space,
                                                        std::size_t total, std::mt19937_64& rng,
                                                        std::size_t enumerate_cap = 100,
                                                        std::size_t sample_count = 20) {
    std::vector<std::vector<Vertex>> tuples;
    if (total <= enumerate_cap) {
      std::vector<Vertex> tuple(space.arity(), 0);
      while (true) {
        tuples.push_back(tuple);
        std::size_t f = space.arity();
        while (f > 0) {
          --f;
          if (++tuple[f] < space.factors[f].vertex_count()) break;
          tuple[f] = 0;
          if (f == 0) return tuples;
        }
      }
    }
    for (std::size_t k = 0; k < sample_count; ++k) {
      std::vector<Vertex> tuple;
      for (const Graph& g : space.factors) {
        std::uniform_int_distribution<Vertex> pick(0, g.vertex_count() - 1);
        tuple.push_back(pick(rng));
      }
      tuples.push_back(tuple);
    }
    return tuples;
  }

  // The action corpus: cycle rotation, two reflection groups, the free
  // group, and (for cocycle checks) the weak-Haagerup window. The graph
  // actions enumerate far enough to classify s^-1 t for the coarse pairs;
  // the free group keeps the smaller cocycle cap and the coarse check builds
  // its own deeper enumeration of cheap elements.
  std::vector<std::pair<std::string, ActionBundle>>& action_bundles(bool with_window = false) {
    if (bundles_.empty()) {
      auto add_graph_action = [&](const std::string& name, const Graph& g,
                                  std::vector<std::pair<std::string, std::vector<Vertex>>> gens,
                                  Vertex basepoint) {
        auto action = std::make_unique<GraphAutomorphismAction>(g, std::move(gens), basepoint);
        auto table = std::make_shared<SeparationTable>(g, basepoint);
        GnsForm form = form_from_separation(*action, table, opt_.tol, opt_.seed);
        const double delta_x = sandwich_check(g, opt_.cap).delta_x;
        WordEnumeration words = enumerate_elements(*action, 2 * prof_.coarse_pair_cap);
        bundles_.emplace_back(
            name, ActionBundle{std::move(action), std::move(form), std::move(words), delta_x});
      };

      {
        const Vertex n = corpus_.cycle6.vertex_count();
        std::vector<Vertex> rot(n);
        for (Vertex v = 0; v < n; ++v) rot[v] = (v + 1) % n;
        add_graph_action("cycle6_rotation", corpus_.cycle6, {{"r", std::move(rot)}}, 0);
      }
      {
        std::vector<Vertex> r1(8), r2(8);
        for (Vertex v = 0; v < 8; ++v) {
          r1[v] = (8 - v) % 8;
          r2[v] = (12 - v) % 8;  // v -> 4 - v mod 8
        }
        add_graph_action("theta_reflections", corpus_.theta,
                         {{"s", std::move(r1)}, {"t", std::move(r2)}}, 1);
      }
      {
        std::vector<Vertex> flip(7);
        for (Vertex v = 0; v < 7; ++v) flip[v] = 6 - v;
        add_graph_action("path7_reflection", corpus_.path7, {{"f", std::move(flip)}}, 0);
      }
      {
        auto action = std::make_unique<FreeGroupTreeAction>(2, prof_.free_radius);
        GnsForm form = form_from_metric(*action, opt_.tol, opt_.seed);
        WordEnumeration words = enumerate_elements(*action, prof_.cocycle_cap);
        bundles_.emplace_back("free_rank2", ActionBundle{std::move(action), std::move(form),
                                                         std::move(words), 0.0});
      }
    }
    if (!with_window) return bundles_;
    if (bundles_with_window_.empty()) {
      for (auto& [name, bundle] : bundles_) {
        WordEnumeration words = enumerate_elements(bundle.act(), prof_.cocycle_cap);
        bundles_with_window_.emplace_back(
            name, ActionBundle{nullptr, bundle.form, std::move(words), bundle.delta_x});
        bundles_with_window_.back().second.borrowed = bundle.action.get();
      }
      const WeakHaagerupData data = make_z_instance(8);
      WeakHaagerupLoad load = load_weak_haagerup(data, opt_.tol, opt_.seed);
      auto action = std::make_unique<TranslationWindowAction>(data.elements.front(),
                                                              data.elements.back());
      WordEnumeration words = enumerate_elements(*action, prof_.cocycle_cap);
      bundles_with_window_.emplace_back(
          "z_translation",
          ActionBundle{std::move(action), std::move(load.form), std::move(words), std::nullopt});
    }
    return bundles_with_window_;
  }

  CorpusOptions opt_;
  SizeProfile prof_;
  Corpus corpus_;
  std::map<std::string, double> rep_bound_c_;
  std::vector<std::pair<std::string, ActionBundle>> bundles_;
  std::vector<std::pair<std::string, ActionBundle>> bundles_with_window_;
};

}  // namespace qtk
