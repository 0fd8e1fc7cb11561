#pragma once

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "qtk/corpus.hpp"
#include "qtk/json_io.hpp"

namespace qtk {

// Exit-code contract: 0 pass, 1 verdict failure, 2 usage error, 3 cap
// exceeded.
inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SizeCapExceeded:
    case ErrorCode::ExplorationExceeded:
      return 3;
    case ErrorCode::NoConvergence:
    case ErrorCode::NegativeSelfInner:
    case ErrorCode::DegenerateForm:
      return 1;
    default:
      return 2;
  }
}

struct RunConfig {
  std::string command;  // kernel | certify | gns | action | corpus
  std::string graph_path;
  std::string action_path;
  std::string vector_path;
  std::string weak_haagerup_path;
  std::string out_path;
  std::uint64_t seed = 424242;
  double tol = 1e-9;
  std::uint32_t cap = 64;
  Vertex basepoint = 0;
  bool all_basepoints = false;
  std::string rate = "1/2";
  std::size_t witness_samples = 0;  // 0 = skip the witness block
  std::string sizes = "small";
  bool timing = false;
};

struct RunResult {
  int exit_code = 0;
  ordered_json report;
};

namespace detail {

inline ordered_json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidConfig, "cannot open '" + path + "'");
  try {
    return ordered_json::parse(in);
  } catch (const std::exception& e) {
    fail(ErrorCode::InvalidConfig, "json parse failure in '" + path + "': " + e.what());
  }
}

inline ordered_json config_echo(const RunConfig& config) {
  ordered_json j;
  j["command"] = config.command;
  j["seed"] = config.seed;
  j["tol"] = config.tol;
  j["cap"] = config.cap;
  if (!config.graph_path.empty()) j["graph"] = config.graph_path;
  if (!config.action_path.empty()) j["action"] = config.action_path;
  if (!config.vector_path.empty()) j["vector"] = config.vector_path;
  if (!config.weak_haagerup_path.empty()) j["weak_haagerup"] = config.weak_haagerup_path;
  if (config.command == "kernel") {
    j["basepoint"] = config.basepoint;
    j["all_basepoints"] = config.all_basepoints;
  }
  if (config.command == "certify" || config.command == "gns") j["basepoint"] = config.basepoint;
  if (config.command == "certify") j["rate"] = config.rate;
  if (config.command == "gns" && config.witness_samples > 0)
    j["l1_witness_samples"] = config.witness_samples;
  if (config.command == "corpus") j["sizes"] = config.sizes;
  return j;
}

inline ordered_json kernel_basepoint_report(const Graph& g, Vertex a) {
  const SeparationTable table(g, a);
  const BallFamily balls(table);
  // build the tables locally: references into an ordered_json object do not
  // survive later key insertions
  ordered_json r_rows = ordered_json::array(), d_rows = ordered_json::array();
  for (Vertex x = 0; x < g.vertex_count(); ++x) {
    ordered_json r_row = ordered_json::array(), d_row = ordered_json::array();
    for (Vertex y = 0; y < g.vertex_count(); ++y) {
      r_row.push_back(table.separation_radius(x, y));
      d_row.push_back(table.semimetric(x, y));
    }
    r_rows.push_back(std::move(r_row));
    d_rows.push_back(std::move(d_row));
  }
  ordered_json j;
  j["basepoint"] = a;
  j["R"] = std::move(r_rows);
  j["d_a"] = std::move(d_rows);
  j["ultrametric"] = verdict_to_json(ultrametric_check(table));
  j["range"] = verdict_to_json(range_check(table));
  j["ball_equality"] = verdict_to_json(ball_equality_check(table, balls));
  return j;
}

}  // namespace detail

inline RunResult run(const RunConfig& config) {
  RunResult result;
  ordered_json& report = result.report;
  report["schema_version"] = "1.0";
  report["config"] = detail::config_echo(config);
  detail::Stopwatch timer;

  if (config.command == "kernel") {
    const Graph g = graph_from_json(detail::load_json_file(config.graph_path));
    g.check_vertex(config.basepoint);
    const SandwichReport sandwich = sandwich_check(g, config.cap);
    report["sandwich"] = sandwich_to_json(sandwich);
    ordered_json per_basepoint = ordered_json::array();
    bool verdicts = sandwich.pass();
    if (config.all_basepoints) {
      for (Vertex a = 0; a < g.vertex_count(); ++a)
        per_basepoint.push_back(detail::kernel_basepoint_report(g, a));
    } else {
      per_basepoint.push_back(detail::kernel_basepoint_report(g, config.basepoint));
    }
    for (const auto& b : per_basepoint)
      verdicts = verdicts && b["ultrametric"]["pass"].get<bool>() &&
                 b["range"]["pass"].get<bool>() && b["ball_equality"]["pass"].get<bool>();
    report["basepoints"] = std::move(per_basepoint);
    {
      // informational: is the plain edge-path distance still CND here?
      const DistanceMatrix dist(g);
      SymMatrix psi(g.vertex_count());
      for (Vertex x = 0; x < g.vertex_count(); ++x)
        for (Vertex y = x; y < g.vertex_count(); ++y)
          psi.set(x, y, static_cast<double>(dist(x, y)));
      report["plain_distance_cnd"] = cnd_check(psi, config.tol).cnd;
    }
    report["pass"] = verdicts;
    result.exit_code = verdicts ? 0 : 1;

  } else if (config.command == "certify") {
    const Graph g = graph_from_json(detail::load_json_file(config.graph_path));
    g.check_vertex(config.basepoint);
    const Rational r = parse_rational(config.rate);
    if (!(r > 0 && r < 1)) fail(ErrorCode::RateOutOfRange, "rate must lie in (0,1)");
    const SeparationTable table(g, config.basepoint);
    const BallFamily balls(table);
    const GramIdentityReport gram = gram_identity_check(table, balls, r);
    report["gram_identity"] = gram.exact ? "exact" : "fail";
    report["gram_pairs"] = gram.pairs_checked;
    if (!gram.exact) report["gram_first_mismatch"] = gram.first_mismatch;
    const double r_double = static_cast<double>(boost::multiprecision::numerator(r)) /
                            static_cast<double>(boost::multiprecision::denominator(r));
    report["psd"] = spectrum_to_json(psd_check(gram_power_kernel(table, r_double).entries, config.tol));
    SymMatrix psi(g.vertex_count());
    for (Vertex x = 0; x < g.vertex_count(); ++x)
      for (Vertex y = x; y < g.vertex_count(); ++y)
        psi.set(x, y, static_cast<double>(table.semimetric(x, y)));
    report["cnd"] = cnd_to_json(cnd_check(psi, config.tol));
    ordered_json scan = ordered_json::array();
    bool scan_pass = true;
    for (const SchoenbergPoint& p : schoenberg_scan(psi, detail::schoenberg_grid(), config.tol)) {
      scan.push_back({{"t", p.t}, {"psd", p.spectrum.psd}, {"min_eigenvalue", p.spectrum.min_eigenvalue}});
      scan_pass = scan_pass && p.spectrum.psd;
    }
    report["schoenberg"] = std::move(scan);
    const bool pass = gram.exact && report["psd"]["psd"].get<bool>() &&
                      report["cnd"]["cnd"].get<bool>() && scan_pass;
    report["pass"] = pass;
    result.exit_code = pass ? 0 : 1;

  } else if (config.command == "gns") {
    const Graph g = graph_from_json(detail::load_json_file(config.graph_path));
    g.check_vertex(config.basepoint);
    const MeanZeroVector v = vector_from_json(detail::load_json_file(config.vector_path));
    auto table = std::make_shared<SeparationTable>(g, config.basepoint);
    std::vector<std::uint32_t> points(g.vertex_count());
    for (Vertex p = 0; p < g.vertex_count(); ++p) points[p] = p;
    const GnsForm form = GnsForm::certified(
        std::move(points),
        [table](Vertex x, Vertex y) { return static_cast<double>(table->semimetric(x, y)); },
        config.tol, config.seed);
    report["cnd_certificate"] = certificate_to_json(form.certificate());
    const double self = gns_inner(v, v, form);
    const ENormValue norms = e_norm(v, form);
    report["gns_self_inner"] = self;
    report["h_norm"] = norms.h_norm;
    report["l1_norm"] = norms.l1_norm;
    report["e_norm"] = norms.e_norm;
    bool pass = form.certificate().pass && self >= v.sum_of_squares() - config.tol;
    if (config.witness_samples > 0) {
      if (config.witness_samples < 1000)
        fail(ErrorCode::InvalidConfig, "l1 witness needs at least 1000 samples");
      const L1WitnessReport w = l1_witness(v, form, config.witness_samples, config.seed);
      report["l1_witness"] = {{"estimate_h", w.estimate_h}, {"stderr_h", w.stderr_h},
                              {"target_h", w.target_h},     {"estimate_e", w.estimate_e},
                              {"target_e", w.target_e},     {"samples", w.samples},
                              {"within_3se", w.within_3se}};
      pass = pass && w.within_3se;
    }
    report["pass"] = pass;
    result.exit_code = pass ? 0 : 1;

  } else if (config.command == "action" && !config.weak_haagerup_path.empty()) {
    // (phi, R, S) pipeline: validate, certify the squared-difference kernel,
    // and run the cocycle checks over the translation window
    const WeakHaagerupData data = wh_from_json(detail::load_json_file(config.weak_haagerup_path));
    const WeakHaagerupLoad load = load_weak_haagerup(data, config.tol, config.seed);
    const TranslationWindowAction action = make_window_action(data);
    report["cnd_certificate"] = certificate_to_json(load.form.certificate());
    report["bound_constant"] = load.bound_constant;
    report["phi_at_identity"] = load.phi_at_identity;
    report["properness_bound"] = verdict_to_json(load.properness_bound);
    report["properness_bound_tight"] = load.properness_bound_tight;
    // pairs multiply: keep s t inside the window for l(s), l(t) <= cap
    const std::int64_t reach = std::min(-data.elements.front(), data.elements.back());
    const std::uint32_t cap = std::min<std::uint32_t>(4, static_cast<std::uint32_t>(reach / 2));
    const WordEnumeration words = enumerate_elements(action, cap);
    const Verdict identity = cocycle_identity_check(action, words);
    const CocycleNormReport norms = cocycle_norm_check(action, words, load.form, 1e-12);
    report["cocycle_identity"] = verdict_to_json(identity);
    report["cocycle_norm"] = {{"pass", norms.pass}, {"max_abs_dev", norms.max_abs_dev}};
    ordered_json envelope = ordered_json::array();
    const PropernessReport prop = properness_report(action, words, load.form);
    for (const auto& row : prop.rows)
      if (row.count > 0)
        envelope.push_back({{"length", row.length}, {"min_norm", row.min_norm},
                            {"max_norm", row.max_norm}});
    report["properness"] = std::move(envelope);
    const bool pass = load.form.certificate().pass && load.properness_bound.pass &&
                      identity.pass && norms.pass;
    report["pass"] = pass;
    result.exit_code = pass ? 0 : 1;

  } else if (config.command == "action") {
    if (config.action_path.empty())
      fail(ErrorCode::InvalidConfig, "action needs --action or --weak-haagerup");
    std::optional<Graph> g;
    if (!config.graph_path.empty())
      g.emplace(graph_from_json(detail::load_json_file(config.graph_path)));
    ParsedAction parsed =
        action_from_json(detail::load_json_file(config.action_path), g ? &*g : nullptr);
    const Action& action = *parsed.action;
    std::optional<double> delta_x;
    std::optional<GnsForm> form;
    if (parsed.free_group) {
      form.emplace(form_from_metric(action, config.tol, config.seed));
      delta_x = 0.0;  // the kernel is the invariant tree metric
    } else {
      auto table = std::make_shared<SeparationTable>(*g, action.basepoint());
      form.emplace(form_from_separation(action, table, config.tol, config.seed));
      delta_x = static_cast<double>(sandwich_check(*g, config.cap).delta_x);
    }
    report["cnd_certificate"] = certificate_to_json(form->certificate());
    const WordEnumeration words = enumerate_elements(action, parsed.word_cap);
    report["elements"] = words.elements.size();
    const RepBoundReport bound =
        rep_bound_report(action, words, *form, 200, config.seed, delta_x, config.tol);
    report["rep_bound"] = {{"max_ratio", bound.max_ratio}, {"bound", bound.bound},
                           {"defect", bound.defect},       {"pass", bound.pass}};
    const Verdict identity = cocycle_identity_check(action, words);
    const Verdict inverse = cocycle_inverse_check(action, words);
    const CocycleNormReport norms = cocycle_norm_check(action, words, *form, 1e-12);
    report["cocycle_identity"] = verdict_to_json(identity);
    report["cocycle_inverse"] = verdict_to_json(inverse);
    report["cocycle_norm"] = {{"pass", norms.pass}, {"max_abs_dev", norms.max_abs_dev}};
    const PropernessReport prop = properness_report(action, words, *form);
    ordered_json prop_rows = ordered_json::array();
    for (const auto& row : prop.rows)
      if (row.count > 0)
        prop_rows.push_back({{"length", row.length}, {"count", row.count},
                             {"min_norm", row.min_norm}, {"max_norm", row.max_norm}});
    report["properness"] = std::move(prop_rows);
    const std::uint32_t pair_cap = parsed.word_cap / 2;
    ordered_json coarse_json;
    bool coarse_pass = true;
    if (pair_cap >= 1) {
      const CoarseEnvelopeReport coarse = coarse_envelopes(
          action, words, *form, std::max(bound.max_ratio, 1.0), pair_cap, config.tol);
      coarse_pass = coarse.displacement_exact && coarse.bounds_hold;
      coarse_json = {{"displacement_exact", coarse.displacement_exact},
                     {"bounds_hold", coarse.bounds_hold},
                     {"pairs", coarse.pairs_checked},
                     {"c_used", coarse.c_used}};
      report["coarse"] = std::move(coarse_json);
    }
    const bool pass = form->certificate().pass && bound.pass && identity.pass && inverse.pass &&
                      norms.pass && coarse_pass;
    report["pass"] = pass;
    result.exit_code = pass ? 0 : 1;

  } else if (config.command == "corpus") {
    CorpusRunner runner({config.seed, config.sizes, config.tol, config.cap});
    ordered_json checks = ordered_json::array();
    bool pass = true;
    for (CheckResult& check : runner.run_all()) {
      ordered_json c;
      c["name"] = check.name;
      c["pass"] = check.pass;
      c["evidence"] = std::move(check.evidence);
      if (config.timing) c["seconds"] = check.seconds;
      pass = pass && check.pass;
      checks.push_back(std::move(c));
    }
    report["checks"] = std::move(checks);
    report["pass"] = pass;
    result.exit_code = pass ? 0 : 1;

  } else {
    fail(ErrorCode::InvalidConfig, "unknown command '" + config.command + "'");
  }

  if (config.timing) report["timing_seconds"] = timer.seconds();
  return result;
}

inline void emit_report(const RunResult& result, const std::string& out_path) {
  const std::string text = result.report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) fail(ErrorCode::InvalidConfig, "cannot write '" + out_path + "'");
    out << text;
  }
}

}  // namespace qtk
