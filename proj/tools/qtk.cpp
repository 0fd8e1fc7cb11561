// qtk: separation kernels, Hilbert embeddings, GNS norms and group-action
// certificates on quasi-trees, at desk scale.

#include <CLI11.hpp>

#include "qtk/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"quasi-tree kernel verification toolkit"};
  app.require_subcommand(1);

  qtk::RunConfig config;
  app.add_option("--seed", config.seed, "rng seed recorded in every report");
  app.add_option("--tol", config.tol, "relative tolerance for spectral verdicts");
  app.add_option("--cap", config.cap, "vertex cap for exhaustive oracles");
  app.add_option("--out", config.out_path, "write the json report here instead of stdout");
  app.add_flag("--timing", config.timing, "include wall-clock timing in the report");

  // global flags may follow the subcommand
  app.fallthrough();

  auto* kernel = app.add_subcommand("kernel", "separation tables, sandwich bounds, law verdicts");
  kernel->fallthrough();
  kernel->add_option("--graph", config.graph_path, "graph json file")->required();
  kernel->add_option("--basepoint", config.basepoint, "basepoint vertex");
  kernel->add_flag("--all-basepoints", config.all_basepoints, "emit tables for every basepoint");

  auto* certify = app.add_subcommand("certify", "exact Gram identity, PSD/CND/Schoenberg spectra");
  certify->fallthrough();
  certify->add_option("--graph", config.graph_path, "graph json file")->required();
  certify->add_option("--basepoint", config.basepoint, "basepoint vertex");
  certify->add_option("--rate", config.rate, "rational rate p/q in (0,1)");

  auto* gns = app.add_subcommand("gns", "GNS inner products and norms for a vector");
  gns->fallthrough();
  gns->add_option("--graph", config.graph_path, "graph json file")->required();
  gns->add_option("--basepoint", config.basepoint, "basepoint vertex");
  gns->add_option("--vector", config.vector_path, "vector json file")->required();
  gns->add_option("--l1-witness", config.witness_samples, "Monte-Carlo sample count (>= 1000)");

  auto* action = app.add_subcommand("action", "representation bound, cocycle and envelope reports");
  action->fallthrough();
  auto* action_file = action->add_option("--action", config.action_path, "action json file");
  action->add_option("--graph", config.graph_path, "graph json file (for permutation actions)");
  auto* wh_file = action->add_option("--weak-haagerup", config.weak_haagerup_path,
                                     "(phi,R,S) sample json file");
  action_file->excludes(wh_file);

  auto* corpus = app.add_subcommand("corpus", "generate the standard corpus and run every check");
  corpus->fallthrough();
  corpus->add_option("--sizes", config.sizes, "corpus size profile: small | tiny");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (kernel->parsed()) config.command = "kernel";
  if (certify->parsed()) config.command = "certify";
  if (gns->parsed()) config.command = "gns";
  if (action->parsed()) config.command = "action";
  if (corpus->parsed()) config.command = "corpus";

  try {
    const qtk::RunResult result = qtk::run(config);
    qtk::emit_report(result, config.out_path);
    return result.exit_code;
  } catch (const qtk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return qtk::exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
