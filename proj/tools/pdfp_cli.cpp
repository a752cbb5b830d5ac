// pdfp: command-line front end for the primal-dual fixed-point solvers.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_commands.hpp"
#include "pdfp/errors.hpp"

namespace {

using namespace pdfp::cli;

void add_problem_options(CLI::App* app, ProblemSpec& p, bool with_source) {
  if (with_source) {
    app->add_option("--gen", p.gen, "Synthetic problem kind: lasso | logistic");
    app->add_option("--data", p.data, "LIBSVM dataset file");
    app->add_option("--problem", p.problem, "JSON least-squares instance {\"A\", \"b\", \"tau\"}");
    app->add_option("--loss", p.loss, "Loss for --data: lasso | logistic");
    app->add_flag("--map-labels", p.map_labels, "Map labels {0,1} to {-1,+1}");
    app->add_option("--tau", p.tau, "l1 weight (default 1 for lasso, 0.01 for logistic)");
  }
  app->add_option("--m,--p", p.m, "Number of samples (rows)");
  app->add_option("--q", p.q, "Number of features");
  app->add_option("--sparsity", p.sparsity, "Fraction of nonzeros in the ground truth");
  app->add_option("--noise", p.noise, "Noise standard deviation");
  app->add_option("--seed", p.seed, "Random seed (default: $PDFP_SEED or 1)");
}

std::uint64_t env_seed() {
  if (const char* s = std::getenv("PDFP_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw pdfp::ConfigError(std::string("PDFP_SEED is not an integer: ") + s);
    }
  }
  return 1;
}

// Finds "--config <path>" / "--config=<path>" ahead of the real parse so the
// file can seed the defaults that flags then override.
std::string find_config(int argc, char** argv) {
  if (argc < 2 || std::string(argv[1]) != "solve") return {};
  for (int i = 2; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

int run(int argc, char** argv) {
  CLI::App app{"Primal-dual fixed-point solvers for f(x) + g(x) + h(Dx)"};
  app.require_subcommand(1);

  SolveConfig cfg;
  cfg.problem.seed = env_seed();
  if (const std::string path = find_config(argc, argv); !path.empty()) {
    std::ifstream f(path);
    if (!f) throw pdfp::ConfigError("cannot open config file " + path);
    try {
      apply_json(cfg, nlohmann::json::parse(f));
    } catch (const nlohmann::json::parse_error& e) {
      throw pdfp::ConfigError("config file " + path + ": " + e.what());
    }
  }
  std::string config_path;

  auto* solve = app.add_subcommand("solve", "Run one solver");
  solve->add_option("--config", config_path, "JSON config; command-line flags take precedence");
  add_problem_options(solve, cfg.problem, true);
  solve->add_option("--algo", cfg.algo,
                    "pdfp2o | spdfp2o | minibatch | smspdfp2o | dist-sync | dist-async");
  solve->add_option("--gamma", cfg.gamma, "Primal step or 'auto' (1/L)");
  solve->add_option("--lambda", cfg.lambda, "Dual step or 'auto' (the upper bound)");
  solve->add_option("--batches", cfg.batches, "Number of batches (minibatch modes)");
  solve->add_option("--partition", cfg.partition, "contiguous | strided | random");
  solve->add_option("--graph", cfg.graph, "ring | star | complete | er | <edge-list file>");
  solve->add_option("--nodes", cfg.nodes, "Node count for generated graphs");
  solve->add_option("--edge-prob", cfg.edge_prob, "Edge probability for er graphs");
  solve->add_option("--sampler", cfg.sampler,
                    "uniform | full | independent:<p> | weighted:<w0,w1,...>");
  solve->add_option("--sampler-seed", cfg.sampler_seed, "Sampler seed (default: --seed)");
  solve->add_option("--tol", cfg.tol, "Stop when the fixed-point residual is <= tol");
  solve->add_option("--max-iters", cfg.max_iters, "Iteration limit");
  solve->add_option("--log-every", cfg.log_every, "Trace every k-th iteration");
  solve->add_option("--trace", cfg.trace, "Trace CSV output");
  solve->add_option("--result", cfg.result, "Result JSON output");

  ProblemSpec oracle_spec;
  oracle_spec.seed = cfg.problem.seed;
  double oracle_tol = 1e-10;
  std::size_t oracle_iters = 1000000;
  std::string oracle_out;
  auto* oracle = app.add_subcommand("oracle", "Reference proximal-gradient solution");
  add_problem_options(oracle, oracle_spec, true);
  oracle->add_option("--tol", oracle_tol, "Certificate tolerance");
  oracle->add_option("--max-iters", oracle_iters, "Iteration limit");
  oracle->add_option("--out", oracle_out, "JSON output (stdout when omitted)");

  ProblemSpec gen_spec;
  gen_spec.seed = cfg.problem.seed;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Write a synthetic dataset (LIBSVM + JSON sidecar)");
  gen->add_option("kind", gen_spec.gen, "lasso | logistic")->required();
  add_problem_options(gen, gen_spec, false);
  gen->add_option("--out", gen_out, "Output path")->required();

  std::string graph_kind = "ring", graph_out;
  std::size_t graph_n = 5;
  double graph_p = 0.5;
  std::uint64_t graph_seed = cfg.problem.seed;
  auto* ggen = app.add_subcommand("graph-gen", "Write a communication graph edge list");
  ggen->add_option("--kind", graph_kind, "ring | star | complete | er");
  ggen->add_option("--n", graph_n, "Node count");
  ggen->add_option("--p", graph_p, "Edge probability (er)");
  ggen->add_option("--seed", graph_seed, "Random seed");
  ggen->add_option("--out", graph_out, "Output path (stdout when omitted)");

  std::string bench_config;
  std::size_t bench_jobs = 0;
  auto* bench = app.add_subcommand("bench", "Run a set of solves in parallel");
  bench->add_option("--config", bench_config, "JSON {\"defaults\": {...}, \"runs\": [...]}")
      ->required();
  bench->add_option("--jobs", bench_jobs, "Worker threads (0 = hardware concurrency)");

  std::vector<std::string> traces;
  std::string cmp_oracle;
  double gap_tol = 1e-4, cons_tol = 1e-4;
  auto* compare = app.add_subcommand("compare", "Compare traces against an oracle");
  compare->add_option("traces", traces, "Trace CSV files");
  compare->add_option("--oracle", cmp_oracle, "Oracle JSON")->required();
  compare->add_option("--gap-tol", gap_tol, "Relative objective gap threshold");
  compare->add_option("--consensus-tol", cons_tol, "Consensus residual threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitConverged : kExitError;
  }

  if (*solve) {
    const SolveOutcome o = run_solve(cfg);
    (o.exit_code == kExitError ? std::cerr : std::cout) << o.summary;
    return o.exit_code;
  }
  if (*oracle) return cmd_oracle(oracle_spec, oracle_tol, oracle_iters, oracle_out, std::cout);
  if (*gen) return cmd_gen(gen_spec, gen_out, std::cout);
  if (*ggen) return cmd_graph_gen(graph_kind, graph_n, graph_p, graph_seed, graph_out, std::cout);
  if (*bench) return cmd_bench(bench_config, bench_jobs, std::cout);
  if (*compare) return cmd_compare(traces, cmp_oracle, gap_tol, cons_tol, std::cout);
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pdfp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const pdfp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
