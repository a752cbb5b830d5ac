#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pdfp::cli {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

// Where the problem comes from and how it is regularized.
struct ProblemSpec {
  std::string gen;          // "lasso" | "logistic" | "" (use data / problem file)
  std::string data;         // LIBSVM file
  std::string problem;      // JSON {"A": [[..]], "b": [..]} least-squares instance
  std::string loss = "logistic";  // loss for --data files
  std::size_t m = 50;
  std::size_t q = 20;
  double sparsity = 0.25;
  double noise = 0.0;
  std::optional<double> tau;  // default depends on the loss
  bool map_labels = false;
  std::uint64_t seed = 1;
};

struct SolveConfig {
  ProblemSpec problem;
  std::string algo = "spdfp2o";
  std::string gamma = "auto";
  std::string lambda = "auto";
  std::size_t batches = 3;
  std::string partition = "contiguous";
  std::string graph = "ring";  // ring | star | complete | er | path to an edge list
  std::size_t nodes = 5;
  double edge_prob = 0.5;
  std::string sampler = "uniform";  // uniform | full | independent:<p> | weighted:<w0,w1,..>
  std::optional<std::uint64_t> sampler_seed;
  double tol = 1e-8;
  std::size_t max_iters = 100000;
  std::size_t log_every = 1;
  std::string trace;
  std::string result;
};

// Overwrites the fields named in `j` (keys use the long flag names).
void apply_json(SolveConfig& cfg, const nlohmann::json& j);

struct SolveOutcome {
  int exit_code = kExitError;
  std::string summary;
};

// Runs one solve end to end: builds the problem, resolves and validates the
// step sizes, iterates, writes the trace / result files and returns the exit
// code with the printable summary. Errors are reported in the summary.
SolveOutcome run_solve(const SolveConfig& cfg);

int cmd_oracle(const ProblemSpec& spec, double tol, std::size_t max_iter, const std::string& out,
               std::ostream& os);
int cmd_gen(const ProblemSpec& spec, const std::string& out, std::ostream& os);
int cmd_graph_gen(const std::string& kind, std::size_t n, double p, std::uint64_t seed,
                  const std::string& out, std::ostream& os);
int cmd_bench(const std::string& config_path, std::size_t jobs, std::ostream& os);
int cmd_compare(const std::vector<std::string>& traces, const std::string& oracle,
                double gap_tol, double consensus_tol, std::ostream& os);

}  // namespace pdfp::cli
