#include "cli_commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "pdfp/distributed.hpp"
#include "pdfp/errors.hpp"
#include "pdfp/graph.hpp"
#include "pdfp/libsvm.hpp"
#include "pdfp/minibatch.hpp"
#include "pdfp/pdfp.hpp"
#include "pdfp/problems.hpp"
#include "pdfp/reference.hpp"
#include "pdfp/trace.hpp"

namespace pdfp::cli {
namespace {

using nlohmann::json;

constexpr double kDefaultTauLasso = 1.0;
constexpr double kDefaultTauLogistic = 0.01;

struct Instance {
  LossKind kind = LossKind::Quadratic;
  DatasetPtr data;
  double tau = 0.0;
  std::string label;
};

LossKind parse_loss(const std::string& s) {
  if (s == "lasso" || s == "quadratic") return LossKind::Quadratic;
  if (s == "logistic") return LossKind::Logistic;
  throw ConfigError("unknown loss '" + s + "' (expected lasso or logistic)");
}

Instance load_instance(const ProblemSpec& spec) {
  const int sources = !spec.gen.empty() + !spec.data.empty() + !spec.problem.empty();
  if (sources != 1) throw ConfigError("give exactly one of --gen, --data, --problem");
  Instance inst;
  auto ds = std::make_shared<Dataset>();
  if (!spec.gen.empty()) {
    SyntheticSpec s;
    s.kind = parse_loss(spec.gen);
    s.seed = spec.seed;
    s.m = spec.m;
    s.q = spec.q;
    s.sparsity = spec.sparsity;
    s.noise = spec.noise;
    *ds = generate_synthetic(s).data;
    inst.kind = s.kind;
    inst.label = spec.gen + " (m=" + std::to_string(s.m) + ", q=" + std::to_string(s.q) +
                 ", seed=" + std::to_string(s.seed) + ")";
  } else if (!spec.data.empty()) {
    LibsvmOptions o;
    o.map_binary_labels = spec.map_labels;
    LibsvmData d = load_libsvm(spec.data, o);
    if (d.labels_remapped) std::cerr << "warning: labels {0,1} mapped to {-1,+1}\n";
    *ds = std::move(d.data);
    inst.kind = parse_loss(spec.loss);
    inst.label = spec.data;
  } else {
    std::ifstream f(spec.problem);
    if (!f) throw ConfigError("cannot open problem file " + spec.problem);
    json j;
    try {
      j = json::parse(f);
    } catch (const json::exception& e) {
      throw ConfigError("problem file " + spec.problem + ": " + e.what());
    }
    const auto rows = j.at("A").get<std::vector<std::vector<double>>>();
    const auto b = j.at("b").get<Vec>();
    if (rows.empty()) throw ShapeError("problem matrix A is empty");
    DenseMatrix a(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != a.cols) throw ShapeError("problem matrix A is ragged");
      for (std::size_t c = 0; c < a.cols; ++c) a(r, c) = rows[r][c];
    }
    ds->features = FeatureMatrix(std::move(a));
    ds->labels = b;
    inst.kind = LossKind::Quadratic;
    if (j.contains("tau") && !spec.tau) inst.tau = j.at("tau").get<double>();
    inst.label = spec.problem;
  }
  ds->validate(inst.kind);
  inst.data = ds;
  if (spec.tau) inst.tau = *spec.tau;
  else if (spec.problem.empty())
    inst.tau = inst.kind == LossKind::Quadratic ? kDefaultTauLasso : kDefaultTauLogistic;
  if (!(inst.tau >= 0.0)) throw ConfigError("tau must be non-negative");
  return inst;
}

CompositeProblem centralized(const Instance& inst) {
  if (inst.kind == LossKind::Quadratic)
    return build_lasso(inst.data->features.to_dense(), inst.data->labels, inst.tau);
  return build_logistic(inst.data, inst.tau);
}

SmoothFnPtr smooth_part(const Instance& inst) {
  if (inst.kind == LossKind::Quadratic)
    return std::make_shared<QuadraticLoss>(inst.data->features.to_dense(), inst.data->labels);
  return std::make_shared<LogisticLoss>(inst.data);
}

PartitionStrategy parse_partition(const std::string& s) {
  if (s == "contiguous") return PartitionStrategy::Contiguous;
  if (s == "strided") return PartitionStrategy::Strided;
  if (s == "random") return PartitionStrategy::SeededRandom;
  throw ConfigError("unknown partition '" + s + "' (contiguous, strided, random)");
}

BatchedProblem batched(const Instance& inst, std::size_t n, const std::string& partition,
                       std::uint64_t seed) {
  const Partition p = partition_dataset(inst.data->m(), n, parse_partition(partition), seed);
  if (inst.kind == LossKind::Quadratic) return build_batched_lasso(inst.data, p, inst.tau);
  return build_batched_logistic(inst.data, p, inst.tau);
}

std::optional<double> parse_step(const std::string& s, const char* name) {
  if (s == "auto") return std::nullopt;
  double v = 0.0;
  std::size_t used = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty())
    throw ConfigError(std::string(name) + " must be a number or 'auto', got '" + s + "'");
  return v;
}

std::shared_ptr<const NetworkGraph> make_graph(const SolveConfig& c, std::uint64_t seed) {
  if (c.graph == "ring") return std::make_shared<NetworkGraph>(NetworkGraph::ring(c.nodes));
  if (c.graph == "star") return std::make_shared<NetworkGraph>(NetworkGraph::star(c.nodes));
  if (c.graph == "complete")
    return std::make_shared<NetworkGraph>(NetworkGraph::complete(c.nodes));
  if (c.graph == "er")
    return std::make_shared<NetworkGraph>(NetworkGraph::erdos_renyi(c.nodes, c.edge_prob, seed));
  return std::make_shared<NetworkGraph>(load_graph(c.graph));
}

CoordinateSampler make_sampler(const std::string& spec, std::size_t blocks, std::uint64_t seed) {
  if (spec == "uniform") return CoordinateSampler::single_uniform(blocks, seed);
  if (spec == "full") return CoordinateSampler::full(blocks);
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "independent" && !tail.empty())
    return CoordinateSampler::independent(blocks, std::stod(tail), seed);
  if (head == "weighted" && !tail.empty()) {
    std::vector<double> w;
    std::stringstream ss(tail);
    std::string item;
    while (std::getline(ss, item, ',')) w.push_back(std::stod(item));
    if (w.size() != blocks)
      throw ConfigError("weighted sampler needs " + std::to_string(blocks) + " weights");
    return CoordinateSampler::single_weighted(w, seed);
  }
  throw ConfigError("unknown sampler '" + spec +
                    "' (uniform, full, independent:<p>, weighted:<w,...>)");
}

void write_trace_file(const std::string& path, const IterationTrace& trace) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write trace file " + path);
  write_trace_csv(f, trace);
}

void write_json_file(const std::string& path, const json& j) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path);
  f << j.dump(2) << "\n";
}

struct RunSummary {
  std::string algo;
  std::string problem;
  PdfpParams params;
  std::size_t iterations = 0;
  bool converged = false;
  double objective = 0.0;
  double fp_residual = 0.0;
  double consensus = std::numeric_limits<double>::quiet_NaN();
  Vec x;
};

std::string render(const RunSummary& r) {
  std::ostringstream os;
  os << "algorithm          " << r.algo << "\n"
     << "problem            " << r.problem << "\n"
     << "gamma              " << format_double(r.params.gamma) << "\n"
     << "lambda             " << format_double(r.params.lambda) << " (bound "
     << format_double(1.0 / r.params.opnorm) << " = " << r.params.bound_label << ")\n"
     << "iterations         " << r.iterations << "\n"
     << "converged          " << (r.converged ? "yes" : "no") << "\n"
     << "objective          " << format_double(r.objective) << "\n"
     << "fp_residual        " << format_double(r.fp_residual) << "\n";
  if (!std::isnan(r.consensus))
    os << "consensus_residual " << format_double(r.consensus) << "\n";
  return os.str();
}

void clear_active_sets(IterationTrace& t) {
  for (auto& rec : t) rec.active_set.clear();
}

}  // namespace

void apply_json(SolveConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, val] : j.items()) {
    std::string k = key;
    for (char& ch : k)
      if (ch == '_') ch = '-';
    auto str = [&] {
      return val.is_string() ? val.get<std::string>() : val.dump();
    };
    try {
      if (k == "algo") c.algo = val.get<std::string>();
      else if (k == "gen") c.problem.gen = val.get<std::string>();
      else if (k == "data") c.problem.data = val.get<std::string>();
      else if (k == "problem") c.problem.problem = val.get<std::string>();
      else if (k == "loss") c.problem.loss = val.get<std::string>();
      else if (k == "m" || k == "p") c.problem.m = val.get<std::size_t>();
      else if (k == "q") c.problem.q = val.get<std::size_t>();
      else if (k == "sparsity") c.problem.sparsity = val.get<double>();
      else if (k == "noise") c.problem.noise = val.get<double>();
      else if (k == "tau") c.problem.tau = val.get<double>();
      else if (k == "map-labels") c.problem.map_labels = val.get<bool>();
      else if (k == "seed") c.problem.seed = val.get<std::uint64_t>();
      else if (k == "gamma") c.gamma = str();
      else if (k == "lambda") c.lambda = str();
      else if (k == "batches") c.batches = val.get<std::size_t>();
      else if (k == "partition") c.partition = val.get<std::string>();
      else if (k == "graph") c.graph = val.get<std::string>();
      else if (k == "nodes") c.nodes = val.get<std::size_t>();
      else if (k == "edge-prob") c.edge_prob = val.get<double>();
      else if (k == "sampler") c.sampler = val.get<std::string>();
      else if (k == "sampler-seed") c.sampler_seed = val.get<std::uint64_t>();
      else if (k == "tol") c.tol = val.get<double>();
      else if (k == "max-iters") c.max_iters = val.get<std::size_t>();
      else if (k == "log-every") c.log_every = val.get<std::size_t>();
      else if (k == "trace") c.trace = val.get<std::string>();
      else if (k == "result") c.result = val.get<std::string>();
      else throw ConfigError("unknown config key '" + key + "'");
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

SolveOutcome run_solve(const SolveConfig& c) {
  SolveOutcome out;
  try {
    const Instance inst = load_instance(c.problem);
    const auto gamma = parse_step(c.gamma, "gamma");
    const auto lambda = parse_step(c.lambda, "lambda");
    const std::uint64_t sseed = c.sampler_seed.value_or(c.problem.seed);
    StoppingRule stop{c.max_iters, c.tol};
    if (!(c.tol >= 0.0)) throw ConfigError("tol must be non-negative");

    RunSummary s;
    s.algo = c.algo;
    s.problem = inst.label + ", tau=" + format_double(inst.tau);
    IterationTrace trace;

    if (c.algo == "pdfp2o" || c.algo == "spdfp2o") {
      const CompositeProblem p = centralized(inst);
      const Scheme scheme = c.algo == "pdfp2o" ? Scheme::Pdfp2o : Scheme::Spdfp2o;
      s.params = resolve_params(p, scheme, gamma, lambda);
      SolveOptions o;
      o.scheme = scheme;
      o.stop = stop;
      o.log_every = c.log_every;
      const SolveResult r = solve(p, s.params, zero_state(p), o);
      s.iterations = r.iterations;
      s.converged = r.converged;
      s.objective = p.objective(r.state.x);
      s.fp_residual = r.final_residual;
      s.x = r.state.x;
      trace = r.trace;
    } else if (c.algo == "minibatch" || c.algo == "smspdfp2o") {
      const BatchedProblem b = batched(inst, c.batches, c.partition, c.problem.seed);
      s.params = resolve_minibatch_params(b, gamma, lambda);
      CoordinateSampler sampler = c.algo == "minibatch"
                                      ? CoordinateSampler::full(b.batches())
                                      : make_sampler(c.sampler, b.batches(), sseed);
      StochasticOptions o;
      o.stop = stop;
      o.log_every = c.log_every;
      const StochasticResult r =
          run_stochastic(b, s.params, zero_minibatch_state(b), sampler, o);
      s.iterations = r.iterations;
      s.converged = r.converged;
      s.x = r.state.mean_x();
      s.objective = b.objective(s.x);
      s.fp_residual = r.final_residual;
      s.consensus = r.state.consensus_residual();
      trace = r.trace;
      if (c.algo == "minibatch") clear_active_sets(trace);
    } else if (c.algo == "dist-sync" || c.algo == "dist-async") {
      auto g = make_graph(c, c.problem.seed);
      const BatchedProblem b = batched(inst, g->node_count(), c.partition, c.problem.seed);
      s.params = resolve_network_params(b, g, gamma, lambda);
      Network net(b, g, s.params);
      CoordinateSampler sampler = c.algo == "dist-sync"
                                      ? CoordinateSampler::full(g->node_count())
                                      : make_sampler(c.sampler, g->node_count(), sseed);
      NetworkOptions o;
      o.stop = stop;
      o.log_every = c.log_every;
      const NetworkResult r = run_network(net, sampler, o);
      s.iterations = r.iterations;
      s.converged = r.converged;
      s.x = net.average_x();
      s.objective = net.objective_at_average();
      s.fp_residual = r.final_residual;
      s.consensus = net.consensus_residual();
      trace = r.trace;
      if (c.algo == "dist-sync") clear_active_sets(trace);
      s.problem += ", " + g->describe();
    } else {
      throw ConfigError("unknown algorithm '" + c.algo +
                        "' (pdfp2o, spdfp2o, minibatch, smspdfp2o, dist-sync, dist-async)");
    }

    write_trace_file(c.trace, trace);
    json res = {{"algorithm", s.algo},
                {"gamma", s.params.gamma},
                {"lambda", s.params.lambda},
                {"lambda_bound", 1.0 / s.params.opnorm},
                {"iterations", s.iterations},
                {"converged", s.converged},
                {"objective", s.objective},
                {"fp_residual", s.fp_residual},
                {"x", s.x}};
    if (!std::isnan(s.consensus)) res["consensus_residual"] = s.consensus;
    write_json_file(c.result, res);
    out.summary = render(s);
    out.exit_code = s.converged ? kExitConverged : kExitNotConverged;
  } catch (const DivergenceError& e) {
    out.summary = std::string("error: ") + e.what() + "\n";
    out.exit_code = kExitNotConverged;
  } catch (const Error& e) {
    out.summary = std::string("error: ") + e.what() + "\n";
    out.exit_code = kExitError;
  } catch (const std::exception& e) {
    out.summary = std::string("error: ") + e.what() + "\n";
    out.exit_code = kExitError;
  }
  return out;
}

int cmd_oracle(const ProblemSpec& spec, double tol, std::size_t max_iter, const std::string& out,
               std::ostream& os) {
  const Instance inst = load_instance(spec);
  const SmoothFnPtr f = smooth_part(inst);
  ReferenceOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  const ReferenceResult r = solve_l1_reference(*f, inst.tau, o);
  json j = {{"problem", inst.label},
            {"tau", inst.tau},
            {"x", r.x},
            {"objective", r.objective},
            {"certificate", r.certificate},
            {"subgradient_residual", r.subgradient_residual},
            {"iterations", r.iterations},
            {"converged", r.converged}};
  if (out.empty()) {
    os << j.dump(2) << "\n";
  } else {
    write_json_file(out, j);
    os << "objective    " << format_double(r.objective) << "\n"
       << "certificate  " << format_double(r.certificate) << "\n"
       << "iterations   " << r.iterations << "\n"
       << "converged    " << (r.converged ? "yes" : "no") << "\n";
  }
  return r.converged ? kExitConverged : kExitNotConverged;
}

int cmd_gen(const ProblemSpec& spec, const std::string& out, std::ostream& os) {
  SyntheticSpec s;
  s.kind = parse_loss(spec.gen);
  s.seed = spec.seed;
  s.m = spec.m;
  s.q = spec.q;
  s.sparsity = spec.sparsity;
  s.noise = spec.noise;
  const SyntheticData d = generate_synthetic(s);
  std::ofstream f(out);
  if (!f) throw ConfigError("cannot write " + out);
  write_libsvm(f, d.data);
  json side = {{"kind", spec.gen},   {"seed", s.seed},         {"m", s.m},
               {"q", s.q},           {"sparsity", s.sparsity}, {"noise", s.noise},
               {"ground_truth", d.ground_truth}};
  write_json_file(out + ".json", side);
  os << "wrote " << out << " and " << out << ".json (" << s.m << " x " << s.q << ")\n";
  return kExitConverged;
}

int cmd_graph_gen(const std::string& kind, std::size_t n, double p, std::uint64_t seed,
                  const std::string& out, std::ostream& os) {
  SolveConfig c;
  c.graph = kind;
  c.nodes = n;
  c.edge_prob = p;
  if (kind != "ring" && kind != "star" && kind != "complete" && kind != "er")
    throw ConfigError("unknown graph kind '" + kind + "' (ring, star, complete, er)");
  const auto g = make_graph(c, seed);
  if (out.empty()) {
    write_graph(os, *g);
  } else {
    std::ofstream f(out);
    if (!f) throw ConfigError("cannot write " + out);
    write_graph(f, *g);
    os << g->describe() << "\n";
  }
  return kExitConverged;
}

int cmd_bench(const std::string& config_path, std::size_t jobs, std::ostream& os) {
  std::ifstream f(config_path);
  if (!f) throw ConfigError("cannot open bench config " + config_path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("bench config: " + std::string(e.what()));
  }
  if (!j.contains("runs") || !j["runs"].is_array() || j["runs"].empty())
    throw ConfigError("bench config needs a non-empty \"runs\" array");
  std::vector<SolveConfig> configs;
  for (const auto& run : j["runs"]) {
    SolveConfig c;
    if (j.contains("defaults")) apply_json(c, j["defaults"]);
    apply_json(c, run);
    configs.push_back(std::move(c));
  }
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<SolveOutcome> outcomes(configs.size());
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next == configs.size()) return;
        i = next++;
      }
      outcomes[i] = run_solve(configs[i]);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(jobs, configs.size()); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int worst = kExitConverged;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    os << "== run " << i << " (" << configs[i].algo << ") exit " << outcomes[i].exit_code << "\n"
       << outcomes[i].summary;
    worst = std::max(worst, outcomes[i].exit_code == kExitError ? 3 : outcomes[i].exit_code);
  }
  return worst == 3 ? kExitError : worst;
}

int cmd_compare(const std::vector<std::string>& traces, const std::string& oracle,
                double gap_tol, double consensus_tol, std::ostream& os) {
  if (traces.empty()) throw ConfigError("nothing to compare: no trace files given");
  std::ifstream of(oracle);
  if (!of) throw ConfigError("cannot open oracle file " + oracle);
  double best = 0.0;
  try {
    best = json::parse(of).at("objective").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError("oracle file " + oracle + ": " + e.what());
  }
  const double scale = std::abs(best) > 0.0 ? std::abs(best) : 1.0;
  bool all_pass = true;
  os << std::left << std::setw(32) << "trace" << std::setw(10) << "iters" << std::setw(26)
     << "objective" << std::setw(14) << "rel_gap" << std::setw(14) << "consensus"
     << std::setw(12) << "iter@tol"
     << "status\n";
  for (const std::string& path : traces) {
    std::ifstream tf(path);
    if (!tf) throw ConfigError("cannot open trace file " + path);
    const IterationTrace t = read_trace_csv(tf);
    if (t.empty()) {
      os << std::setw(32) << path << "empty trace  FAIL\n";
      all_pass = false;
      continue;
    }
    std::string hit = "-";
    for (const auto& rec : t)
      if (std::abs(rec.objective - best) / scale <= gap_tol) {
        hit = std::to_string(rec.iter);
        break;
      }
    const TraceRecord& last = t.back();
    const double gap = std::abs(last.objective - best) / scale;
    const bool cons_ok = std::isnan(last.consensus_residual) ||
                         last.consensus_residual <= consensus_tol;
    const bool pass = gap <= gap_tol && cons_ok;
    all_pass = all_pass && pass;
    std::ostringstream gs, cs;
    gs << std::setprecision(3) << std::scientific << gap;
    if (std::isnan(last.consensus_residual))
      cs << "-";
    else
      cs << std::setprecision(3) << std::scientific << last.consensus_residual;
    os << std::setw(32) << path << std::setw(10) << last.iter << std::setw(26)
       << format_double(last.objective) << std::setw(14) << gs.str() << std::setw(14) << cs.str()
       << std::setw(12) << hit << (pass ? "PASS" : "FAIL") << "\n";
  }
  return all_pass ? kExitConverged : kExitNotConverged;
}

}  // namespace pdfp::cli
