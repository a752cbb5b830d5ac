#pragma once

// Decentralized consensus optimization over a communication graph:
//
//   min_{x_1..x_N}  sum_n f_n(x_n) + g_n(x_n)   s.t.  x_n = x_m on every edge.
//
// Each edge e = (n, m) carries a dual pair (v_e(n), v_e(m)) in X^2; agent n
// owns x_n, y_n and its halves v_e(n) of the incident edges, and talks to its
// neighbours only through a mailbox holding their latest published values.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "pdfp/graph.hpp"
#include "pdfp/km.hpp"
#include "pdfp/minibatch.hpp"
#include "pdfp/pdfp.hpp"

namespace pdfp {

// D : X^N -> X^{2|E|},  (D x)_e = (x_a, x_b) for e = (a, b), a < b. The
// output is edge-major: [x_a | x_b] per edge. D^T D = diag(degree), so the
// largest Gram eigenvalue is the maximum degree.
class EdgeOperator final : public LinearMap {
 public:
  EdgeOperator(std::shared_ptr<const NetworkGraph> graph, std::size_t block_dim);
  std::size_t in_dim() const override;
  std::size_t out_dim() const override;
  using LinearMap::apply;
  void apply(std::span<const double> x, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> y, std::span<double> out) const override;
  std::optional<double> known_gram_max_eigenvalue() const override;
  std::string describe() const override;

 private:
  std::shared_ptr<const NetworkGraph> graph_;
  std::size_t q_;
};

// Sum over edges of the indicator of {(u, w) : u = w}, at y in edge-major layout.
double consensus_h(std::span<const double> y, std::size_t block_dim);

// The product-space problem solved by the network: separable f and g, h the
// edge-consensus indicator, D the edge operator.
CompositeProblem lift_network_problem(const BatchedProblem& local,
                                      std::shared_ptr<const NetworkGraph> graph);

PdfpParams resolve_network_params(const BatchedProblem& local,
                                  std::shared_ptr<const NetworkGraph> graph,
                                  std::optional<double> gamma = std::nullopt,
                                  std::optional<double> lambda = std::nullopt);

// Coordinate partition of [v | y | x] on the lifted space: block n holds the
// dual halves owned by node n, y_n and x_n.
std::vector<std::vector<std::size_t>> node_blocks(const NetworkGraph& graph,
                                                  std::size_t block_dim);

// One incident edge as seen by its owner.
struct Link {
  std::size_t edge = 0;
  std::size_t neighbor = 0;
  Vec dual;  // v_e(n)

  // Mailbox: the neighbour's last published values.
  bool received = false;
  Vec their_a;
  Vec their_dual;  // v_e(m)
  Vec their_x;
  Vec their_y;
};

struct Agent {
  std::size_t id = 0;
  Vec x;
  Vec y;
  Vec grad;  // grad f_n(x), refreshed whenever x changes
  std::vector<Link> links;  // increasing edge order
};

// x_half_n = x_n - gamma grad f_n(x_n)
Vec local_forward(const Agent& agent, double gamma);
// sum of the agent's own dual halves, in edge order
Vec local_dual_sum(const Agent& agent);
// a_n = x_half_n - lambda (sum_e v_e(n) + y_n)
Vec local_quantity_a(const Agent& agent, double gamma, double lambda);
// v_e(n)+ = ((a_n + v_e(n)) - (a_m + v_e(m))) / 2 for link index `link`.
// Throws ProtocolError when nothing has been received from that neighbour.
Vec local_dual_update(const Agent& agent, std::size_t link, std::span<const double> a);
// y_n+ = (I - prox_{(gamma/lambda) g_n})(x_half_n - lambda sum_e v_e(n) + (1 - lambda) y_n)
Vec local_y_update(const Agent& agent, const ProxFn& g, double gamma, double lambda);
// x_n+ = x_half_n - lambda (sum_e v_e(n)+ + y_n+)
Vec local_x_update(const Agent& agent, std::span<const Vec> new_duals,
                   std::span<const double> new_y, double gamma, double lambda);
// Expanded form x_half_n - lambda sum_e v_e(n) - lambda y_n+ - (lambda / 2) sum_m (a_n - a_m),
// equal to local_x_update up to rounding when v_e(m) = -v_e(n) on every edge.
Vec local_x_update_expanded(const Agent& agent, std::span<const double> new_y,
                            std::span<const double> a, double gamma, double lambda);

class Network {
 public:
  // Starts from the zero state unless `init` (a lifted state) is given. Every
  // agent publishes once so all mailboxes are populated.
  Network(BatchedProblem local, std::shared_ptr<const NetworkGraph> graph, PdfpParams params,
          const SolverState* init = nullptr);

  // Every agent updates from the current values, then all publish.
  void sync_round();
  // Only the agents in `active` update (from their current mailboxes), then
  // they publish. async_round over all nodes equals sync_round exactly.
  void async_round(std::span<const std::size_t> active);

  std::size_t node_count() const { return agents_.size(); }
  const Agent& agent(std::size_t n) const { return agents_.at(n); }
  const NetworkGraph& graph() const { return *graph_; }
  const BatchedProblem& local() const { return local_; }
  const PdfpParams& params() const { return params_; }

  SolverState lifted_state() const;
  Vec average_x() const;
  double objective_at_average() const;
  // max_n ||x_n - average||
  double consensus_residual() const;
  // ||T u - u||_lambda of the lifted operator at the current state, using the
  // agents' update rules without changing anything.
  double fixed_point_residual() const;
  // max over edges and entries of |v_e(a) + v_e(b)|
  double antisymmetry_violation() const;
  // Drops the mailbox entry of `node` about `neighbor` (for failure testing).
  void clear_mailbox(std::size_t node, std::size_t neighbor);

 private:
  friend struct NetworkRunner;
  struct Update {
    std::vector<Vec> duals;
    Vec y;
    Vec x;
  };
  Update compute_update(std::size_t n) const;
  void commit(std::size_t n, Update u);
  void publish(std::size_t n);

  BatchedProblem local_;
  std::shared_ptr<const NetworkGraph> graph_;
  PdfpParams params_;
  std::vector<Agent> agents_;
};

struct NetworkOptions {
  StoppingRule stop{};
  std::size_t log_every = 1;
};

struct NetworkResult {
  SolverState state;
  IterationTrace trace;
  std::size_t iterations = 0;
  bool converged = false;
  double final_residual = 0.0;
};

// Activates the node sets drawn from `sampler` (a full sampler gives the
// synchronous algorithm) until the lifted fixed-point residual is <= tol.
NetworkResult run_network(Network& net, CoordinateSampler& sampler,
                          const NetworkOptions& opts = {});

}  // namespace pdfp
