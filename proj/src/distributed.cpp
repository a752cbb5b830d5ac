#include "pdfp/distributed.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pdfp/errors.hpp"
#include "pdfp/kernels.hpp"

namespace pdfp {

EdgeOperator::EdgeOperator(std::shared_ptr<const NetworkGraph> graph, std::size_t block_dim)
    : graph_(std::move(graph)), q_(block_dim) {
  if (!graph_) throw ShapeError("edge operator needs a graph");
  if (q_ == 0) throw ShapeError("edge operator: zero block dimension");
}

std::size_t EdgeOperator::in_dim() const { return graph_->node_count() * q_; }
std::size_t EdgeOperator::out_dim() const { return 2 * graph_->edge_count() * q_; }

void EdgeOperator::apply(std::span<const double> x, std::span<double> out) const {
  if (x.size() != in_dim() || out.size() != out_dim())
    throw ShapeError("edge operator: dimension mismatch");
  const auto& edges = graph_->edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    std::copy_n(x.begin() + edges[e].a * q_, q_, out.begin() + 2 * e * q_);
    std::copy_n(x.begin() + edges[e].b * q_, q_, out.begin() + (2 * e + 1) * q_);
  }
}

void EdgeOperator::apply_adjoint(std::span<const double> y, std::span<double> out) const {
  if (y.size() != out_dim() || out.size() != in_dim())
    throw ShapeError("edge operator adjoint: dimension mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const auto& edges = graph_->edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    for (std::size_t i = 0; i < q_; ++i) {
      out[edges[e].a * q_ + i] += y[2 * e * q_ + i];
      out[edges[e].b * q_ + i] += y[(2 * e + 1) * q_ + i];
    }
}

std::optional<double> EdgeOperator::known_gram_max_eigenvalue() const {
  return static_cast<double>(graph_->max_degree());
}

std::string EdgeOperator::describe() const {
  return "edge_operator(" + graph_->describe() + ", q=" + std::to_string(q_) + ")";
}

double consensus_h(std::span<const double> y, std::size_t block_dim) {
  return ProxFn::pair_consensus(block_dim).value(y);
}

CompositeProblem lift_network_problem(const BatchedProblem& local,
                                      std::shared_ptr<const NetworkGraph> graph) {
  local.validate();
  if (!graph) throw GraphError("missing graph");
  if (graph->node_count() != local.batches())
    throw GraphError("graph has " + std::to_string(graph->node_count()) + " nodes but there are " +
                     std::to_string(local.batches()) + " local problems");
  CompositeProblem p;
  p.f = std::make_shared<WithLipschitz>(std::make_shared<SeparableSum>(local.f),
                                        local.lipschitz());
  p.g = ProxFn::block_separable(local.g, local.dim);
  p.h = ProxFn::pair_consensus(local.dim);
  p.d = std::make_shared<EdgeOperator>(std::move(graph), local.dim);
  return p;
}

PdfpParams resolve_network_params(const BatchedProblem& local,
                                  std::shared_ptr<const NetworkGraph> graph,
                                  std::optional<double> gamma, std::optional<double> lambda) {
  return resolve_params(lift_network_problem(local, std::move(graph)), Scheme::Spdfp2o, gamma,
                        lambda);
}

std::vector<std::vector<std::size_t>> node_blocks(const NetworkGraph& graph,
                                                  std::size_t block_dim) {
  const std::size_t q = block_dim;
  const std::size_t dual = 2 * graph.edge_count() * q;
  const std::size_t primal = graph.node_count() * q;
  std::vector<std::vector<std::size_t>> blocks(graph.node_count());
  for (std::size_t n = 0; n < graph.node_count(); ++n) {
    for (const Incidence& inc : graph.incident(n)) {
      const std::size_t slot = graph.edges()[inc.edge].a == n ? 0 : 1;
      for (std::size_t i = 0; i < q; ++i) blocks[n].push_back((2 * inc.edge + slot) * q + i);
    }
    for (std::size_t i = 0; i < q; ++i) blocks[n].push_back(dual + n * q + i);
    for (std::size_t i = 0; i < q; ++i) blocks[n].push_back(dual + primal + n * q + i);
  }
  return blocks;
}

Vec local_forward(const Agent& agent, double gamma) {
  Vec xh(agent.x.size());
  kernels::lincomb(1.0, agent.x, -gamma, agent.grad, xh);
  return xh;
}

Vec local_dual_sum(const Agent& agent) {
  Vec sum(agent.x.size(), 0.0);
  for (const Link& l : agent.links)
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += l.dual[i];
  return sum;
}

Vec local_quantity_a(const Agent& agent, double gamma, double lambda) {
  const Vec xh = local_forward(agent, gamma);
  Vec t = local_dual_sum(agent);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] += agent.y[i];
  Vec a(xh.size());
  kernels::lincomb(1.0, xh, -lambda, t, a);
  return a;
}

Vec local_dual_update(const Agent& agent, std::size_t link, std::span<const double> a) {
  const Link& l = agent.links.at(link);
  if (!l.received)
    throw ProtocolError("agent " + std::to_string(agent.id) + " has no message from neighbour " +
                        std::to_string(l.neighbor));
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = 0.5 * ((a[i] + l.dual[i]) - (l.their_a[i] + l.their_dual[i]));
  return out;
}

Vec local_y_update(const Agent& agent, const ProxFn& g, double gamma, double lambda) {
  const Vec xh = local_forward(agent, gamma);
  const Vec dsum = local_dual_sum(agent);
  Vec w(xh.size());
  kernels::lincomb(1.0, xh, -lambda, dsum, w);
  kernels::axpy(1.0 - lambda, agent.y, w);
  return g.residual(w, gamma / lambda);
}

Vec local_x_update(const Agent& agent, std::span<const Vec> new_duals,
                   std::span<const double> new_y, double gamma, double lambda) {
  const Vec xh = local_forward(agent, gamma);
  Vec t(xh.size(), 0.0);
  for (const Vec& d : new_duals)
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += d[i];
  for (std::size_t i = 0; i < t.size(); ++i) t[i] += new_y[i];
  Vec x(xh.size());
  kernels::lincomb(1.0, xh, -lambda, t, x);
  return x;
}

Vec local_x_update_expanded(const Agent& agent, std::span<const double> new_y,
                            std::span<const double> a, double gamma, double lambda) {
  Vec x = local_forward(agent, gamma);
  const Vec dsum = local_dual_sum(agent);
  for (const Link& l : agent.links) {
    if (!l.received)
      throw ProtocolError("agent " + std::to_string(agent.id) +
                          " has no message from neighbour " + std::to_string(l.neighbor));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] -= 0.5 * lambda * (a[i] - l.their_a[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) x[i] -= lambda * (dsum[i] + new_y[i]);
  return x;
}

Network::Network(BatchedProblem local, std::shared_ptr<const NetworkGraph> graph,
                 PdfpParams params, const SolverState* init)
    : local_(std::move(local)), graph_(std::move(graph)), params_(std::move(params)) {
  const CompositeProblem lifted = lift_network_problem(local_, graph_);
  validate_params(lifted, params_);
  const std::size_t q = local_.dim;
  const std::size_t nodes = graph_->node_count();
  if (init && (init->v.size() != lifted.dual_dim() || init->y.size() != lifted.primal_dim() ||
               init->x.size() != lifted.primal_dim()))
    throw ShapeError("network initial state has the wrong shape");

  agents_.resize(nodes);
  for (std::size_t n = 0; n < nodes; ++n) {
    Agent& ag = agents_[n];
    ag.id = n;
    ag.x.assign(q, 0.0);
    ag.y.assign(q, 0.0);
    if (init) {
      std::copy_n(init->x.begin() + n * q, q, ag.x.begin());
      std::copy_n(init->y.begin() + n * q, q, ag.y.begin());
    }
    ag.grad = local_.f[n]->gradient(ag.x);
    for (const Incidence& inc : graph_->incident(n)) {
      Link l;
      l.edge = inc.edge;
      l.neighbor = inc.neighbor;
      l.dual.assign(q, 0.0);
      if (init) {
        const std::size_t slot = graph_->edges()[inc.edge].a == n ? 0 : 1;
        std::copy_n(init->v.begin() + (2 * inc.edge + slot) * q, q, l.dual.begin());
      }
      ag.links.push_back(std::move(l));
    }
  }
  for (std::size_t n = 0; n < nodes; ++n) publish(n);
}

Network::Update Network::compute_update(std::size_t n) const {
  const Agent& ag = agents_[n];
  const double gamma = params_.gamma;
  const double lambda = params_.lambda;
  const Vec a = local_quantity_a(ag, gamma, lambda);
  Update u;
  for (std::size_t k = 0; k < ag.links.size(); ++k) u.duals.push_back(local_dual_update(ag, k, a));
  u.y = local_y_update(ag, local_.g[n], gamma, lambda);
  u.x = local_x_update(ag, u.duals, u.y, gamma, lambda);
  return u;
}

void Network::commit(std::size_t n, Update u) {
  Agent& ag = agents_[n];
  for (std::size_t k = 0; k < ag.links.size(); ++k) ag.links[k].dual = std::move(u.duals[k]);
  ag.y = std::move(u.y);
  ag.x = std::move(u.x);
  ag.grad = local_.f[n]->gradient(ag.x);
}

void Network::publish(std::size_t n) {
  const Agent& ag = agents_[n];
  const Vec a = local_quantity_a(ag, params_.gamma, params_.lambda);
  for (const Link& mine : ag.links) {
    Agent& other = agents_[mine.neighbor];
    auto it = std::find_if(other.links.begin(), other.links.end(),
                           [&](const Link& l) { return l.edge == mine.edge; });
    if (it == other.links.end()) throw ProtocolError("edge missing at neighbour");
    it->received = true;
    it->their_a = a;
    it->their_dual = mine.dual;
    it->their_x = ag.x;
    it->their_y = ag.y;
  }
}

void Network::sync_round() {
  std::vector<std::size_t> all(agents_.size());
  for (std::size_t n = 0; n < all.size(); ++n) all[n] = n;
  async_round(all);
}

void Network::async_round(std::span<const std::size_t> active) {
  for (std::size_t n : active)
    if (n >= agents_.size())
      throw ParameterError("node " + std::to_string(n) + " out of range");
  std::vector<Update> updates;
  updates.reserve(active.size());
  for (std::size_t n : active) updates.push_back(compute_update(n));
  for (std::size_t k = 0; k < active.size(); ++k) commit(active[k], std::move(updates[k]));
  for (std::size_t n : active) publish(n);
}

SolverState Network::lifted_state() const {
  const std::size_t q = local_.dim;
  SolverState s;
  s.v.assign(2 * graph_->edge_count() * q, 0.0);
  for (const Agent& ag : agents_) {
    for (const Link& l : ag.links) {
      const std::size_t slot = graph_->edges()[l.edge].a == ag.id ? 0 : 1;
      std::copy(l.dual.begin(), l.dual.end(), s.v.begin() + (2 * l.edge + slot) * q);
    }
    s.y.insert(s.y.end(), ag.y.begin(), ag.y.end());
    s.x.insert(s.x.end(), ag.x.begin(), ag.x.end());
  }
  return s;
}

Vec Network::average_x() const {
  Vec m(local_.dim, 0.0);
  for (const Agent& ag : agents_)
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += ag.x[i];
  for (double& e : m) e /= static_cast<double>(agents_.size());
  return m;
}

double Network::objective_at_average() const { return local_.objective(average_x()); }

double Network::consensus_residual() const {
  const Vec m = average_x();
  double r = 0.0;
  for (const Agent& ag : agents_) r = std::max(r, distance(ag.x, m));
  return r;
}

double Network::fixed_point_residual() const {
  const double lambda = params_.lambda;
  double r2 = 0.0;
  for (std::size_t n = 0; n < agents_.size(); ++n) {
    const Update u = compute_update(n);
    const Agent& ag = agents_[n];
    for (std::size_t i = 0; i < ag.x.size(); ++i) {
      const double dx = u.x[i] - ag.x[i];
      const double dy = u.y[i] - ag.y[i];
      r2 += dx * dx + lambda * dy * dy;
    }
    for (std::size_t k = 0; k < ag.links.size(); ++k)
      for (std::size_t i = 0; i < ag.x.size(); ++i) {
        const double dv = u.duals[k][i] - ag.links[k].dual[i];
        r2 += lambda * dv * dv;
      }
  }
  return std::sqrt(r2);
}

double Network::antisymmetry_violation() const {
  const SolverState s = lifted_state();
  const std::size_t q = local_.dim;
  double worst = 0.0;
  for (std::size_t e = 0; e < graph_->edge_count(); ++e)
    for (std::size_t i = 0; i < q; ++i)
      worst = std::max(worst, std::abs(s.v[2 * e * q + i] + s.v[(2 * e + 1) * q + i]));
  return worst;
}

void Network::clear_mailbox(std::size_t node, std::size_t neighbor) {
  for (Link& l : agents_.at(node).links)
    if (l.neighbor == neighbor) {
      l.received = false;
      return;
    }
  throw GraphError("nodes " + std::to_string(node) + " and " + std::to_string(neighbor) +
                   " are not adjacent");
}

struct NetworkRunner {
  static NetworkResult run(Network& net, CoordinateSampler& sampler, const NetworkOptions& opts) {
    const std::size_t nodes = net.node_count();
    if (sampler.block_count() != nodes)
      throw ConfigError("activation sampler covers " + std::to_string(sampler.block_count()) +
                        " nodes, network has " + std::to_string(nodes));
    for (std::size_t n = 0; n < nodes; ++n)
      if (!(sampler.inclusion_probability(n) > 0.0))
        throw ConfigError("node " + std::to_string(n) + " is never activated");
    const std::size_t log_every = opts.log_every == 0 ? 1 : opts.log_every;
    const double lambda = net.params_.lambda;
    NetworkResult res;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> last_active;
    std::vector<Network::Update> updates(nodes);
    for (std::size_t k = 0;; ++k) {
      // Every pending update is computed once: it gives the residual and is
      // exactly what an activated agent would compute.
      double r2 = 0.0;
      for (std::size_t n = 0; n < nodes; ++n) {
        updates[n] = net.compute_update(n);
        const Agent& ag = net.agents_[n];
        for (std::size_t i = 0; i < ag.x.size(); ++i) {
          const double dx = updates[n].x[i] - ag.x[i];
          const double dy = updates[n].y[i] - ag.y[i];
          r2 += dx * dx + lambda * dy * dy;
          for (std::size_t l = 0; l < ag.links.size(); ++l) {
            const double dv = updates[n].duals[l][i] - ag.links[l].dual[i];
            r2 += lambda * dv * dv;
          }
        }
      }
      const double r = std::sqrt(r2);
      res.final_residual = r;
      const bool done = r <= opts.stop.tol;
      if (k > 0 && (k % log_every == 0 || done || k == opts.stop.max_iter)) {
        TraceRecord rec;
        rec.iter = k;
        rec.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rec.objective = net.objective_at_average();
        rec.fp_residual = r;
        rec.consensus_residual = net.consensus_residual();
        rec.active_set = last_active;
        res.trace.push_back(std::move(rec));
      }
      if (done) {
        res.converged = true;
        break;
      }
      if (k == opts.stop.max_iter) break;
      if (!std::isfinite(r)) throw DivergenceError("network iterates diverged");
      last_active = sampler.sample();
      for (std::size_t n : last_active) net.commit(n, std::move(updates[n]));
      for (std::size_t n : last_active) net.publish(n);
      res.iterations = k + 1;
    }
    res.state = net.lifted_state();
    return res;
  }
};

NetworkResult run_network(Network& net, CoordinateSampler& sampler, const NetworkOptions& opts) {
  return NetworkRunner::run(net, sampler, opts);
}

}  // namespace pdfp
