#include "pdfp/reference.hpp"

#include <cmath>

#include "pdfp/errors.hpp"

namespace pdfp {
namespace {

double shrink(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// x+ = S(z - t grad f(z), t tau)
void prox_grad(const SmoothFn& f, const Vec& z, double t, double tau, Vec& grad, Vec& out) {
  f.gradient(z, grad);
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = shrink(z[i] - t * grad[i], t * tau);
}

double l1(const Vec& x) {
  double s = 0.0;
  for (double e : x) s += std::abs(e);
  return s;
}

}  // namespace

double l1_subgradient_residual(std::span<const double> x, std::span<const double> grad,
                               double tau) {
  if (x.size() != grad.size()) throw ShapeError("subgradient residual: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d;
    if (x[i] > 0.0)
      d = grad[i] + tau;
    else if (x[i] < 0.0)
      d = grad[i] - tau;
    else
      d = std::max(std::abs(grad[i]) - tau, 0.0);
    s += d * d;
  }
  return std::sqrt(s);
}

ReferenceResult solve_l1_reference(const SmoothFn& f, double tau, const ReferenceOptions& opts,
                                   Vec x0) {
  if (!(tau >= 0.0)) throw ParameterError("tau must be non-negative");
  const std::size_t q = f.dim();
  if (x0.empty()) x0.assign(q, 0.0);
  if (x0.size() != q) throw ShapeError("reference solver: initial point has the wrong size");
  const double l = f.lipschitz();
  if (!(l > 0.0)) throw ParameterError("reference solver needs L > 0");
  const double t = 1.0 / l;

  Vec x = x0, x_prev = x0, z = x0, grad(q), next(q);
  double momentum = 1.0;
  ReferenceResult res;
  for (std::size_t k = 0;; ++k) {
    // Certificate at the current iterate.
    prox_grad(f, x, t, tau, grad, next);
    double c2 = 0.0;
    for (std::size_t i = 0; i < q; ++i) c2 += (x[i] - next[i]) * (x[i] - next[i]);
    res.certificate = std::sqrt(c2) / t;
    res.iterations = k;
    if (res.certificate <= opts.tol) {
      res.converged = true;
      break;
    }
    if (k == opts.max_iter) break;

    prox_grad(f, z, t, tau, grad, next);
    // Restart when the momentum direction opposes the prox-gradient step.
    double dir = 0.0;
    for (std::size_t i = 0; i < q; ++i) dir += (z[i] - next[i]) * (next[i] - x[i]);
    x_prev = x;
    x = next;
    if (dir > 0.0) {
      momentum = 1.0;
      z = x;
      continue;
    }
    const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const double w = (momentum - 1.0) / m_next;
    momentum = m_next;
    for (std::size_t i = 0; i < q; ++i) z[i] = x[i] + w * (x[i] - x_prev[i]);
  }
  f.gradient(x, grad);
  res.subgradient_residual = l1_subgradient_residual(x, grad, tau);
  res.objective = f.value(x) + tau * l1(x);
  res.x = std::move(x);
  return res;
}

}  // namespace pdfp
