#include "pdfp/opnorm.hpp"

#include <cmath>
#include <random>

#include "pdfp/errors.hpp"
#include "pdfp/kernels.hpp"

namespace pdfp {

double power_iteration_opnorm(const LinearMap& d, const PowerIterationOptions& opts) {
  if (!(opts.tol > 0.0)) throw ParameterError("power iteration: tol must be positive");
  if (opts.max_iter == 0) throw ParameterError("power iteration: max_iter must be positive");

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec u(d.in_dim());
  for (double& e : u) e = normal(rng);
  double nrm = norm2(u);
  if (nrm == 0.0) throw ParameterError("power iteration: empty operator");
  for (double& e : u) e /= nrm;

  Vec du(d.out_dim());
  Vec w(d.in_dim());
  double estimate = 0.0;
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    d.apply(u, du);
    d.apply_adjoint(du, w);
    // u has unit norm, so the Rayleigh quotient is <u, D^T D u> = ||D u||^2.
    const double rayleigh = kernels::squared_norm(du);
    nrm = norm2(w);
    if (nrm == 0.0 || rayleigh == 0.0)
      throw ParameterError("power iteration: operator is zero on the iterate");
    if (it > 0 && std::abs(rayleigh - estimate) <= opts.tol * rayleigh) {
      return rayleigh;
    }
    estimate = rayleigh;
    for (std::size_t i = 0; i < w.size(); ++i) u[i] = w[i] / nrm;
  }
  throw ConvergenceError("power iteration did not converge within " +
                             std::to_string(opts.max_iter) + " iterations",
                         estimate);
}

double gram_max_eigenvalue(const LinearMap& d, const PowerIterationOptions& opts) {
  if (auto exact = d.known_gram_max_eigenvalue()) return *exact;
  return power_iteration_opnorm(d, opts) * kOpnormSafetyFactor;
}

}  // namespace pdfp
