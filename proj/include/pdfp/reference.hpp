#pragma once

// Reference solver for  min_x f(x) + tau ||x||_1  (accelerated proximal
// gradient with adaptive restart). It shares no step logic with the
// primal-dual solvers and is what their results are checked against.

#include <cstddef>

#include "pdfp/linalg.hpp"
#include "pdfp/smooth.hpp"

namespace pdfp {

struct ReferenceOptions {
  // Stop when ||x - prox_{t tau ||.||_1}(x - t grad f(x))|| / t <= tol, t = 1/L.
  double tol = 1e-10;
  std::size_t max_iter = 1000000;
};

struct ReferenceResult {
  Vec x;
  double objective = 0.0;
  double certificate = 0.0;  // prox-gradient mapping norm at x
  double subgradient_residual = 0.0;  // dist(0, grad f(x) + tau d||x||_1)
  std::size_t iterations = 0;
  bool converged = false;
};

ReferenceResult solve_l1_reference(const SmoothFn& f, double tau,
                                   const ReferenceOptions& opts = {}, Vec x0 = {});

// dist(0, grad + tau d||x||_1)
double l1_subgradient_residual(std::span<const double> x, std::span<const double> grad,
                               double tau);

}  // namespace pdfp
