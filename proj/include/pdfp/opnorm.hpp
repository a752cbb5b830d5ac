#pragma once

#include <cstddef>
#include <cstdint>

#include "pdfp/linear_map.hpp"

namespace pdfp {

struct PowerIterationOptions {
  double tol = 1e-12;
  std::size_t max_iter = 20000;
  std::uint64_t seed = 1;
};

// Estimates lambda_max(D D^T) (= lambda_max(D^T D)) by power iteration on
// D^T D started from a seeded Gaussian vector. Stops when the relative change
// of the Rayleigh quotient falls below tol. Throws ConvergenceError (carrying
// the last estimate) when max_iter is exhausted and ParameterError when D is
// numerically zero.
double power_iteration_opnorm(const LinearMap& d, const PowerIterationOptions& opts = {});

// lambda_max(D D^T): the closed form when the map knows it, otherwise the
// power-iteration estimate inflated by the (1 + 1e-6) safety factor so that
// an underestimate cannot violate a step-size bound.
double gram_max_eigenvalue(const LinearMap& d, const PowerIterationOptions& opts = {});

inline constexpr double kOpnormSafetyFactor = 1.0 + 1e-6;

}  // namespace pdfp
