#pragma once

// Dense vector kernels used by every inner loop of the solvers.
//
// Each kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2/FMA variant. The variant is chosen once at first use from the
// host's CPU features; PDFP_KERNELS=scalar|avx2 in the environment forces a
// choice. Element-wise kernels give the same result for an element
// regardless of its offset in the array (tails use std::fma in the AVX2
// variant), so results computed on sub-blocks agree bitwise with results
// computed on the concatenation. Reductions (dot) do not share that property
// between variants.

#include <cstddef>
#include <span>
#include <string_view>

namespace pdfp::kernels {

struct KernelTable {
  std::string_view name;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[i] = a * x[i] + b * y[i]
  void (*lincomb)(double a, const double* x, double b, const double* y,
                  double* out, std::size_t n);
  // out[i] = sign(x[i]) * max(|x[i]| - tau, 0)
  void (*soft_threshold)(const double* x, double tau, double* out,
                         std::size_t n);
  // y = A x, A row-major rows x cols
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols,
               const double* x, double* y);
  // y = A^T x, A row-major rows x cols
  void (*gemv_t)(const double* a, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
};

const KernelTable& scalar_table();

// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// The table selected for this process.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double squared_norm(std::span<const double> a) {
  return active().dot(a.data(), a.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void lincomb(double a, std::span<const double> x, double b,
                    std::span<const double> y, std::span<double> out) {
  active().lincomb(a, x.data(), b, y.data(), out.data(), x.size());
}

inline void soft_threshold(std::span<const double> x, double tau,
                           std::span<double> out) {
  active().soft_threshold(x.data(), tau, out.data(), x.size());
}

}  // namespace pdfp::kernels
