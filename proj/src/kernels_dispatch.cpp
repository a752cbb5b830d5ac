#include <cstdlib>
#include <iostream>
#include <string_view>

#include "pdfp/kernels.hpp"

namespace pdfp::kernels {
namespace {

const KernelTable& select() {
  const char* forced = std::getenv("PDFP_KERNELS");
  if (forced != nullptr) {
    const std::string_view want(forced);
    if (want == "scalar") return scalar_table();
    if (want == "avx2") {
      if (const KernelTable* t = avx2_table()) return *t;
      std::cerr << "pdfp: PDFP_KERNELS=avx2 requested but unavailable, "
                   "using scalar kernels\n";
      return scalar_table();
    }
  }
  if (const KernelTable* t = avx2_table()) return *t;
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace pdfp::kernels
