#pragma once

#include <cstdint>

namespace flashmp {

/// Floating-point operations counted at the kernel call sites.
struct OpCounter {
  std::uint64_t gemm_flops = 0;   // axis contractions
  std::uint64_t bspmv_flops = 0;  // point-wise 3x3 block multiplies
  std::uint64_t gemv_flops = 0;   // dense C^-1 application

  [[nodiscard]] std::uint64_t total() const { return gemm_flops + bspmv_flops + gemv_flops; }

  OpCounter& operator+=(const OpCounter& o) {
    gemm_flops += o.gemm_flops;
    bspmv_flops += o.bspmv_flops;
    gemv_flops += o.gemv_flops;
    return *this;
  }
};

}  // namespace flashmp
