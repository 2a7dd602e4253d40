//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "retrograph/numcore/tensor.hpp"

// Dense matrix kernels. Each kernel has an OpenMP version and a serial
// reference; both evaluate every output element with the same loop order, so
// their results are bit-identical for any thread count.
namespace retrograph::numcore::kernels {

/// Work (multiply-adds) below which the OpenMP kernels stay single-threaded.
inline constexpr std::size_t kParallelWorkThreshold = 1 << 16;

/// out = a * b
void matmul(const Tensor2& a, const Tensor2& b, Tensor2& out);
void matmul_serial(const Tensor2& a, const Tensor2& b, Tensor2& out);

/// out += transpose(a) * b
void matmul_tn_acc(const Tensor2& a, const Tensor2& b, Tensor2& out);
void matmul_tn_acc_serial(const Tensor2& a, const Tensor2& b, Tensor2& out);

/// out += a * transpose(b)
void matmul_nt_acc(const Tensor2& a, const Tensor2& b, Tensor2& out);
void matmul_nt_acc_serial(const Tensor2& a, const Tensor2& b, Tensor2& out);

/// Number of threads the parallel kernels may use.
int max_threads();
void set_threads(int n);

}  // namespace retrograph::numcore::kernels
