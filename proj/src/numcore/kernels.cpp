//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/numcore/kernels.hpp"

#include <omp.h>

#include <cstddef>

namespace retrograph::numcore::kernels {
namespace {

void check_matmul(const Tensor2& a, const Tensor2& b, const Tensor2& out) {
  if (a.cols() != b.rows() || out.rows() != a.rows() || out.cols() != b.cols()) {
    throw ShapeError("matmul shape mismatch: " + a.shape_string() + " * " + b.shape_string() +
                     " -> " + out.shape_string());
  }
}

void check_tn(const Tensor2& a, const Tensor2& b, const Tensor2& out) {
  if (a.rows() != b.rows() || out.rows() != a.cols() || out.cols() != b.cols()) {
    throw ShapeError("matmul_tn shape mismatch: " + a.shape_string() + "^T * " +
                     b.shape_string() + " -> " + out.shape_string());
  }
}

void check_nt(const Tensor2& a, const Tensor2& b, const Tensor2& out) {
  if (a.cols() != b.cols() || out.rows() != a.rows() || out.cols() != b.rows()) {
    throw ShapeError("matmul_nt shape mismatch: " + a.shape_string() + " * " +
                     b.shape_string() + "^T -> " + out.shape_string());
  }
}

// Row bodies shared by the serial and parallel drivers.

inline void matmul_row(const Tensor2& a, const Tensor2& b, Tensor2& out, std::size_t i) {
  const std::size_t inner = a.cols();
  const std::size_t m = b.cols();
  double* o = out.row(i).data();
  for (std::size_t j = 0; j < m; ++j) o[j] = 0.0;
  const double* ar = a.row(i).data();
  for (std::size_t k = 0; k < inner; ++k) {
    const double av = ar[k];
    if (av == 0.0) continue;
    const double* br = b.row(k).data();
    for (std::size_t j = 0; j < m; ++j) o[j] += av * br[j];
  }
}

inline void tn_row(const Tensor2& a, const Tensor2& b, Tensor2& out, std::size_t p) {
  const std::size_t n = a.rows();
  const std::size_t m = b.cols();
  double* o = out.row(p).data();
  for (std::size_t r = 0; r < n; ++r) {
    const double av = a(r, p);
    if (av == 0.0) continue;
    const double* br = b.row(r).data();
    for (std::size_t q = 0; q < m; ++q) o[q] += av * br[q];
  }
}

inline void nt_row(const Tensor2& a, const Tensor2& b, Tensor2& out, std::size_t i) {
  const std::size_t inner = a.cols();
  const double* ar = a.row(i).data();
  for (std::size_t j = 0; j < b.rows(); ++j) {
    const double* br = b.row(j).data();
    double s = 0.0;
    for (std::size_t k = 0; k < inner; ++k) s += ar[k] * br[k];
    out(i, j) += s;
  }
}

}  // namespace

void matmul_serial(const Tensor2& a, const Tensor2& b, Tensor2& out) {
  check_matmul(a, b, out);
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, out, i);
}

void matmul(const Tensor2& a, const Tensor2& b, Tensor2& out) {
  check_matmul(a, b, out);
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
  const std::size_t work = a.rows() * a.cols() * b.cols();
#pragma omp parallel for schedule(static) if (work > kParallelWorkThreshold)
  for (std::ptrdiff_t i = 0; i < rows; ++i) matmul_row(a, b, out, static_cast<std::size_t>(i));
}

void matmul_tn_acc_serial(const Tensor2& a, const Tensor2& b, Tensor2& out) {
  check_tn(a, b, out);
  for (std::size_t p = 0; p < a.cols(); ++p) tn_row(a, b, out, p);
}

void matmul_tn_acc(const Tensor2& a, const Tensor2& b, Tensor2& out) {
  check_tn(a, b, out);
  const auto rows = static_cast<std::ptrdiff_t>(a.cols());
  const std::size_t work = a.rows() * a.cols() * b.cols();
#pragma omp parallel for schedule(static) if (work > kParallelWorkThreshold)
  for (std::ptrdiff_t p = 0; p < rows; ++p) tn_row(a, b, out, static_cast<std::size_t>(p));
}

void matmul_nt_acc_serial(const Tensor2& a, const Tensor2& b, Tensor2& out) {
  check_nt(a, b, out);
  for (std::size_t i = 0; i < a.rows(); ++i) nt_row(a, b, out, i);
}

void matmul_nt_acc(const Tensor2& a, const Tensor2& b, Tensor2& out) {
  check_nt(a, b, out);
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
  const std::size_t work = a.rows() * a.cols() * b.rows();
#pragma omp parallel for schedule(static) if (work > kParallelWorkThreshold)
  for (std::ptrdiff_t i = 0; i < rows; ++i) nt_row(a, b, out, static_cast<std::size_t>(i));
}

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace retrograph::numcore::kernels
