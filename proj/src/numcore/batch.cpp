//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/numcore/batch.hpp"

#include <exception>
#include <vector>

namespace retrograph::numcore {

double accumulate_batch(const ParameterStore& store, std::size_t count, const ExampleFn& example,
                        Gradients& out) {
  std::vector<Gradients> grads(count);
  std::vector<double> losses(count, 0.0);
  std::vector<std::exception_ptr> errors(count);
  const auto n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      grads[i] = Gradients(store);
      losses[i] = example(static_cast<std::size_t>(i), grads[i]);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    out.add(grads[i]);
    total += losses[i];
  }
  return total;
}

double accumulate_batch_serial(const ParameterStore& store, std::size_t count,
                               const ExampleFn& example, Gradients& out) {
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    Gradients g(store);
    total += example(i, g);
    out.add(g);
  }
  return total;
}

}  // namespace retrograph::numcore
