//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "retrograph/numcore/params.hpp"
#include "retrograph/numcore/tape.hpp"

namespace retrograph::testing {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;
  std::size_t checked = 0;
};

/// Compares tape gradients with central finite differences. The loss builder
/// is re-run from the current parameter values for every perturbation.
/// Relative error is |a - n| / max(|a|, |n|, floor).
inline GradCheckResult check_gradients(numcore::ParameterStore& store,
                                       const std::function<numcore::Var(numcore::Tape&)>& loss,
                                       double eps = 1e-5, double floor = 1e-6,
                                       std::size_t max_entries_per_param = 0) {
  numcore::Gradients grads(store);
  {
    numcore::Tape tape(store);
    const numcore::Var root = loss(tape);
    tape.backward(root, grads);
  }
  auto eval = [&]() {
    numcore::Tape tape(store);
    return tape.scalar(loss(tape));
  };
  GradCheckResult result;
  for (numcore::ParamId id = 0; id < store.size(); ++id) {
    auto values = store[id].value.data();
    std::size_t stride = 1;
    if (max_entries_per_param != 0 && values.size() > max_entries_per_param) {
      stride = values.size() / max_entries_per_param;
    }
    for (std::size_t i = 0; i < values.size(); i += stride) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double up = eval();
      values[i] = saved - eps;
      const double down = eval();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double analytic = grads[id].data()[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
      const double rel = std::abs(analytic - numeric) / denom;
      ++result.checked;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst = store[id].name + "[" + std::to_string(i) + "] analytic=" +
                       std::to_string(analytic) + " numeric=" + std::to_string(numeric);
      }
    }
  }
  return result;
}

}  // namespace retrograph::testing
