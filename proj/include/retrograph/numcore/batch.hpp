//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <functional>

#include "retrograph/numcore/params.hpp"

namespace retrograph::numcore {

/// Computes one example's loss and adds its gradient into the given buffer.
/// Must only read the parameter store.
using ExampleFn = std::function<double(std::size_t example, Gradients& grads)>;

/// Evaluates `count` examples, each into its own gradient buffer, then sums
/// the buffers into `out` in example order. The result does not depend on
/// the thread count. Returns the summed loss.
double accumulate_batch(const ParameterStore& store, std::size_t count, const ExampleFn& example,
                        Gradients& out);

/// Single-threaded reference with the same reduction order.
double accumulate_batch_serial(const ParameterStore& store, std::size_t count,
                               const ExampleFn& example, Gradients& out);

}  // namespace retrograph::numcore
