//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <vector>

#include "retrograph/numcore/params.hpp"

namespace retrograph::numcore {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam with one moment pair per parameter tensor.
class Adam {
 public:
  Adam() = default;
  Adam(const ParameterStore& store, AdamConfig config);

  void step(ParameterStore& store, const Gradients& grads);

  std::uint64_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }

  const std::vector<Tensor2>& first_moments() const { return m_; }
  const std::vector<Tensor2>& second_moments() const { return v_; }

  /// Replaces the optimizer state, e.g. when resuming from a checkpoint.
  void restore(std::uint64_t steps, std::vector<Tensor2> m, std::vector<Tensor2> v);

 private:
  AdamConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<Tensor2> m_;
  std::vector<Tensor2> v_;
};

}  // namespace retrograph::numcore
