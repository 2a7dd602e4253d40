//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/numcore/adam.hpp"

#include <cmath>

namespace retrograph::numcore {

Adam::Adam(const ParameterStore& store, AdamConfig config) : config_(config) {
  for (const auto& p : store) {
    m_.emplace_back(p.value.rows(), p.value.cols());
    v_.emplace_back(p.value.rows(), p.value.cols());
  }
}

void Adam::step(ParameterStore& store, const Gradients& grads) {
  if (store.size() != m_.size() || grads.size() != m_.size()) {
    throw ShapeError("adam: parameter/gradient/state counts differ");
  }
  for (std::size_t i = 0; i < m_.size(); ++i) {
    if (!store[i].value.same_shape(m_[i]) || !grads[i].same_shape(m_[i])) {
      throw ShapeError("adam: shape mismatch for parameter " + store[i].name);
    }
  }
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < m_.size(); ++i) {
    auto theta = store[i].value.data();
    auto g = grads[i].data();
    auto m = m_[i].data();
    auto v = v_[i].data();
    for (std::size_t j = 0; j < theta.size(); ++j) {
      m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g[j];
      v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      theta[j] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

void Adam::restore(std::uint64_t steps, std::vector<Tensor2> m, std::vector<Tensor2> v) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw ShapeError("adam: restored state has wrong tensor count");
  }
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i].same_shape(m_[i]) || !v[i].same_shape(v_[i])) {
      throw ShapeError("adam: restored moment shape mismatch");
    }
  }
  steps_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace retrograph::numcore
