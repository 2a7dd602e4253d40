//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/numcore/feedforward.hpp"

#include <stdexcept>

namespace retrograph::numcore {

FeedForward::FeedForward(ParameterStore& store, const std::string& name,
                         std::vector<std::size_t> widths, Rng& rng)
    : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw std::invalid_argument("feedforward needs at least two widths");
  for (std::size_t w : widths_) {
    if (w == 0) throw std::invalid_argument("feedforward layer width must be positive");
  }
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    const std::size_t in = widths_[l];
    const std::size_t out = widths_[l + 1];
    const std::string prefix = name + ".l" + std::to_string(l);
    weights_.push_back(store.add_uniform(prefix + ".w", in, out, in, rng));
    biases_.push_back(store.add_uniform(prefix + ".b", 1, out, in, rng));
  }
}

std::vector<double> FeedForward::apply(const ParameterStore& store,
                                       std::span<const double> input) const {
  if (input.size() != in_width()) {
    throw ShapeError("feedforward input has length " + std::to_string(input.size()) +
                     ", expected " + std::to_string(in_width()));
  }
  std::vector<double> x(input.begin(), input.end());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const Tensor2& w = store[weights_[l]].value;
    const Tensor2& b = store[biases_[l]].value;
    std::vector<double> y(b.data().begin(), b.data().end());
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) continue;
      auto wr = w.row(i);
      for (std::size_t j = 0; j < y.size(); ++j) y[j] += x[i] * wr[j];
    }
    if (l + 1 < weights_.size()) {
      for (double& v : y) v = v > 0.0 ? v : 0.0;
    }
    x = std::move(y);
  }
  return x;
}

Var FeedForward::forward(Tape& tape, Var input) const {
  if (tape.value(input).cols() != in_width()) {
    throw ShapeError("feedforward input has width " + std::to_string(tape.value(input).cols()) +
                     ", expected " + std::to_string(in_width()));
  }
  Var x = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    x = tape.add_row(tape.matmul(x, tape.param(weights_[l])), tape.param(biases_[l]));
    if (l + 1 < weights_.size()) x = tape.relu(x);
  }
  return x;
}

}  // namespace retrograph::numcore
