//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <span>
#include <string>
#include <vector>

#include "retrograph/numcore/params.hpp"
#include "retrograph/numcore/tape.hpp"

namespace retrograph::numcore {

/// Multi-layer perceptron: affine layers with ReLU between them and raw
/// logits at the output. Weights live in a ParameterStore.
class FeedForward {
 public:
  FeedForward() = default;
  FeedForward(ParameterStore& store, const std::string& name, std::vector<std::size_t> widths,
              Rng& rng);

  /// Evaluates a single input vector without recording a tape.
  std::vector<double> apply(const ParameterStore& store, std::span<const double> input) const;

  /// Row-wise application to an (rows x in_width) value on the tape.
  Var forward(Tape& tape, Var input) const;

  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t in_width() const { return widths_.front(); }
  std::size_t out_width() const { return widths_.back(); }
  std::size_t layers() const { return weights_.size(); }
  ParamId weight(std::size_t layer) const { return weights_.at(layer); }
  ParamId bias(std::size_t layer) const { return biases_.at(layer); }

 private:
  std::vector<std::size_t> widths_;
  std::vector<ParamId> weights_;
  std::vector<ParamId> biases_;
};

}  // namespace retrograph::numcore
