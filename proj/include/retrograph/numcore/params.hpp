//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "retrograph/numcore/tensor.hpp"

namespace retrograph::numcore {

using Rng = std::mt19937_64;
using ParamId = std::size_t;

struct Parameter {
  std::string name;
  Tensor2 value;
};

/// Ordered collection of named trainable tensors. Ids are stable indices.
class ParameterStore {
 public:
  ParamId add(std::string name, Tensor2 value);
  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  ParamId add_uniform(std::string name, std::size_t rows, std::size_t cols, std::size_t fan_in,
                      Rng& rng);

  std::size_t size() const { return params_.size(); }
  Parameter& operator[](ParamId id) { return params_.at(id); }
  const Parameter& operator[](ParamId id) const { return params_.at(id); }
  std::optional<ParamId> find(const std::string& name) const;

  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }

  std::size_t scalar_count() const;

 private:
  std::vector<Parameter> params_;
};

/// Gradient accumulators shaped like a ParameterStore.
class Gradients {
 public:
  Gradients() = default;
  explicit Gradients(const ParameterStore& store);

  std::size_t size() const { return grads_.size(); }
  Tensor2& operator[](ParamId id) { return grads_.at(id); }
  const Tensor2& operator[](ParamId id) const { return grads_.at(id); }

  void zero();
  void add(const Gradients& other);
  void scale(double factor);
  bool all_finite() const;
  double squared_norm() const;

 private:
  std::vector<Tensor2> grads_;
};

/// Derives an independent generator seed from a base seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace retrograph::numcore
