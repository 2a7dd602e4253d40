//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "retrograph/numcore/params.hpp"
#include "retrograph/numcore/tensor.hpp"

namespace retrograph::numcore {

/// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const { return id != kNone; }
};

/// Misuse of the tape, e.g. differentiating before anything was recorded.
class TapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Neighbour lists in compressed form; row v lists the sources summed into v.
struct Adjacency {
  std::vector<std::uint32_t> offsets;  // size n + 1
  std::vector<std::uint32_t> targets;

  std::size_t nodes() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

/// Recorded-tape reverse mode over a closed operation vocabulary:
///
///   matmul, add, add_row (broadcast), scale, mul (elementwise), concat_cols,
///   relu, sigmoid, clamp, gather_rows, propagate ((A + I) * H), sum_rows,
///   sum_all, log_softmax_at (masked softmax cross-entropy), weighted_bce
///   (sigmoid cross-entropy), gaussian_sample (reparameterised draw) and
///   kl_standard_normal.
///
/// Each op stores its forward value; backward() walks the record in reverse
/// and accumulates parameter gradients into a caller-provided Gradients.
class Tape {
 public:
  explicit Tape(const ParameterStore& params) : params_(&params) {}

  Var constant(Tensor2 value);
  Var param(ParamId id);

  const Tensor2& value(Var v) const { return nodes_.at(v.id).value; }
  double scalar(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var add_row(Var a, Var row);
  Var scale(Var a, double factor);
  Var mul(Var a, Var b);
  Var concat_cols(std::span<const Var> parts);
  Var relu(Var a);
  Var sigmoid(Var a);
  Var clamp(Var a, double lo, double hi);
  Var gather_rows(Var a, std::vector<std::uint32_t> rows);
  Var propagate(Var h, const Adjacency& adj);
  Var sum_rows(Var a);
  Var sum_all(Var a);

  /// log softmax(flatten(logits))[index] under `mask` (empty = all admitted).
  Var log_softmax_at(Var logits, std::span<const char> mask, std::size_t index);

  /// -sum_r [w * y_r * log s_r + (1 - y_r) * log(1 - s_r)], s = sigmoid(logits),
  /// with s clamped to [1e-12, 1 - 1e-12].
  Var weighted_bce(Var logits, std::span<const double> targets, double positive_weight);

  /// mu + exp(logvar / 2) * eps, eps held constant.
  Var gaussian_sample(Var mu, Var logvar, std::span<const double> eps);

  /// 0.5 * sum(mu^2 + exp(logvar) - logvar - 1).
  Var kl_standard_normal(Var mu, Var logvar);

  /// Accumulates d(root)/d(param) into `grads`. Root must be a 1x1 value.
  void backward(Var root, Gradients& grads) const;

 private:
  enum class Op : std::uint8_t {
    kConstant,
    kParam,
    kMatmul,
    kAdd,
    kAddRow,
    kScale,
    kMul,
    kConcat,
    kRelu,
    kSigmoid,
    kClamp,
    kGather,
    kPropagate,
    kSumRows,
    kSumAll,
    kLogSoftmaxAt,
    kWeightedBce,
    kGaussianSample,
    kKl,
  };

  struct Node {
    Op op = Op::kConstant;
    std::size_t a = Var::kNone;
    std::size_t b = Var::kNone;
    std::size_t aux = Var::kNone;  // index into index_/real_ storage
    ParamId param = 0;
    double s0 = 0.0;
    double s1 = 0.0;
    bool needs_grad = false;
    Tensor2 value;
  };

  Var push(Node node);
  const Node& node(Var v) const;
  bool grad_flows(std::size_t id) const { return id != Var::kNone && nodes_[id].needs_grad; }

  const ParameterStore* params_;
  std::vector<Node> nodes_;
  std::vector<std::vector<std::uint32_t>> index_;
  std::vector<std::vector<double>> real_;
  std::vector<std::vector<std::size_t>> concat_inputs_;
};

}  // namespace retrograph::numcore
