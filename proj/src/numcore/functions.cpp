//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/numcore/functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "retrograph/numcore/tensor.hpp"

namespace retrograph::numcore {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool admitted(std::span<const char> mask, std::size_t i) { return mask.empty() || mask[i] != 0; }

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> log_softmax(std::span<const double> logits, std::span<const char> mask) {
  if (!mask.empty() && mask.size() != logits.size()) {
    throw ShapeError("softmax mask length does not match logits");
  }
  double top = kNegInf;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (admitted(mask, i)) top = std::max(top, logits[i]);
  }
  if (top == kNegInf) throw DegenerateDistribution("softmax with every entry masked");
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (admitted(mask, i)) sum += std::exp(logits[i] - top);
  }
  const double log_z = top + std::log(sum);
  std::vector<double> out(logits.size(), kNegInf);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (admitted(mask, i)) out[i] = logits[i] - log_z;
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits, std::span<const char> mask) {
  auto out = log_softmax(logits, mask);
  double total = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = admitted(mask, i) ? std::exp(out[i]) : 0.0;
    total += out[i];
  }
  // renormalize so the sum is 1 to rounding
  for (double& p : out) p /= total;
  return out;
}

double log_sum_exp(std::span<const double> values) {
  double top = kNegInf;
  for (double v : values) top = std::max(top, v);
  if (top == kNegInf) return kNegInf;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

}  // namespace retrograph::numcore
