//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace retrograph::numcore {

/// Raised when a masked softmax has no admissible entry.
class DegenerateDistribution : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

double sigmoid(double x);

/// Masked softmax. `mask` may be empty (all entries admissible); otherwise a
/// zero entry excludes that position and its probability is exactly 0.
std::vector<double> softmax(std::span<const double> logits, std::span<const char> mask = {});

/// Masked log-softmax; excluded entries are -infinity.
std::vector<double> log_softmax(std::span<const double> logits, std::span<const char> mask = {});

/// log(sum(exp(values))) over finite entries; -infinity when none are finite.
double log_sum_exp(std::span<const double> values);

}  // namespace retrograph::numcore
