//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "retrograph/translate/model.hpp"

namespace retrograph::translate {

struct BeamOptions {
  std::size_t k = 10;
  std::size_t max_steps = 20;
};

struct Decoded {
  TranslationState state;
  std::string canonical;  // canonical string without maps
  double logprob = 0.0;
  bool stopped = true;  // false when the step limit ended the trace
};

/// Standard-normal draw of width `latent`.
std::vector<double> sample_prior(std::size_t latent, numcore::Rng& rng);

/// Beam decode from `start` under a fixed latent code. Each live state
/// contributes its k best valid actions; stops go to the pool, other
/// children are merged by state (keeping the best score) and the k best
/// survive. States still live after max_steps enter the pool as they are if
/// they could stop. The pool is merged by canonical string, sorted by
/// descending score (ties by string) and cut to k.
std::vector<Decoded> beam_generate(const TranslateModel& model, const numcore::ParameterStore& store,
                                   const TranslationState& start, const BeamOptions& options,
                                   std::span<const double> z, std::optional<int> reaction_class);

}  // namespace retrograph::translate
