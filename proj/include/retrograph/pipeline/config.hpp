//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "retrograph/center/center.hpp"
#include "retrograph/translate/model.hpp"

namespace retrograph::pipeline {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every tunable of a run. Text form is one `key = value` per line.
struct RunConfig {
  std::size_t layers = 4;          // encoder depth L
  std::size_t width = 512;         // hidden width k
  std::size_t latent = 10;         // |z|
  std::size_t class_width = 32;
  double lambda = 20.0;
  double learning_rate = 1e-4;
  std::size_t batch_size = 128;
  std::size_t epochs = 100;
  std::size_t beam = 10;
  std::size_t max_steps = 20;
  double threshold = 0.5;
  std::size_t centers_k = 1;       // center hypotheses per product
  std::size_t samples = 1;         // latent draws per synthon at decode time
  std::size_t mc_traces = 1;
  std::size_t trace_cap = 4096;
  bool class_known = false;
  std::uint64_t seed = 1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Applies `key = value` lines over the defaults. '#' starts a comment.
/// Unknown keys, repeated keys and malformed values raise ConfigError.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path);

/// Full text with every key, in a fixed order.
std::string to_text(const RunConfig& config);

/// Sets one key from its text value.
void set_value(RunConfig& config, std::string_view key, std::string_view value);

/// Hash of the keys that shape a model (architecture and vocabulary-free
/// settings); decode-only keys are left out.
std::string model_hash(const RunConfig& config);

center::CenterConfig center_config(const RunConfig& config);
translate::TranslateConfig translate_config(const RunConfig& config);

}  // namespace retrograph::pipeline
