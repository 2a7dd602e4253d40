//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "retrograph/numcore/tensor.hpp"

namespace retrograph::numcore {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kContainerVersion = 1;

/// Flat binary container of named tensors and string metadata.
///
/// Layout (all integers little-endian):
///   8-byte magic "RTGRAPH\0", u32 format version,
///   u32 metadata count, then per entry u32 key length, key, u32 value length, value,
///   u32 tensor count, then per entry u32 name length, name, u64 rows, u64 cols,
///     rows*cols IEEE-754 binary64 values,
///   u64 FNV-1a checksum of every preceding byte.
struct TensorContainer {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::pair<std::string, Tensor2>> tensors;

  const Tensor2* tensor(std::string_view name) const;
  std::optional<std::string> meta(std::string_view key) const;
};

std::string serialize(const TensorContainer& container);
TensorContainer deserialize(std::string_view bytes);

void save_container(const std::filesystem::path& path, const TensorContainer& container);
TensorContainer load_container(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace retrograph::numcore
