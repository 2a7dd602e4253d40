//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "retrograph/molgraph/features.hpp"
#include "retrograph/molgraph/reaction.hpp"
#include "retrograph/translate/state.hpp"

namespace retrograph::pipeline {

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Split : std::uint8_t { kTrain, kVal, kTest };

std::string_view to_string(Split split);
Split parse_split(std::string_view text);

struct DatasetEntry {
  std::size_t id = 0;  // 0-based position among the valid lines of the source file
  std::string text;    // reactants>>product as read
  molgraph::Reaction reaction;
  Split split = Split::kTrain;
};

struct Dataset {
  std::vector<DatasetEntry> entries;
  molgraph::ElementVocabulary elements;  // from the training split
  translate::AtomVocabulary atoms;       // new-atom types of the training split
  std::uint64_t seed = 0;
  std::vector<std::string> skipped;  // one diagnostic per rejected line

  std::vector<const DatasetEntry*> split(Split which) const;
};

/// One reaction line: `reactants>>product<TAB>class`, class 0 meaning unknown.
struct ReactionLine {
  std::string text;
  std::optional<int> reaction_class;
};

/// Parses and checks one line. Throws std::invalid_argument (or a subclass) on
/// anything that cannot be trained on.
molgraph::Reaction parse_line(std::string_view line, ReactionLine* raw = nullptr);

/// Reads a reaction file, skips malformed lines with a warning, shuffles with
/// `seed` and assigns an 80/10/10 split. Throws DatasetError when the file
/// cannot be read or holds no valid reaction.
Dataset ingest(const std::filesystem::path& path, std::uint64_t seed);
Dataset ingest_text(std::string_view text, std::uint64_t seed);

/// Dataset manifest: vocabulary header lines followed by one line per entry.
std::string write_dataset(const Dataset& dataset);
Dataset read_dataset(std::string_view text);
void save_dataset(const std::filesystem::path& path, const Dataset& dataset);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace retrograph::pipeline
