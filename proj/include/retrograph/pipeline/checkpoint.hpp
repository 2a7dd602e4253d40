//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "retrograph/center/center.hpp"
#include "retrograph/numcore/adam.hpp"
#include "retrograph/numcore/container.hpp"
#include "retrograph/pipeline/config.hpp"
#include "retrograph/pipeline/dataset.hpp"
#include "retrograph/translate/model.hpp"
#include "retrograph/translate/train.hpp"

namespace retrograph::pipeline {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trainable center model with its optimizer and epoch counter.
struct CenterStage {
  numcore::ParameterStore store;
  center::CenterModel model;
  numcore::Adam adam;
  std::size_t epoch = 0;
};

struct TranslateStage {
  numcore::ParameterStore store;
  translate::TranslateModel model;
  numcore::Adam adam;
  std::size_t epoch = 0;
};

CenterStage make_center_stage(const molgraph::ElementVocabulary& elements, const RunConfig& config);
TranslateStage make_translate_stage(const molgraph::ElementVocabulary& elements,
                                    const translate::AtomVocabulary& atoms, const RunConfig& config);

/// Trains up to `config.epochs` total epochs, continuing from stage.epoch.
std::vector<center::CenterEpoch> train_center_stage(
    CenterStage& stage, const Dataset& dataset, const RunConfig& config,
    const std::function<void(const center::CenterEpoch&)>& on_epoch = {});
std::vector<translate::TranslateEpoch> train_translate_stage(
    TranslateStage& stage, const Dataset& dataset, const RunConfig& config,
    const std::function<void(const translate::TranslateEpoch&)>& on_epoch = {});

std::vector<center::CenterExample> center_examples(const Dataset& dataset, Split split,
                                                   const RunConfig& config);
/// Oracle-center translation pairs; reactions whose new atoms fall outside the
/// vocabulary are left out.
std::vector<translate::TranslationPair> translation_pairs(const Dataset& dataset, Split split,
                                                          const RunConfig& config);

inline constexpr const char* kCenterModule = "center";
inline constexpr const char* kTranslateModule = "translate";

numcore::TensorContainer to_container(const CenterStage& stage, const RunConfig& config);
numcore::TensorContainer to_container(const TranslateStage& stage, const RunConfig& config);

/// Rebuilds a stage from a container. The model shape comes from `config`
/// and the vocabularies stored in the container; a differing model hash is
/// reported with a warning, a missing or misshapen tensor is an error.
CenterStage center_from_container(const numcore::TensorContainer& c, const RunConfig& config);
TranslateStage translate_from_container(const numcore::TensorContainer& c, const RunConfig& config);

void save_checkpoint(const std::filesystem::path& path, const CenterStage& stage,
                     const RunConfig& config);
void save_checkpoint(const std::filesystem::path& path, const TranslateStage& stage,
                     const RunConfig& config);
CenterStage load_center(const std::filesystem::path& path, const RunConfig& config);
TranslateStage load_translate(const std::filesystem::path& path, const RunConfig& config);

/// Throws CheckpointError when the stage vocabularies differ in size from the
/// dataset's.
void check_vocabulary(const CenterStage& stage, const Dataset& dataset);
void check_vocabulary(const TranslateStage& stage, const Dataset& dataset);

}  // namespace retrograph::pipeline
