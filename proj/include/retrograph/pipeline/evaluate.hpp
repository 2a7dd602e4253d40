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

#include "retrograph/pipeline/predict.hpp"

namespace retrograph::pipeline {

inline constexpr std::size_t kReactantTopK[] = {1, 3, 5, 10};

struct TopkTable {
  std::string name;   // end_to_end, center or translation
  std::string split;
  std::vector<std::size_t> ks;
  std::vector<std::size_t> hits;  // per k
  std::size_t total = 0;

  double accuracy(std::size_t i) const;
  bool monotone() const;
};

/// Counts, for each k, the ranks below k. A rank of nullopt is a miss.
TopkTable topk_table(std::string name, std::string split, std::span<const std::size_t> ks,
                     std::span<const std::optional<std::size_t>> ranks);

struct PredictionRecord {
  std::size_t id = 0;
  std::string product;             // canonical, without maps
  std::vector<std::string> truth;  // canonical reactant multiset, sorted; empty when unknown
  Prediction prediction;
  std::optional<std::size_t> rank;  // 0-based position of the truth, if listed
};

struct Evaluation {
  TopkTable table;
  std::vector<PredictionRecord> records;  // by dataset id
  std::size_t decoded = 0;  // molecules decoded across all candidates
  std::size_t invalid = 0;  // molecules dropped for failing valence_ok
};

/// Position of `truth` in the candidate list.
std::optional<std::size_t> match_rank(const Prediction& prediction,
                                      std::span<const std::string> truth);

/// Full pipeline on one split; reactions run in parallel.
Evaluation evaluate_topk(const CenterStage& center, const TranslateStage& translate,
                         const Dataset& dataset, Split split, const RunConfig& config,
                         std::span<const std::size_t> ks = kReactantTopK);

/// Decoding from the true centers only.
Evaluation evaluate_translation_topk(const TranslateStage& translate, const Dataset& dataset,
                                     Split split, const RunConfig& config,
                                     std::span<const std::size_t> ks = kReactantTopK);

/// Center hits as defined by center::center_hit. Products with unknown
/// elements count as misses.
TopkTable evaluate_center_topk(const CenterStage& center, const Dataset& dataset, Split split,
                               const RunConfig& config,
                               std::span<const std::size_t> ks = center::kCenterTopK);

/// Fixed-width text table, one row per k.
std::string format_table(const TopkTable& table);

/// One JSON object per line: one per k for a table, one per reaction for records.
std::string table_jsonl(const TopkTable& table);
std::string prediction_jsonl(std::span<const PredictionRecord> records);

}  // namespace retrograph::pipeline
