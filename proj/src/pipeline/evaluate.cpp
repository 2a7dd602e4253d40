//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/pipeline/evaluate.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <functional>

#include "retrograph/molgraph/canonical.hpp"

namespace retrograph::pipeline {

namespace {

using Predictor = std::function<Prediction(const DatasetEntry&)>;

Evaluation run_evaluation(std::string name, const Dataset& dataset, Split split,
                          std::span<const std::size_t> ks, const Predictor& predictor) {
  const auto entries = dataset.split(split);
  Evaluation out;
  out.records.resize(entries.size());
  const auto n = static_cast<std::ptrdiff_t>(entries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const DatasetEntry& e = *entries[static_cast<std::size_t>(i)];
    PredictionRecord& r = out.records[static_cast<std::size_t>(i)];
    r.id = e.id;
    r.product = molgraph::write_canonical(e.reaction.product);
    r.truth = molgraph::canonical_set(e.reaction.reactants);
    try {
      r.prediction = predictor(e);
    } catch (const std::exception& err) {
      r.prediction = {};
      r.prediction.diagnostic = err.what();
    }
    r.rank = match_rank(r.prediction, r.truth);
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<std::optional<std::size_t>> ranks;
  for (const auto& r : out.records) {
    ranks.push_back(r.rank);
    for (const auto& c : r.prediction.candidates) out.decoded += c.reactants.size();
    out.invalid += r.prediction.invalid_dropped;
  }
  out.table = topk_table(std::move(name), std::string(to_string(split)), ks, ranks);
  return out;
}

}  // namespace

double TopkTable::accuracy(std::size_t i) const {
  return total == 0 ? 0.0 : static_cast<double>(hits.at(i)) / static_cast<double>(total);
}

bool TopkTable::monotone() const {
  for (std::size_t i = 1; i < hits.size(); ++i) {
    if (ks[i] >= ks[i - 1] && hits[i] < hits[i - 1]) return false;
  }
  return true;
}

TopkTable topk_table(std::string name, std::string split, std::span<const std::size_t> ks,
                     std::span<const std::optional<std::size_t>> ranks) {
  TopkTable t{std::move(name), std::move(split), {ks.begin(), ks.end()}, {}, ranks.size()};
  for (const std::size_t k : ks) {
    t.hits.push_back(static_cast<std::size_t>(
        std::count_if(ranks.begin(), ranks.end(), [k](const auto& r) { return r && *r < k; })));
  }
  return t;
}

std::optional<std::size_t> match_rank(const Prediction& prediction,
                                      std::span<const std::string> truth) {
  for (std::size_t i = 0; i < prediction.candidates.size(); ++i) {
    const auto& got = prediction.candidates[i].reactants;
    if (std::equal(got.begin(), got.end(), truth.begin(), truth.end())) return i;
  }
  return std::nullopt;
}

Evaluation evaluate_topk(const CenterStage& center, const TranslateStage& translate,
                         const Dataset& dataset, Split split, const RunConfig& config,
                         std::span<const std::size_t> ks) {
  return run_evaluation("end_to_end", dataset, split, ks, [&](const DatasetEntry& e) {
    return predict(center, translate, e.reaction.product,
                   config.class_known ? e.reaction.reaction_class : std::nullopt, config, e.id);
  });
}

Evaluation evaluate_translation_topk(const TranslateStage& translate, const Dataset& dataset,
                                     Split split, const RunConfig& config,
                                     std::span<const std::size_t> ks) {
  return run_evaluation("translation", dataset, split, ks, [&](const DatasetEntry& e) {
    const auto centers = center::derive_labels(e.reaction).positives();
    return predict_with_centers(translate, e.reaction.product, centers,
                                config.class_known ? e.reaction.reaction_class : std::nullopt,
                                config, e.id);
  });
}

TopkTable evaluate_center_topk(const CenterStage& center, const Dataset& dataset, Split split,
                               const RunConfig& config, std::span<const std::size_t> ks) {
  const auto entries = dataset.split(split);
  std::vector<std::vector<char>> hit(entries.size(), std::vector<char>(ks.size(), 0));
  const auto n = static_cast<std::ptrdiff_t>(entries.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& rxn = entries[static_cast<std::size_t>(i)]->reaction;
    try {
      const auto prepared = center::prepare_product(rxn.product, center.model.vocab());
      const auto scores = center.model.score_pairs(
          center.store, prepared, config.class_known ? rxn.reaction_class : std::nullopt);
      const auto y = center::derive_labels(rxn);
      for (std::size_t j = 0; j < ks.size(); ++j) {
        hit[static_cast<std::size_t>(i)][j] =
            center::center_hit(scores, rxn.product, y, ks[j], config.threshold);
      }
    } catch (const std::invalid_argument&) {
      // unknown element or class: a miss at every k
    }
  }
  TopkTable t{"center", std::string(to_string(split)), {ks.begin(), ks.end()}, {}, entries.size()};
  for (std::size_t j = 0; j < ks.size(); ++j) {
    t.hits.push_back(static_cast<std::size_t>(
        std::count_if(hit.begin(), hit.end(), [j](const auto& h) { return h[j] != 0; })));
  }
  return t;
}

std::string format_table(const TopkTable& table) {
  std::string out = table.name + " top-k on " + table.split + " (" + std::to_string(table.total) +
                    " reactions)\n";
  out += "     k      hits   accuracy\n";
  char line[64];
  for (std::size_t i = 0; i < table.ks.size(); ++i) {
    std::snprintf(line, sizeof line, "%6zu  %8zu   %7.2f%%\n", table.ks[i], table.hits[i],
                  100.0 * table.accuracy(i));
    out += line;
  }
  return out;
}

std::string table_jsonl(const TopkTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.ks.size(); ++i) {
    const nlohmann::ordered_json j = {{"record", "metric"},   {"eval", table.name},
                                      {"split", table.split}, {"k", table.ks[i]},
                                      {"hits", table.hits[i]}, {"total", table.total},
                                      {"accuracy", table.accuracy(i)}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string prediction_jsonl(std::span<const PredictionRecord> records) {
  std::string out;
  for (const auto& r : records) {
    nlohmann::ordered_json candidates = nlohmann::ordered_json::array();
    for (const auto& c : r.prediction.candidates) {
      nlohmann::ordered_json centers = nlohmann::ordered_json::array();
      for (const auto& [a, b] : c.centers) centers.push_back({a, b});
      candidates.push_back({{"reactants", c.reactants}, {"score", c.score}, {"centers", centers}});
    }
    nlohmann::ordered_json j = {{"record", "prediction"}, {"id", r.id}, {"product", r.product}};
    if (!r.truth.empty()) {
      j["truth"] = r.truth;
      j["rank"] = r.rank ? nlohmann::ordered_json(*r.rank + 1) : nlohmann::ordered_json(nullptr);
    }
    j["candidates"] = candidates;
    if (!r.prediction.diagnostic.empty()) j["diagnostic"] = r.prediction.diagnostic;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace retrograph::pipeline
