//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/pipeline/checkpoint.hpp"

#include <spdlog/spdlog.h>

#include <charconv>

namespace retrograph::pipeline {

namespace {

constexpr const char* kFormat = "retrograph-checkpoint";

// Separate streams so the two models never share initial weights.
constexpr std::uint64_t kCenterInitStream = 0xC3;
constexpr std::uint64_t kTranslateInitStream = 0x7A;

numcore::AdamConfig adam_config(const RunConfig& config) {
  numcore::AdamConfig a;
  a.learning_rate = config.learning_rate;
  return a;
}

center::TrainOptions train_options(const RunConfig& config, std::size_t start_epoch) {
  center::TrainOptions o;
  o.epochs = config.epochs;
  o.batch_size = config.batch_size;
  o.seed = config.seed;
  o.start_epoch = start_epoch;
  return o;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw CheckpointError("bad value for " + key);
  }
  return v;
}

std::string require_meta(const numcore::TensorContainer& c, const std::string& key) {
  auto v = c.meta(key);
  if (!v) throw CheckpointError("checkpoint lacks '" + key + "'");
  return *v;
}

numcore::TensorContainer base_container(const char* module, const RunConfig& config,
                                        const numcore::ParameterStore& store,
                                        const numcore::Adam& adam, std::size_t epoch) {
  numcore::TensorContainer c;
  c.metadata = {{"format", kFormat},
                {"module", module},
                {"model_hash", model_hash(config)},
                {"config", to_text(config)},
                {"epoch", std::to_string(epoch)},
                {"adam_steps", std::to_string(adam.steps())}};
  const bool has_moments = adam.first_moments().size() == store.size();
  std::size_t i = 0;
  for (const auto& p : store) {
    c.tensors.emplace_back("param/" + p.name, p.value);
    if (has_moments) {
      c.tensors.emplace_back("adam_m/" + p.name, adam.first_moments()[i]);
      c.tensors.emplace_back("adam_v/" + p.name, adam.second_moments()[i]);
    }
    ++i;
  }
  return c;
}

void check_header(const numcore::TensorContainer& c, const char* module, const RunConfig& config) {
  if (require_meta(c, "format") != kFormat) throw CheckpointError("not a retrograph checkpoint");
  const std::string found = require_meta(c, "module");
  if (found != module) {
    throw CheckpointError("checkpoint holds a " + found + " model, expected " + module);
  }
  const std::string hash = require_meta(c, "model_hash");
  if (hash != model_hash(config)) {
    spdlog::warn("checkpoint config hash {} differs from the current config ({}); "
                 "the stored model shape may not match",
                 hash, model_hash(config));
  }
}

const numcore::Tensor2& shaped_tensor(const numcore::TensorContainer& c, const std::string& name,
                                      const numcore::Tensor2& like) {
  const numcore::Tensor2* t = c.tensor(name);
  if (t == nullptr) throw CheckpointError("checkpoint lacks tensor '" + name + "'");
  if (t->rows() != like.rows() || t->cols() != like.cols()) {
    throw CheckpointError("tensor '" + name + "' is " + std::to_string(t->rows()) + "x" +
                          std::to_string(t->cols()) + ", model expects " +
                          std::to_string(like.rows()) + "x" + std::to_string(like.cols()));
  }
  return *t;
}

void restore_state(const numcore::TensorContainer& c, numcore::ParameterStore& store,
                   numcore::Adam& adam, std::size_t& epoch) {
  const std::size_t params = [&] {
    std::size_t n = 0;
    for (const auto& [name, t] : c.tensors) n += name.rfind("param/", 0) == 0;
    return n;
  }();
  if (params != store.size()) {
    throw CheckpointError("checkpoint has " + std::to_string(params) + " parameters, model has " +
                          std::to_string(store.size()));
  }
  const std::uint64_t steps = parse_u64("adam_steps", require_meta(c, "adam_steps"));
  std::vector<numcore::Tensor2> m;
  std::vector<numcore::Tensor2> v;
  for (auto& p : store) {
    p.value = shaped_tensor(c, "param/" + p.name, p.value);
    if (c.tensor("adam_m/" + p.name) != nullptr) {
      m.push_back(shaped_tensor(c, "adam_m/" + p.name, p.value));
      v.push_back(shaped_tensor(c, "adam_v/" + p.name, p.value));
    }
  }
  if (!m.empty() && m.size() != store.size()) throw CheckpointError("incomplete optimizer state");
  if (m.empty()) {
    for (const auto& p : store) {
      m.emplace_back(p.value.rows(), p.value.cols());
      v.emplace_back(p.value.rows(), p.value.cols());
    }
  }
  adam.restore(steps, std::move(m), std::move(v));
  epoch = parse_u64("epoch", require_meta(c, "epoch"));
}

}  // namespace

CenterStage make_center_stage(const molgraph::ElementVocabulary& elements, const RunConfig& config) {
  CenterStage s;
  numcore::Rng rng(numcore::derive_seed(config.seed, kCenterInitStream));
  s.model = center::CenterModel(s.store, elements, center_config(config), rng);
  s.adam = numcore::Adam(s.store, adam_config(config));
  return s;
}

TranslateStage make_translate_stage(const molgraph::ElementVocabulary& elements,
                                    const translate::AtomVocabulary& atoms, const RunConfig& config) {
  TranslateStage s;
  numcore::Rng rng(numcore::derive_seed(config.seed, kTranslateInitStream));
  s.model = translate::TranslateModel(s.store, elements, atoms, translate_config(config), rng);
  s.adam = numcore::Adam(s.store, adam_config(config));
  return s;
}

std::vector<center::CenterExample> center_examples(const Dataset& dataset, Split split,
                                                   const RunConfig& config) {
  std::vector<center::CenterExample> out;
  for (const auto* e : dataset.split(split)) {
    try {
      out.push_back(center::make_example(e->reaction, dataset.elements, config.class_known));
    } catch (const molgraph::VocabularyError& err) {
      spdlog::warn("reaction {} left out: {}", e->id, err.what());
    }
  }
  return out;
}

std::vector<translate::TranslationPair> translation_pairs(const Dataset& dataset, Split split,
                                                          const RunConfig& config) {
  std::vector<translate::TranslationPair> out;
  for (const auto* e : dataset.split(split)) {
    const auto centers = center::derive_labels(e->reaction).positives();
    try {
      auto pairs = translate::make_translation_pairs(e->reaction, centers, dataset.atoms,
                                                     config.class_known, config.trace_cap);
      for (auto& p : pairs) out.push_back(std::move(p));
    } catch (const std::invalid_argument& err) {
      spdlog::warn("reaction {} left out: {}", e->id, err.what());
    }
  }
  return out;
}

std::vector<center::CenterEpoch> train_center_stage(
    CenterStage& stage, const Dataset& dataset, const RunConfig& config,
    const std::function<void(const center::CenterEpoch&)>& on_epoch) {
  const auto train = center_examples(dataset, Split::kTrain, config);
  const auto val = center_examples(dataset, Split::kVal, config);
  stage.adam.set_learning_rate(config.learning_rate);
  auto history = center::train_center(stage.model, stage.store, stage.adam, train, val,
                                      train_options(config, stage.epoch), on_epoch);
  if (!history.empty()) stage.epoch = history.back().epoch + 1;
  return history;
}

std::vector<translate::TranslateEpoch> train_translate_stage(
    TranslateStage& stage, const Dataset& dataset, const RunConfig& config,
    const std::function<void(const translate::TranslateEpoch&)>& on_epoch) {
  const auto train = translation_pairs(dataset, Split::kTrain, config);
  stage.adam.set_learning_rate(config.learning_rate);
  auto history = translate::train_translate(stage.model, stage.store, stage.adam, train,
                                            train_options(config, stage.epoch), on_epoch);
  if (!history.empty()) stage.epoch = history.back().epoch + 1;
  return history;
}

numcore::TensorContainer to_container(const CenterStage& stage, const RunConfig& config) {
  auto c = base_container(kCenterModule, config, stage.store, stage.adam, stage.epoch);
  c.metadata.emplace_back("elements", stage.model.vocab().to_string());
  return c;
}

numcore::TensorContainer to_container(const TranslateStage& stage, const RunConfig& config) {
  auto c = base_container(kTranslateModule, config, stage.store, stage.adam, stage.epoch);
  c.metadata.emplace_back("elements", stage.model.elements().to_string());
  c.metadata.emplace_back("atoms", stage.model.atoms().to_string());
  return c;
}

CenterStage center_from_container(const numcore::TensorContainer& c, const RunConfig& config) {
  check_header(c, kCenterModule, config);
  CenterStage s =
      make_center_stage(molgraph::ElementVocabulary::parse(require_meta(c, "elements")), config);
  restore_state(c, s.store, s.adam, s.epoch);
  return s;
}

TranslateStage translate_from_container(const numcore::TensorContainer& c, const RunConfig& config) {
  check_header(c, kTranslateModule, config);
  TranslateStage s =
      make_translate_stage(molgraph::ElementVocabulary::parse(require_meta(c, "elements")),
                           translate::AtomVocabulary::parse(require_meta(c, "atoms")), config);
  restore_state(c, s.store, s.adam, s.epoch);
  return s;
}

void save_checkpoint(const std::filesystem::path& path, const CenterStage& stage,
                     const RunConfig& config) {
  numcore::save_container(path, to_container(stage, config));
}

void save_checkpoint(const std::filesystem::path& path, const TranslateStage& stage,
                     const RunConfig& config) {
  numcore::save_container(path, to_container(stage, config));
}

CenterStage load_center(const std::filesystem::path& path, const RunConfig& config) {
  return center_from_container(numcore::load_container(path), config);
}

TranslateStage load_translate(const std::filesystem::path& path, const RunConfig& config) {
  return translate_from_container(numcore::load_container(path), config);
}

void check_vocabulary(const CenterStage& stage, const Dataset& dataset) {
  if (stage.model.vocab().size() != dataset.elements.size()) {
    throw CheckpointError("checkpoint element vocabulary has " +
                          std::to_string(stage.model.vocab().size()) + " entries, dataset has " +
                          std::to_string(dataset.elements.size()));
  }
}

void check_vocabulary(const TranslateStage& stage, const Dataset& dataset) {
  if (stage.model.elements().size() != dataset.elements.size() ||
      stage.model.atoms().size() != dataset.atoms.size()) {
    throw CheckpointError("checkpoint vocabulary sizes (" +
                          std::to_string(stage.model.elements().size()) + " elements, " +
                          std::to_string(stage.model.atoms().size()) + " atoms) differ from the dataset (" +
                          std::to_string(dataset.elements.size()) + ", " +
                          std::to_string(dataset.atoms.size()) + ")");
  }
}

}  // namespace retrograph::pipeline
