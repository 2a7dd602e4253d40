//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "retrograph/molgraph/features.hpp"
#include "retrograph/molgraph/reaction.hpp"
#include "retrograph/molgraph/surgery.hpp"
#include "retrograph/numcore/adam.hpp"
#include "retrograph/numcore/feedforward.hpp"
#include "retrograph/rgcn/rgcn.hpp"

namespace retrograph::center {

using molgraph::AtomPair;

/// Symmetric 0/1 matrix over product atoms with a zero diagonal.
class LabelMatrix {
 public:
  LabelMatrix() = default;
  explicit LabelMatrix(std::size_t n) : n_(n), y_(n * n, 0) {}

  std::size_t size() const { return n_; }
  bool at(std::size_t i, std::size_t j) const { return y_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool v);
  /// Labelled pairs (i < j) in ascending order.
  std::vector<AtomPair> positives() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> y_;
};

/// Y[i][j] = 1 where the product has a bond (i, j) and the map-aligned
/// reactant atoms are not bonded. A change of bond type alone is not a center.
LabelMatrix derive_labels(const molgraph::Reaction& rxn);

struct CenterConfig {
  rgcn::RgcnConfig encoder;
  bool class_conditioned = false;
  std::size_t class_width = 32;
  double lambda = 20.0;
  double threshold = 0.5;
};

/// Product-side inputs reused across epochs.
struct PreparedProduct {
  molgraph::Molecule mol;
  numcore::Tensor2 features;
  rgcn::RelationalGraph graph;
  /// Every unordered pair once, each oriented by canonical rank.
  std::vector<AtomPair> pairs;
  numcore::Tensor2 bond_onehot;  // pairs x kBondTypes
};

PreparedProduct prepare_product(const molgraph::Molecule& product,
                                const molgraph::ElementVocabulary& vocab);

/// Index of unordered pair (i, j), i != j, in PreparedProduct::pairs order.
std::size_t pair_index(std::size_t n, std::size_t i, std::size_t j);

class ClassError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Pair scorer s_ij = sigmoid(m_r(H_a || H_b || onehot(bond) || h_G [|| class])).
class CenterModel {
 public:
  CenterModel() = default;
  CenterModel(numcore::ParameterStore& store, const molgraph::ElementVocabulary& vocab,
              const CenterConfig& config, numcore::Rng& rng);

  /// One logit per entry of prepared.pairs (pairs x 1).
  numcore::Var pair_logits(numcore::Tape& tape, const PreparedProduct& prepared,
                           std::optional<int> reaction_class) const;

  /// n x n scores in (0, 1); symmetric with a zero diagonal.
  numcore::Tensor2 score_pairs(const numcore::ParameterStore& store,
                               const PreparedProduct& prepared,
                               std::optional<int> reaction_class) const;

  /// Weighted cross-entropy over all unordered pairs.
  numcore::Var loss(numcore::Tape& tape, const PreparedProduct& prepared, const LabelMatrix& y,
                    std::optional<int> reaction_class) const;

  const CenterConfig& config() const { return config_; }
  const molgraph::ElementVocabulary& vocab() const { return vocab_; }
  const rgcn::Rgcn& encoder() const { return encoder_; }
  const numcore::FeedForward& scorer() const { return scorer_; }

 private:
  void check_class(std::optional<int> reaction_class) const;

  CenterConfig config_;
  molgraph::ElementVocabulary vocab_;
  rgcn::Rgcn encoder_;
  numcore::FeedForward scorer_;
  std::optional<numcore::ParamId> class_table_;
};

/// -sum_{i<j} [lambda * Y log s + (1 - Y) log(1 - s)], s clamped to [1e-12, 1 - 1e-12].
double center_loss(const numcore::Tensor2& scores, const LabelMatrix& y, double lambda);

/// Bonded pairs scoring above `threshold`, best first, at most k.
std::vector<AtomPair> select_centers(const numcore::Tensor2& scores,
                                     const molgraph::Molecule& product, double threshold,
                                     std::size_t k);

/// Bonded pairs ordered by descending score (ties by index).
std::vector<AtomPair> rank_bonded_pairs(const numcore::Tensor2& scores,
                                        const molgraph::Molecule& product);

/// remove_bonds followed by connected_components.
std::vector<molgraph::Component> split_synthons(const molgraph::Molecule& product,
                                                std::span<const AtomPair> centers);

/// A top-k hit: every true center bond is among the k best-scored bonded
/// pairs. With no true center, a hit means no bonded pair reaches the threshold.
bool center_hit(const numcore::Tensor2& scores, const molgraph::Molecule& product,
                const LabelMatrix& y, std::size_t k, double threshold);

// Training ------------------------------------------------------------------

struct CenterExample {
  PreparedProduct product;
  LabelMatrix labels;
  std::optional<int> reaction_class;
};

CenterExample make_example(const molgraph::Reaction& rxn, const molgraph::ElementVocabulary& vocab,
                           bool use_class);

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainOptions {
  std::size_t epochs = 100;
  std::size_t batch_size = 128;
  std::uint64_t seed = 1;
  std::size_t start_epoch = 0;  // for resumed runs
};

inline constexpr std::size_t kCenterTopK[] = {1, 2, 3, 5};

struct CenterEpoch {
  std::size_t epoch = 0;
  double loss = 0.0;  // mean per example
  std::array<double, 4> topk{};  // on the evaluation examples, k = 1, 2, 3, 5
};

/// Top-k center accuracies for k = 1, 2, 3, 5.
std::array<double, 4> center_accuracy(const CenterModel& model,
                                      const numcore::ParameterStore& store,
                                      std::span<const CenterExample> examples);

/// Mini-batch training with one Adam step per batch. Gradients are averaged
/// over the batch. The shuffle of epoch e uses derive_seed(seed, e), so a run
/// resumed at start_epoch continues the same sequence.
std::vector<CenterEpoch> train_center(const CenterModel& model, numcore::ParameterStore& store,
                                      numcore::Adam& adam, std::span<const CenterExample> train,
                                      std::span<const CenterExample> eval,
                                      const TrainOptions& options,
                                      const std::function<void(const CenterEpoch&)>& on_epoch = {});

}  // namespace retrograph::center
