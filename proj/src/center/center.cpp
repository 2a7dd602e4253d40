//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/center/center.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "retrograph/molgraph/canonical.hpp"
#include "retrograph/numcore/batch.hpp"
#include "retrograph/numcore/functions.hpp"

namespace retrograph::center {

using molgraph::Molecule;
using numcore::Tape;
using numcore::Tensor2;
using numcore::Var;

namespace {

constexpr double kProbabilityFloor = 1e-12;

}  // namespace

void LabelMatrix::set(std::size_t i, std::size_t j, bool v) {
  if (i >= n_ || j >= n_) throw std::out_of_range("label index");
  if (i == j) throw std::invalid_argument("label matrix diagonal must stay zero");
  y_[i * n_ + j] = y_[j * n_ + i] = v ? 1 : 0;
}

std::vector<AtomPair> LabelMatrix::positives() const {
  std::vector<AtomPair> out;
  for (std::uint32_t i = 0; i < n_; ++i) {
    for (std::uint32_t j = i + 1; j < n_; ++j) {
      if (at(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

LabelMatrix derive_labels(const molgraph::Reaction& rxn) {
  const Molecule& p = rxn.product;
  // Map number -> (reactant, atom).
  std::unordered_map<int, std::pair<std::size_t, std::uint32_t>> where;
  for (std::size_t r = 0; r < rxn.reactants.size(); ++r) {
    for (const auto& [map, atom] : molgraph::map_index(rxn.reactants[r])) where[map] = {r, atom};
  }
  LabelMatrix y(p.atom_count());
  for (const auto& b : p.bonds()) {
    const int ma = p.atom(b.a).map_number;
    const int mb = p.atom(b.b).map_number;
    if (ma == 0 || mb == 0) throw molgraph::ReactionError("unmapped product atom");
    const auto ia = where.find(ma);
    const auto ib = where.find(mb);
    if (ia == where.end() || ib == where.end()) {
      throw molgraph::ReactionError("product map number missing from reactants");
    }
    const bool bonded = ia->second.first == ib->second.first &&
                        rxn.reactants[ia->second.first].bond(ia->second.second, ib->second.second);
    if (!bonded) y.set(b.a, b.b, true);
  }
  return y;
}

std::size_t pair_index(std::size_t n, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

PreparedProduct prepare_product(const Molecule& product, const molgraph::ElementVocabulary& vocab) {
  PreparedProduct out;
  out.mol = product;
  out.features = molgraph::node_features(product, vocab);
  out.graph = rgcn::relational_graph(product);
  const auto rank = molgraph::canonical_ranks(product);
  const auto n = static_cast<std::uint32_t>(product.atom_count());
  out.bond_onehot = Tensor2(static_cast<std::size_t>(n) * (n - (n > 0 ? 1 : 0)) / 2,
                            molgraph::kBondTypes);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      const std::size_t k = out.pairs.size();
      out.pairs.push_back(rank[i] < rank[j] ? AtomPair{i, j} : AtomPair{j, i});
      if (const auto t = product.bond(i, j)) out.bond_onehot(k, static_cast<std::size_t>(*t)) = 1.0;
    }
  }
  return out;
}

CenterModel::CenterModel(numcore::ParameterStore& store, const molgraph::ElementVocabulary& vocab,
                         const CenterConfig& config, numcore::Rng& rng)
    : config_(config), vocab_(vocab) {
  encoder_ = rgcn::Rgcn(store, "center.encoder", molgraph::feature_width(vocab), config.encoder, rng);
  const std::size_t k = config.encoder.width;
  std::size_t in = 3 * k + molgraph::kBondTypes;
  if (config.class_conditioned) {
    class_table_ = store.add_uniform("center.class_table", molgraph::kReactionClasses,
                                     config.class_width, config.class_width, rng);
    in += config.class_width;
  }
  scorer_ = numcore::FeedForward(store, "center.scorer", {in, k, 1}, rng);
}

void CenterModel::check_class(std::optional<int> reaction_class) const {
  if (reaction_class && !config_.class_conditioned) {
    throw ClassError("reaction class given but the center model is not class-conditioned");
  }
  if (!reaction_class && config_.class_conditioned) {
    throw ClassError("the center model is class-conditioned; a reaction class is required");
  }
  if (reaction_class && (*reaction_class < 1 || *reaction_class > molgraph::kReactionClasses)) {
    throw ClassError("reaction class out of range");
  }
}

Var CenterModel::pair_logits(Tape& tape, const PreparedProduct& prepared,
                             std::optional<int> reaction_class) const {
  check_class(reaction_class);
  const Var h = encoder_.encode(tape, tape.constant(prepared.features), prepared.graph);
  const Var hg = rgcn::readout(tape, h);
  const std::size_t count = prepared.pairs.size();
  std::vector<std::uint32_t> first(count);
  std::vector<std::uint32_t> second(count);
  for (std::size_t p = 0; p < count; ++p) {
    first[p] = prepared.pairs[p].first;
    second[p] = prepared.pairs[p].second;
  }
  std::vector<Var> parts = {tape.gather_rows(h, std::move(first)),
                            tape.gather_rows(h, std::move(second)),
                            tape.constant(prepared.bond_onehot),
                            tape.gather_rows(hg, std::vector<std::uint32_t>(count, 0))};
  if (class_table_) {
    parts.push_back(tape.gather_rows(
        tape.param(*class_table_),
        std::vector<std::uint32_t>(count, static_cast<std::uint32_t>(*reaction_class - 1))));
  }
  return scorer_.forward(tape, tape.concat_cols(parts));
}

Tensor2 CenterModel::score_pairs(const numcore::ParameterStore& store,
                                 const PreparedProduct& prepared,
                                 std::optional<int> reaction_class) const {
  const std::size_t n = prepared.mol.atom_count();
  Tensor2 s(n, n);
  if (prepared.pairs.empty()) {
    check_class(reaction_class);
    return s;
  }
  Tape tape(store);
  const Tensor2& logits = tape.value(pair_logits(tape, prepared, reaction_class));
  for (std::size_t p = 0; p < prepared.pairs.size(); ++p) {
    const auto [a, b] = prepared.pairs[p];
    s(a, b) = s(b, a) = numcore::sigmoid(logits(p, 0));
  }
  return s;
}

Var CenterModel::loss(Tape& tape, const PreparedProduct& prepared, const LabelMatrix& y,
                      std::optional<int> reaction_class) const {
  if (y.size() != prepared.mol.atom_count()) throw numcore::ShapeError("label matrix size");
  if (prepared.pairs.empty()) {
    check_class(reaction_class);
    return tape.constant(Tensor2::scalar(0.0));
  }
  std::vector<double> targets(prepared.pairs.size());
  for (std::size_t p = 0; p < prepared.pairs.size(); ++p) {
    targets[p] = y.at(prepared.pairs[p].first, prepared.pairs[p].second) ? 1.0 : 0.0;
  }
  return tape.weighted_bce(pair_logits(tape, prepared, reaction_class), targets, config_.lambda);
}

double center_loss(const Tensor2& scores, const LabelMatrix& y, double lambda) {
  if (lambda < 1.0) throw std::invalid_argument("lambda must be at least 1");
  if (scores.rows() != y.size() || scores.cols() != y.size()) {
    throw numcore::ShapeError("score and label shapes differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = i + 1; j < y.size(); ++j) {
      const double s = std::clamp(scores(i, j), kProbabilityFloor, 1.0 - kProbabilityFloor);
      total -= y.at(i, j) ? lambda * std::log(s) : std::log(1.0 - s);
    }
  }
  return total;
}

std::vector<AtomPair> rank_bonded_pairs(const Tensor2& scores, const Molecule& product) {
  std::vector<AtomPair> pairs;
  for (const auto& b : product.bonds()) pairs.emplace_back(b.a, b.b);
  std::stable_sort(pairs.begin(), pairs.end(), [&](const AtomPair& x, const AtomPair& y) {
    return scores(x.first, x.second) > scores(y.first, y.second);
  });
  return pairs;
}

std::vector<AtomPair> select_centers(const Tensor2& scores, const Molecule& product,
                                     double threshold, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  std::vector<AtomPair> out;
  for (const auto& p : rank_bonded_pairs(scores, product)) {
    if (out.size() == k || scores(p.first, p.second) <= threshold) break;
    out.push_back(p);
  }
  return out;
}

std::vector<molgraph::Component> split_synthons(const Molecule& product,
                                                std::span<const AtomPair> centers) {
  return molgraph::connected_components(molgraph::remove_bonds(product, centers));
}

bool center_hit(const Tensor2& scores, const Molecule& product, const LabelMatrix& y, std::size_t k,
                double threshold) {
  const auto ranked = rank_bonded_pairs(scores, product);
  const auto truth = y.positives();
  if (truth.empty()) return ranked.empty() || scores(ranked[0].first, ranked[0].second) <= threshold;
  const std::size_t limit = std::min(k, ranked.size());
  return std::all_of(truth.begin(), truth.end(), [&](const AtomPair& t) {
    return std::find(ranked.begin(), ranked.begin() + static_cast<long>(limit), t) !=
           ranked.begin() + static_cast<long>(limit);
  });
}

CenterExample make_example(const molgraph::Reaction& rxn, const molgraph::ElementVocabulary& vocab,
                           bool use_class) {
  return {prepare_product(rxn.product, vocab), derive_labels(rxn),
          use_class ? rxn.reaction_class : std::nullopt};
}

std::array<double, 4> center_accuracy(const CenterModel& model, const numcore::ParameterStore& store,
                                      std::span<const CenterExample> examples) {
  std::array<double, 4> acc{};
  if (examples.empty()) return acc;
  for (const auto& ex : examples) {
    const Tensor2 s = model.score_pairs(store, ex.product, ex.reaction_class);
    for (std::size_t k = 0; k < acc.size(); ++k) {
      if (center_hit(s, ex.product.mol, ex.labels, kCenterTopK[k], model.config().threshold)) {
        acc[k] += 1.0;
      }
    }
  }
  for (double& a : acc) a /= static_cast<double>(examples.size());
  return acc;
}

std::vector<CenterEpoch> train_center(const CenterModel& model, numcore::ParameterStore& store,
                                      numcore::Adam& adam, std::span<const CenterExample> train,
                                      std::span<const CenterExample> eval,
                                      const TrainOptions& options,
                                      const std::function<void(const CenterEpoch&)>& on_epoch) {
  if (options.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  std::vector<CenterEpoch> history;
  if (train.empty()) return history;
  std::vector<std::size_t> order(train.size());
  for (std::size_t epoch = options.start_epoch; epoch < options.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0U);
    numcore::Rng rng(numcore::derive_seed(options.seed, epoch));
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t count = std::min(options.batch_size, order.size() - start);
      numcore::Gradients grads(store);
      const double batch_loss = numcore::accumulate_batch(
          store, count,
          [&](std::size_t i, numcore::Gradients& g) {
            const auto& ex = train[order[start + i]];
            Tape tape(store);
            const Var l = model.loss(tape, ex.product, ex.labels, ex.reaction_class);
            tape.backward(l, g);
            return tape.scalar(l);
          },
          grads);
      if (!std::isfinite(batch_loss) || !grads.all_finite()) {
        std::ostringstream msg;
        msg << "center training diverged at epoch " << epoch << ", batch starting at " << start
            << " (loss " << batch_loss << ", grad norm^2 " << grads.squared_norm() << ")";
        throw TrainingDiverged(msg.str());
      }
      grads.scale(1.0 / static_cast<double>(count));
      adam.step(store, grads);
      epoch_loss += batch_loss;
    }
    CenterEpoch record;
    record.epoch = epoch;
    record.loss = epoch_loss / static_cast<double>(train.size());
    record.topk = center_accuracy(model, store, eval);
    history.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  return history;
}

}  // namespace retrograph::center
