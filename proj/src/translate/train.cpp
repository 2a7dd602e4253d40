//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/translate/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "retrograph/numcore/batch.hpp"
#include "retrograph/translate/beam.hpp"

namespace retrograph::translate {

namespace {

struct Matched {
  Synthon synthon;
  std::size_t reactant = 0;
};

std::vector<Matched> match_synthons(const molgraph::Reaction& rxn, std::span<const AtomPair> centers) {
  std::set<int> product_maps;
  for (const auto& a : rxn.product.atoms()) product_maps.insert(a.map_number);
  std::vector<Matched> out;
  for (auto& s : make_synthons(rxn.product, centers)) {
    std::set<int> maps;
    for (const auto& a : s.state.mol.atoms()) maps.insert(a.map_number);
    std::optional<std::size_t> owner;
    for (std::size_t r = 0; r < rxn.reactants.size(); ++r) {
      std::set<int> shared;
      for (const auto& a : rxn.reactants[r].atoms()) {
        if (product_maps.count(a.map_number)) shared.insert(a.map_number);
      }
      if (shared.empty()) continue;
      if (shared == maps) {
        owner = r;
      } else if (std::any_of(maps.begin(), maps.end(), [&](int m) { return shared.count(m) > 0; })) {
        throw EditError("synthon atoms are split across reactants or share one with another synthon");
      }
    }
    if (!owner) throw EditError("no reactant holds exactly the atoms of a synthon");
    out.push_back({std::move(s), *owner});
  }
  return out;
}

}  // namespace

std::vector<TranslationPair> make_translation_pairs(const molgraph::Reaction& rxn,
                                                    std::span<const AtomPair> centers,
                                                    const AtomVocabulary& vocab, bool use_class,
                                                    std::size_t trace_cap) {
  std::vector<TranslationPair> out;
  for (auto& m : match_synthons(rxn, centers)) {
    TranslationPair pair;
    pair.synthon = std::move(m.synthon.state);
    pair.reactant = rxn.reactants[m.reactant];
    pair.edits = diff_edits(pair.synthon, pair.reactant);
    pair.sampler = TraceSampler(pair.synthon, pair.edits, vocab, trace_cap);
    pair.reaction_class = use_class ? rxn.reaction_class : std::nullopt;
    out.push_back(std::move(pair));
  }
  return out;
}

std::vector<VocabAtom> new_atom_types(const molgraph::Reaction& rxn) {
  const auto centers = center::derive_labels(rxn).positives();
  std::vector<VocabAtom> out;
  for (const auto& m : match_synthons(rxn, centers)) {
    const EditSet edits = diff_edits(m.synthon.state, rxn.reactants[m.reactant]);
    out.insert(out.end(), edits.new_atom_types.begin(), edits.new_atom_types.end());
  }
  return out;
}

std::vector<TranslateEpoch> train_translate(const TranslateModel& model, numcore::ParameterStore& store,
                                            numcore::Adam& adam, std::span<const TranslationPair> train,
                                            const center::TrainOptions& options,
                                            const std::function<void(const TranslateEpoch&)>& on_epoch) {
  if (options.batch_size == 0) throw std::invalid_argument("batch size must be positive");
  std::vector<TranslateEpoch> history;
  if (train.empty()) return history;
  const std::size_t draws = std::max<std::size_t>(1, model.config().mc_traces);
  std::vector<std::size_t> order(train.size());
  for (std::size_t epoch = options.start_epoch; epoch < options.epochs; ++epoch) {
    const std::uint64_t epoch_seed = numcore::derive_seed(options.seed, epoch);
    std::iota(order.begin(), order.end(), 0U);
    numcore::Rng shuffle_rng(epoch_seed);
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t count = std::min(options.batch_size, order.size() - start);
      numcore::Gradients grads(store);
      const double batch_loss = numcore::accumulate_batch(
          store, count,
          [&](std::size_t i, numcore::Gradients& g) {
            const std::size_t index = order[start + i];
            const TranslationPair& pair = train[index];
            numcore::Rng rng(numcore::derive_seed(epoch_seed, index + 1));
            const auto eps = sample_prior(model.config().latent, rng);
            std::vector<Trace> traces;
            for (std::size_t j = 0; j < draws; ++j) traces.push_back(pair.sampler.sample(rng));
            Tape tape(store);
            const Var l = model.elbo_loss(tape, pair.synthon, pair.reactant, traces, eps,
                                          pair.reaction_class);
            tape.backward(l, g);
            return tape.scalar(l);
          },
          grads);
      if (!std::isfinite(batch_loss) || !grads.all_finite()) {
        std::ostringstream msg;
        msg << "translation training diverged at epoch " << epoch << ", batch starting at " << start
            << " (loss " << batch_loss << ", grad norm^2 " << grads.squared_norm() << ")";
        throw center::TrainingDiverged(msg.str());
      }
      grads.scale(1.0 / static_cast<double>(count));
      adam.step(store, grads);
      epoch_loss += batch_loss;
    }
    TranslateEpoch record{epoch, epoch_loss / static_cast<double>(train.size())};
    history.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  return history;
}

}  // namespace retrograph::translate
