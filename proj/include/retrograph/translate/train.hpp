//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "retrograph/center/center.hpp"
#include "retrograph/molgraph/reaction.hpp"
#include "retrograph/numcore/adam.hpp"
#include "retrograph/translate/model.hpp"

namespace retrograph::translate {

struct TranslationPair {
  TranslationState synthon;
  molgraph::Molecule reactant;
  EditSet edits;
  TraceSampler sampler;
  std::optional<int> reaction_class;
};

/// Synthons cut at `centers`, each matched to the reactant holding its atoms.
/// Throws EditError when a synthon does not line up with exactly one reactant.
std::vector<TranslationPair> make_translation_pairs(const molgraph::Reaction& rxn,
                                                    std::span<const AtomPair> centers,
                                                    const AtomVocabulary& vocab, bool use_class,
                                                    std::size_t trace_cap = kDefaultTraceCap);

/// Types of the atoms each reactant adds to its synthon under the true centers.
std::vector<VocabAtom> new_atom_types(const molgraph::Reaction& rxn);

struct TranslateEpoch {
  std::size_t epoch = 0;
  double loss = 0.0;  // mean negative ELBO per pair
};

std::vector<TranslateEpoch> train_translate(
    const TranslateModel& model, numcore::ParameterStore& store, numcore::Adam& adam,
    std::span<const TranslationPair> train, const center::TrainOptions& options,
    const std::function<void(const TranslateEpoch&)>& on_epoch = {});

}  // namespace retrograph::translate
