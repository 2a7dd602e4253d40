//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "retrograph/center/center.hpp"
#include "retrograph/pipeline/checkpoint.hpp"
#include "retrograph/translate/beam.hpp"

namespace retrograph::pipeline {

/// One ranked answer: a sorted multiset of canonical reactant strings.
struct Candidate {
  std::vector<std::string> reactants;
  double score = 0.0;
  std::vector<center::AtomPair> centers;  // product atom pairs that were cut
};

struct Prediction {
  std::vector<Candidate> candidates;  // score descending, ties by reactant key
  std::string diagnostic;             // why the list is empty, when it is
  std::size_t invalid_dropped = 0;    // decoded molecules failing valence_ok
};

struct DecodeOptions {
  std::size_t k = 10;           // final list length and per-call beam width
  std::size_t max_steps = 20;
  std::size_t samples = 1;      // latent draws per synthon
  std::uint64_t seed = 1;       // run seed
  std::uint64_t stream = 0;     // reaction id; fixes the latent draws
};

DecodeOptions decode_options(const RunConfig& config, std::uint64_t stream);

/// Joins reactant strings with '.' into an order-free key.
std::string reactant_key(std::span<const std::string> sorted_reactants);

/// Keeps the best score per reactant set, orders by (score desc, key asc)
/// and truncates to k.
std::vector<Candidate> merge_candidates(std::vector<Candidate> pool, std::size_t k);

/// Every pairing of one entry from `a` with one from `b`: reactant multisets
/// are united and scores added. Result is merged and truncated to k.
std::vector<Candidate> cross_candidates(std::span<const Candidate> a, std::span<const Candidate> b,
                                        std::size_t k);

/// A set of cut bonds and its log-score under the center scores:
/// sum of log s over cut pairs plus log(1 - s) over the other bonded pairs.
struct CenterHypothesis {
  std::vector<center::AtomPair> centers;
  double log_score = 0.0;
};

double hypothesis_log_score(const numcore::Tensor2& scores, const molgraph::Molecule& product,
                            std::span<const center::AtomPair> centers);

/// First hypothesis: every bonded pair above the threshold (possibly none).
/// Further ones, up to `count`, cut the single best-ranked pairs not already
/// forming a hypothesis.
std::vector<CenterHypothesis> center_hypotheses(const numcore::Tensor2& scores,
                                                const molgraph::Molecule& product,
                                                double threshold, std::size_t count);

/// Decodes each synthon of `product` cut at `centers` and ranks the joint
/// reactant sets. `call_index` numbers beam calls for latent seeding and is
/// advanced by this function.
std::vector<Candidate> decode_synthons(const TranslateStage& translate,
                                       const molgraph::Molecule& product,
                                       std::span<const center::AtomPair> centers,
                                       std::optional<int> reaction_class,
                                       const DecodeOptions& options, std::uint64_t& call_index,
                                       std::size_t* invalid_dropped = nullptr);

/// Centers, synthons, decoding and joint ranking for one product.
Prediction predict(const CenterStage& center, const TranslateStage& translate,
                   const molgraph::Molecule& product, std::optional<int> reaction_class,
                   const RunConfig& config, std::uint64_t stream);

/// As predict, but with the given centers and a center score of zero.
Prediction predict_with_centers(const TranslateStage& translate, const molgraph::Molecule& product,
                                std::span<const center::AtomPair> centers,
                                std::optional<int> reaction_class, const RunConfig& config,
                                std::uint64_t stream);

}  // namespace retrograph::pipeline
