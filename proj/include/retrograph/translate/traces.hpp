//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "retrograph/numcore/params.hpp"
#include "retrograph/translate/state.hpp"

namespace retrograph::translate {

/// Actions in order; the last one is a stop.
struct Trace {
  std::vector<Action> actions;

  auto operator<=>(const Trace&) const = default;
};

/// Replays the non-stop actions of `trace` from `start`.
TranslationState replay(const TranslationState& start, const Trace& trace,
                        const AtomVocabulary& vocab);

inline constexpr std::size_t kDefaultTraceCap = 4096;

/// Every breadth-first trace: roots are the synthon atoms touched by new
/// bonds, taken in any order; each dequeued atom emits its remaining new
/// bonds in any order, enqueuing atoms it creates. Duplicate action
/// sequences are merged. Returns nullopt when more than `cap` distinct traces
/// exist. Throws VocabularyError when a new atom type is not in `vocab`.
std::optional<std::vector<Trace>> bfs_traces(const TranslationState& start, const EditSet& edits,
                                             const AtomVocabulary& vocab,
                                             std::size_t cap = kDefaultTraceCap);

/// One breadth-first trace drawn by random choices at every branch point.
Trace random_bfs_trace(const TranslationState& start, const EditSet& edits,
                       const AtomVocabulary& vocab, numcore::Rng& rng);

inline constexpr std::size_t kMaxExactBonds = 6;

class TooManyEdits : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Every executable order of the new bonds, both orientations for bonds
/// between present atoms. Throws TooManyEdits above kMaxExactBonds bonds.
std::vector<Trace> all_traces(const TranslationState& start, const EditSet& edits,
                              const AtomVocabulary& vocab);

/// Traces for one training pair. Draws uniformly from the enumerated set,
/// falling back to random_bfs_trace when enumeration hit its cap.
class TraceSampler {
 public:
  TraceSampler() = default;
  TraceSampler(const TranslationState& start, const EditSet& edits, const AtomVocabulary& vocab,
               std::size_t cap = kDefaultTraceCap);

  Trace sample(numcore::Rng& rng) const;
  /// Size of the enumerated set, or nullopt when it was too large.
  std::optional<std::size_t> universe_size() const;
  const std::vector<Trace>& universe() const { return traces_; }

 private:
  TranslationState start_;
  EditSet edits_;
  AtomVocabulary vocab_;
  std::vector<Trace> traces_;
  bool capped_ = false;
};

}  // namespace retrograph::translate
