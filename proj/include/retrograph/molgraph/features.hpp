//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "retrograph/molgraph/molecule.hpp"
#include "retrograph/numcore/tensor.hpp"

namespace retrograph::molgraph {

class VocabularyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kChargeSlots = kMaxCharge - kMinCharge + 1;
inline constexpr std::size_t kHydrogenSlots = kMaxHydrogens + 1;

/// Frozen ordered set of elements seen in training data.
class ElementVocabulary {
 public:
  ElementVocabulary() = default;
  explicit ElementVocabulary(std::vector<Element> elements);

  /// Elements occurring in any of the molecules, in enum order.
  static ElementVocabulary from_molecules(std::span<const Molecule> mols);
  /// Inverse of to_string, e.g. "C,N,O".
  static ElementVocabulary parse(std::string_view text);

  std::size_t size() const { return elements_.size(); }
  const std::vector<Element>& elements() const { return elements_; }
  std::optional<std::size_t> index_of(Element e) const;
  bool contains(const Molecule& mol) const;
  std::string to_string() const;

  friend bool operator==(const ElementVocabulary&, const ElementVocabulary&) = default;

 private:
  std::vector<Element> elements_;
};

/// Feature width d: one-hot element, charge and hydrogen count.
std::size_t feature_width(const ElementVocabulary& vocab);

/// Writes the d-wide encoding of one atom into `row`.
void encode_atom(const AtomRecord& atom, const ElementVocabulary& vocab, std::span<double> row);

/// n x d binary feature matrix. Throws VocabularyError for an element outside the vocabulary.
numcore::Tensor2 node_features(const Molecule& mol, const ElementVocabulary& vocab);

}  // namespace retrograph::molgraph
