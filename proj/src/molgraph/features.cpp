//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/molgraph/features.hpp"

#include <algorithm>
#include <array>

namespace retrograph::molgraph {

ElementVocabulary::ElementVocabulary(std::vector<Element> elements) : elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
  if (std::adjacent_find(elements_.begin(), elements_.end()) != elements_.end()) {
    throw VocabularyError("duplicate element in vocabulary");
  }
}

ElementVocabulary ElementVocabulary::from_molecules(std::span<const Molecule> mols) {
  std::array<bool, kElementCount> seen{};
  for (const auto& m : mols) {
    for (const auto& a : m.atoms()) seen[static_cast<std::size_t>(a.element)] = true;
  }
  std::vector<Element> out;
  for (int e = 0; e < kElementCount; ++e) {
    if (seen[e]) out.push_back(static_cast<Element>(e));
  }
  return ElementVocabulary(std::move(out));
}

ElementVocabulary ElementVocabulary::parse(std::string_view text) {
  std::vector<Element> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto token = text.substr(0, comma);
    const auto e = element_from_symbol(token);
    if (!e) throw VocabularyError("unknown element '" + std::string(token) + "' in vocabulary");
    out.push_back(*e);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return ElementVocabulary(std::move(out));
}

std::optional<std::size_t> ElementVocabulary::index_of(Element e) const {
  const auto it = std::lower_bound(elements_.begin(), elements_.end(), e);
  if (it == elements_.end() || *it != e) return std::nullopt;
  return static_cast<std::size_t>(it - elements_.begin());
}

bool ElementVocabulary::contains(const Molecule& mol) const {
  return std::all_of(mol.atoms().begin(), mol.atoms().end(),
                     [&](const AtomRecord& a) { return index_of(a.element).has_value(); });
}

std::string ElementVocabulary::to_string() const {
  std::string out;
  for (auto e : elements_) {
    if (!out.empty()) out.push_back(',');
    out += symbol(e);
  }
  return out;
}

std::size_t feature_width(const ElementVocabulary& vocab) {
  return vocab.size() + kChargeSlots + kHydrogenSlots;
}

void encode_atom(const AtomRecord& atom, const ElementVocabulary& vocab, std::span<double> row) {
  if (row.size() != feature_width(vocab)) throw numcore::ShapeError("feature row width mismatch");
  const auto e = vocab.index_of(atom.element);
  if (!e) {
    throw VocabularyError("element " + std::string(symbol(atom.element)) +
                          " is not in the frozen vocabulary");
  }
  std::fill(row.begin(), row.end(), 0.0);
  row[*e] = 1.0;
  const int charge = std::clamp(atom.charge, kMinCharge, kMaxCharge);
  row[vocab.size() + static_cast<std::size_t>(charge - kMinCharge)] = 1.0;
  const int h = std::clamp(atom.hydrogens, 0, kMaxHydrogens);
  row[vocab.size() + kChargeSlots + static_cast<std::size_t>(h)] = 1.0;
}

numcore::Tensor2 node_features(const Molecule& mol, const ElementVocabulary& vocab) {
  numcore::Tensor2 x(mol.atom_count(), feature_width(vocab));
  for (std::uint32_t i = 0; i < mol.atom_count(); ++i) encode_atom(mol.atom(i), vocab, x.row(i));
  return x;
}

}  // namespace retrograph::molgraph
