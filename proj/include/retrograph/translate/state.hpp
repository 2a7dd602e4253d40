//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "retrograph/molgraph/molecule.hpp"
#include "retrograph/molgraph/surgery.hpp"

namespace retrograph::translate {

using molgraph::AtomPair;
using molgraph::BondType;
using molgraph::Element;
using molgraph::Molecule;

/// An atom type that actions may introduce. `hydrogens` is the standalone
/// count: the atom's hydrogens in the reactant plus the units of its bonds.
struct VocabAtom {
  Element element = Element::C;
  int charge = 0;
  int hydrogens = 0;

  auto operator<=>(const VocabAtom&) const = default;
};

class VocabularyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Frozen sorted list of new-atom types (size m).
class AtomVocabulary {
 public:
  AtomVocabulary() = default;
  explicit AtomVocabulary(std::vector<VocabAtom> atoms);

  std::size_t size() const { return atoms_.size(); }
  const VocabAtom& operator[](std::size_t i) const { return atoms_.at(i); }
  const std::vector<VocabAtom>& atoms() const { return atoms_; }
  std::optional<std::size_t> index_of(const VocabAtom& a) const;

  /// "C/0/4,O/0/2" style text for checkpoints.
  std::string to_string() const;
  static AtomVocabulary parse(std::string_view text);

  friend bool operator==(const AtomVocabulary&, const AtomVocabulary&) = default;

 private:
  std::vector<VocabAtom> atoms_;
};

/// A graph being edited. Atom hydrogens hold the free count: hydrogens that
/// can still be replaced by a new bond. Synthon atoms keep their map numbers.
struct TranslationState {
  Molecule mol;
  std::vector<char> attachment;  // one flag per atom; new atoms are 0

  std::size_t atom_count() const { return mol.atom_count(); }
};

/// One decision. When `stop` is set the other fields are unused. `a3` indexes
/// the extended graph: values below the atom count name existing atoms,
/// atom_count + v names vocabulary slot v (adds a new atom).
struct Action {
  bool stop = false;
  std::uint32_t a2 = 0;
  std::uint32_t a3 = 0;
  BondType a4 = BondType::Single;

  static Action stop_action() { return Action{true, 0, 0, BondType::Single}; }
  auto operator<=>(const Action&) const = default;
};

std::string to_string(const Action& a);

class ActionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Applies a non-stop action: adds the bond (and the vocabulary atom, if any)
/// and takes the bond units from the free hydrogens of both ends. Throws
/// ActionError when a3 == a2, the atoms are already bonded, or an index is
/// out of range. Does not check hydrogens; see action_valid.
void apply_action(TranslationState& state, const Action& action, const AtomVocabulary& vocab);

/// Decode-time filter: no self or duplicate bond and enough free hydrogens on
/// both ends. A stop is valid when every hydrogen count is in 0..kMaxHydrogens
/// and the molecule passes valence_ok.
bool action_valid(const TranslationState& state, const Action& action, const AtomVocabulary& vocab);

/// Synthons of `product` after cutting `centers`. Each atom's hydrogens grow
/// by the units of its cut bonds and the cut atoms are flagged as attachments.
struct Synthon {
  TranslationState state;
  std::vector<std::uint32_t> product_index;
};
std::vector<Synthon> make_synthons(const Molecule& product, std::span<const AtomPair> centers);

/// Reactant-like molecule for a finished state (free hydrogens are the final ones).
const Molecule& result_molecule(const TranslationState& state);

/// Canonical key of a state including attachment flags; equal keys mean the
/// model sees isomorphic inputs.
std::string state_key(const TranslationState& state);

/// Edits that turn a synthon into its reactant, in the reactant's atom indices.
struct EditSet {
  std::vector<std::uint32_t> synthon_to_reactant;  // per synthon atom
  std::vector<std::uint32_t> new_atoms;            // reactant atoms absent from the synthon
  std::vector<VocabAtom> new_atom_types;           // parallel to new_atoms
  std::vector<molgraph::Bond> new_bonds;           // reactant indices, a < b

  bool empty() const { return new_bonds.empty(); }
};

class EditError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Compares a synthon state with its reactant through atom maps. Reactant
/// atoms whose map is not on the synthon count as new atoms. Throws EditError
/// unless every synthon atom appears with the same element and charge, every
/// synthon bond exists in the reactant with the same type, the reactant is
/// connected, and reactant hydrogens equal the synthon's free hydrogens minus
/// the units of the new bonds.
EditSet diff_edits(const TranslationState& synthon, const Molecule& reactant);

/// Vocabulary type of a reactant atom: hydrogens plus bond units.
VocabAtom standalone_type(const Molecule& mol, std::uint32_t atom);

}  // namespace retrograph::translate
