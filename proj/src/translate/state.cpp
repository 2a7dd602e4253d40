//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/translate/state.hpp"

#include <algorithm>
#include <unordered_map>

#include "retrograph/molgraph/canonical.hpp"
#include "retrograph/molgraph/reaction.hpp"
#include "retrograph/molgraph/valence.hpp"

namespace retrograph::translate {

AtomVocabulary::AtomVocabulary(std::vector<VocabAtom> atoms) : atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end());
  atoms_.erase(std::unique(atoms_.begin(), atoms_.end()), atoms_.end());
}

std::optional<std::size_t> AtomVocabulary::index_of(const VocabAtom& a) const {
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
  if (it == atoms_.end() || *it != a) return std::nullopt;
  return static_cast<std::size_t>(it - atoms_.begin());
}

std::string AtomVocabulary::to_string() const {
  std::string out;
  for (const auto& a : atoms_) {
    if (!out.empty()) out.push_back(',');
    out += std::string(molgraph::symbol(a.element)) + "/" + std::to_string(a.charge) + "/" +
           std::to_string(a.hydrogens);
  }
  return out;
}

AtomVocabulary AtomVocabulary::parse(std::string_view text) {
  std::vector<VocabAtom> atoms;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string token(text.substr(0, comma));
    const auto s1 = token.find('/');
    const auto s2 = token.find('/', s1 == std::string::npos ? s1 : s1 + 1);
    if (s1 == std::string::npos || s2 == std::string::npos) {
      throw VocabularyError("bad atom vocabulary entry '" + token + "'");
    }
    const auto e = molgraph::element_from_symbol(token.substr(0, s1));
    if (!e) throw VocabularyError("unknown element in atom vocabulary entry '" + token + "'");
    try {
      atoms.push_back({*e, std::stoi(token.substr(s1 + 1, s2 - s1 - 1)), std::stoi(token.substr(s2 + 1))});
    } catch (const std::logic_error&) {
      throw VocabularyError("bad atom vocabulary entry '" + token + "'");
    }
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return AtomVocabulary(std::move(atoms));
}

std::string to_string(const Action& a) {
  if (a.stop) return "stop";
  return "(" + std::to_string(a.a2) + "," + std::to_string(a.a3) + "," +
         molgraph::bond_symbol(a.a4) + ")";
}

void apply_action(TranslationState& state, const Action& action, const AtomVocabulary& vocab) {
  if (action.stop) throw ActionError("cannot apply a stop action");
  const std::size_t n = state.atom_count();
  if (action.a2 >= n) throw ActionError("first node must be an existing atom");
  if (action.a3 >= n + vocab.size()) throw ActionError("second node out of range");
  if (action.a3 == action.a2) throw ActionError("self-bond");
  std::uint32_t target = action.a3;
  if (action.a3 >= n) {
    const VocabAtom& v = vocab[action.a3 - n];
    target = state.mol.add_atom({v.element, v.charge, v.hydrogens, 0});
    state.attachment.push_back(0);
  } else if (state.mol.bond(action.a2, target)) {
    throw ActionError("atoms already bonded");
  }
  state.mol.add_bond(action.a2, target, action.a4);
  const int units = molgraph::valence_units(action.a4);
  for (const std::uint32_t atom : {action.a2, target}) {
    auto rec = state.mol.atom(atom);
    rec.hydrogens -= units;
    state.mol.set_atom(atom, rec);
  }
}

bool action_valid(const TranslationState& state, const Action& action, const AtomVocabulary& vocab) {
  const std::size_t n = state.atom_count();
  if (action.stop) {
    const bool h_ok = std::all_of(state.mol.atoms().begin(), state.mol.atoms().end(), [](const auto& a) {
      return a.hydrogens >= 0 && a.hydrogens <= molgraph::kMaxHydrogens;
    });
    return h_ok && molgraph::valence_ok(state.mol);
  }
  if (action.a2 >= n || action.a3 >= n + vocab.size() || action.a2 == action.a3) return false;
  const int units = molgraph::valence_units(action.a4);
  if (state.mol.atom(action.a2).hydrogens < units) return false;
  if (action.a3 >= n) return vocab[action.a3 - n].hydrogens >= units;
  return !state.mol.bond(action.a2, action.a3) && state.mol.atom(action.a3).hydrogens >= units;
}

std::vector<Synthon> make_synthons(const Molecule& product, std::span<const AtomPair> centers) {
  std::vector<int> extra(product.atom_count(), 0);
  for (const auto& [a, b] : centers) {
    const auto t = product.bond(a, b);
    if (!t) throw std::invalid_argument("center pair is not bonded");
    extra[a] += molgraph::valence_units(*t);
    extra[b] += molgraph::valence_units(*t);
  }
  std::vector<Synthon> out;
  for (auto& comp : molgraph::connected_components(molgraph::remove_bonds(product, centers))) {
    Synthon s;
    s.state.mol = std::move(comp.mol);
    s.state.attachment.assign(s.state.mol.atom_count(), 0);
    for (std::uint32_t i = 0; i < s.state.mol.atom_count(); ++i) {
      const std::uint32_t p = comp.parent_index[i];
      if (extra[p] > 0) {
        auto rec = s.state.mol.atom(i);
        rec.hydrogens += extra[p];
        s.state.mol.set_atom(i, rec);
        s.state.attachment[i] = 1;
      }
    }
    s.product_index = std::move(comp.parent_index);
    out.push_back(std::move(s));
  }
  return out;
}

const Molecule& result_molecule(const TranslationState& state) { return state.mol; }

std::string state_key(const TranslationState& state) {
  Molecule marked = state.mol;
  for (std::uint32_t i = 0; i < marked.atom_count(); ++i) {
    auto rec = marked.atom(i);
    rec.map_number = state.attachment[i] ? 1 : 0;
    marked.set_atom(i, rec);
  }
  return molgraph::write_canonical_with_maps(marked);
}

VocabAtom standalone_type(const Molecule& mol, std::uint32_t atom) {
  const auto& a = mol.atom(atom);
  return {a.element, a.charge, a.hydrogens + mol.bond_units(atom)};
}

EditSet diff_edits(const TranslationState& synthon, const Molecule& reactant) {
  const Molecule& s = synthon.mol;
  const auto rmap = molgraph::map_index(reactant);
  EditSet edits;
  std::vector<std::int64_t> synthon_of(reactant.atom_count(), -1);
  for (std::uint32_t i = 0; i < s.atom_count(); ++i) {
    const int map = s.atom(i).map_number;
    if (map == 0) throw EditError("synthon atom without a map number");
    const auto it = rmap.find(map);
    if (it == rmap.end()) throw EditError("synthon map " + std::to_string(map) + " not in reactant");
    const auto& ra = reactant.atom(it->second);
    if (ra.element != s.atom(i).element || ra.charge != s.atom(i).charge) {
      throw EditError("atom " + std::to_string(map) + " changes element or charge");
    }
    edits.synthon_to_reactant.push_back(it->second);
    synthon_of[it->second] = i;
  }
  for (const auto& b : s.bonds()) {
    const auto t = reactant.bond(edits.synthon_to_reactant[b.a], edits.synthon_to_reactant[b.b]);
    if (t != b.type) throw EditError("a synthon bond is missing or retyped in the reactant");
  }
  for (std::uint32_t g = 0; g < reactant.atom_count(); ++g) {
    if (synthon_of[g] < 0) {
      edits.new_atoms.push_back(g);
      edits.new_atom_types.push_back(standalone_type(reactant, g));
    }
  }
  std::vector<int> added_units(reactant.atom_count(), 0);
  for (const auto& b : reactant.bonds()) {
    if (synthon_of[b.a] >= 0 && synthon_of[b.b] >= 0 &&
        s.bond(static_cast<std::uint32_t>(synthon_of[b.a]), static_cast<std::uint32_t>(synthon_of[b.b]))) {
      continue;
    }
    edits.new_bonds.push_back(b);
    added_units[b.a] += molgraph::valence_units(b.type);
    added_units[b.b] += molgraph::valence_units(b.type);
  }
  for (std::uint32_t i = 0; i < s.atom_count(); ++i) {
    const std::uint32_t g = edits.synthon_to_reactant[i];
    if (reactant.atom(g).hydrogens != s.atom(i).hydrogens - added_units[g]) {
      throw EditError("hydrogen count of atom " + std::to_string(s.atom(i).map_number) +
                      " is inconsistent with the added bonds");
    }
  }
  // Every new atom must hang off the synthon through new bonds.
  const auto comps = molgraph::component_ids(reactant);
  if (s.atom_count() == 0) throw EditError("empty synthon");
  const auto root = comps[edits.synthon_to_reactant[0]];
  for (auto id : comps) {
    if (id != root) throw EditError("reactant is not connected");
  }
  return edits;
}

}  // namespace retrograph::translate
