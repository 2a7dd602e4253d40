//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/molgraph/reaction.hpp"

#include <algorithm>
#include <unordered_set>

#include "retrograph/molgraph/canonical.hpp"
#include "retrograph/molgraph/smiles.hpp"
#include "retrograph/molgraph/surgery.hpp"

namespace retrograph::molgraph {

std::unordered_map<int, std::uint32_t> map_index(const Molecule& mol) {
  std::unordered_map<int, std::uint32_t> out;
  for (std::uint32_t i = 0; i < mol.atom_count(); ++i) {
    if (mol.atom(i).map_number != 0) out[mol.atom(i).map_number] = i;
  }
  return out;
}

Reaction parse_reaction(std::string_view text, std::optional<int> reaction_class) {
  const auto arrow = text.find(">>");
  if (arrow == std::string_view::npos) throw ReactionError("missing '>>'");
  if (text.find('>', arrow + 2) != std::string_view::npos) {
    throw ReactionError("agents between '>' are not supported");
  }
  Reaction r;
  for (auto& comp : connected_components(parse_smiles(text.substr(0, arrow)))) {
    r.reactants.push_back(std::move(comp.mol));
  }
  r.product = parse_smiles(text.substr(arrow + 2));
  r.reaction_class = reaction_class;
  validate_reaction(r);
  return r;
}

void validate_reaction(const Reaction& r) {
  if (r.reaction_class && (*r.reaction_class < 1 || *r.reaction_class > kReactionClasses)) {
    throw ReactionError("reaction class must be in 1.." + std::to_string(kReactionClasses));
  }
  if (r.product.empty()) throw ReactionError("empty product");
  if (connected_components(r.product).size() != 1) {
    throw ReactionError("product must be a single molecule");
  }
  std::unordered_set<int> product_maps;
  for (const auto& a : r.product.atoms()) {
    if (a.map_number == 0) throw ReactionError("unmapped product atom");
    if (!product_maps.insert(a.map_number).second) {
      throw ReactionError("duplicate product map number " + std::to_string(a.map_number));
    }
  }
  if (r.reactants.empty()) throw ReactionError("no reactants");
  std::unordered_set<int> reactant_maps;
  for (const auto& mol : r.reactants) {
    bool shares = false;
    for (const auto& a : mol.atoms()) {
      if (a.map_number == 0) continue;
      if (!reactant_maps.insert(a.map_number).second) {
        throw ReactionError("duplicate reactant map number " + std::to_string(a.map_number));
      }
      shares = shares || product_maps.count(a.map_number) > 0;
    }
    if (!shares) throw ReactionError("reactant shares no mapped atom with the product");
  }
  for (int m : product_maps) {
    if (!reactant_maps.count(m)) {
      throw ReactionError("product map number " + std::to_string(m) + " missing from reactants");
    }
  }
}

std::vector<std::string> canonical_set(const std::vector<Molecule>& mols) {
  std::vector<std::string> out;
  out.reserve(mols.size());
  for (const auto& m : mols) out.push_back(write_canonical(m));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace retrograph::molgraph
