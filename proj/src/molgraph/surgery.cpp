//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/molgraph/surgery.hpp"

#include <stdexcept>

namespace retrograph::molgraph {

Molecule remove_bonds(const Molecule& mol, std::span<const AtomPair> pairs) {
  Molecule out = mol;
  for (const auto& [a, b] : pairs) out.remove_bond(a, b);
  return out;
}

std::vector<std::uint32_t> component_ids(const Molecule& mol) {
  const std::uint32_t n = static_cast<std::uint32_t>(mol.atom_count());
  std::vector<std::uint32_t> id(n, UINT32_MAX);
  std::uint32_t next = 0;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (id[s] != UINT32_MAX) continue;
    id[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::uint32_t x = stack.back();
      stack.pop_back();
      for (const auto& nb : mol.neighbors(x)) {
        if (id[nb.atom] == UINT32_MAX) {
          id[nb.atom] = next;
          stack.push_back(nb.atom);
        }
      }
    }
    ++next;
  }
  return id;
}

std::vector<Component> connected_components(const Molecule& mol) {
  const auto id = component_ids(mol);
  std::uint32_t count = 0;
  for (auto c : id) count = std::max(count, c + 1);
  std::vector<Component> out(count);
  std::vector<std::uint32_t> local(mol.atom_count());
  for (std::uint32_t i = 0; i < mol.atom_count(); ++i) {
    local[i] = out[id[i]].mol.add_atom(mol.atom(i));
    out[id[i]].parent_index.push_back(i);
  }
  for (const auto& b : mol.bonds()) out[id[b.a]].mol.add_bond(local[b.a], local[b.b], b.type);
  return out;
}

Molecule combine(const Molecule& a, const Molecule& b) {
  Molecule out = a;
  const auto offset = static_cast<std::uint32_t>(a.atom_count());
  for (const auto& rec : b.atoms()) out.add_atom(rec);
  for (const auto& bond : b.bonds()) out.add_bond(bond.a + offset, bond.b + offset, bond.type);
  return out;
}

}  // namespace retrograph::molgraph
