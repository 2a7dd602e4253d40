//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "retrograph/molgraph/molecule.hpp"

namespace retrograph::molgraph {

using AtomPair = std::pair<std::uint32_t, std::uint32_t>;

/// Copy of `mol` with the listed bonds cleared. Atom indices are preserved.
/// Throws std::invalid_argument when a pair is not bonded.
Molecule remove_bonds(const Molecule& mol, std::span<const AtomPair> pairs);

struct Component {
  Molecule mol;
  /// parent_index[i] is the index in the parent of component atom i.
  std::vector<std::uint32_t> parent_index;
};

/// Connected components, ordered by their smallest parent index. Atoms keep
/// their relative parent order inside each component.
std::vector<Component> connected_components(const Molecule& mol);

/// Component id of every atom, numbered as in connected_components.
std::vector<std::uint32_t> component_ids(const Molecule& mol);

/// Disjoint union; atoms of `b` follow the atoms of `a`.
Molecule combine(const Molecule& a, const Molecule& b);

}  // namespace retrograph::molgraph
