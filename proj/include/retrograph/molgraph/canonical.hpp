//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "retrograph/molgraph/molecule.hpp"

namespace retrograph::molgraph {

/// Canonical rank of every atom (a permutation of 0..n-1), ignoring map numbers.
///
/// Atoms are first partitioned by (element, charge, hydrogens, degree,
/// aromaticity, bond-type multiset) and refined by neighbour classes until
/// stable. Remaining ties are broken by trying each tied atom in turn and
/// keeping the labelling whose SMILES is lexicographically smallest.
/// Components are ranked in the order of their canonical strings.
std::vector<std::uint32_t> canonical_ranks(const Molecule& mol);

/// Canonical SMILES without atom maps; component strings are sorted.
std::string write_canonical(const Molecule& mol);

/// Canonical SMILES that keeps atom maps; map numbers take part in ranking,
/// so only map-preserving relabelings give the same string.
std::string write_canonical_with_maps(const Molecule& mol);

/// parse_smiles followed by write_canonical.
std::string canonicalize(std::string_view smiles);

}  // namespace retrograph::molgraph
