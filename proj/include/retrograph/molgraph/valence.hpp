//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <vector>

#include "retrograph/molgraph/molecule.hpp"

namespace retrograph::molgraph {

/// Maximum valence units for an element at a formal charge.
///
/// Base capacities: B 3, C 4, N 3, O 2, P 5, S 6, halogens 1. A charge moves
/// capacity by one unit per charge unit: up for positive charge on N, O, P, S
/// and halogens (onium ions), down for positive charge on B, and down for any
/// charge on C (carbocations and carbanions are trivalent).
int max_valence(Element e, int charge);

/// Hydrogens implied by a bare (unbracketed) SMILES atom with `bond_units`
/// of bonds: the smallest default valence that fits, minus the bond units.
/// Aromatic atoms use their lowest default valence and count one extra unit.
int implicit_hydrogens(Element e, int bond_units, bool aromatic);

struct ValenceReport {
  bool ok = true;
  std::vector<std::uint32_t> violations;
  explicit operator bool() const { return ok; }
};

/// Bond units plus explicit hydrogens must not exceed max_valence.
ValenceReport valence_ok(const Molecule& mol);

}  // namespace retrograph::molgraph
