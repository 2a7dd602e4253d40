//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/molgraph/valence.hpp"

#include <algorithm>
#include <cstdlib>
#include <span>

namespace retrograph::molgraph {
namespace {

std::span<const int> default_valences(Element e) {
  static constexpr int kB[] = {3};
  static constexpr int kC[] = {4};
  static constexpr int kN[] = {3, 5};
  static constexpr int kO[] = {2};
  static constexpr int kP[] = {3, 5};
  static constexpr int kS[] = {2, 4, 6};
  static constexpr int kHalogen[] = {1};
  switch (e) {
    case Element::B:
      return kB;
    case Element::C:
      return kC;
    case Element::N:
      return kN;
    case Element::O:
      return kO;
    case Element::P:
      return kP;
    case Element::S:
      return kS;
    default:
      return kHalogen;
  }
}

}  // namespace

int max_valence(Element e, int charge) {
  int cap = 0;
  switch (e) {
    case Element::B:
      return std::max(0, 3 - charge);
    case Element::C:
      return std::max(0, 4 - std::abs(charge));
    case Element::N:
      cap = 3;
      break;
    case Element::O:
      cap = 2;
      break;
    case Element::P:
      cap = 5;
      break;
    case Element::S:
      cap = 6;
      break;
    default:
      cap = 1;
      break;
  }
  return std::max(0, cap + charge);
}

int implicit_hydrogens(Element e, int bond_units, bool aromatic) {
  const auto valences = default_valences(e);
  if (aromatic) return std::max(0, valences.front() - (bond_units + 1));
  for (int v : valences) {
    if (v >= bond_units) return v - bond_units;
  }
  return 0;
}

ValenceReport valence_ok(const Molecule& mol) {
  ValenceReport report;
  for (std::uint32_t i = 0; i < mol.atom_count(); ++i) {
    const auto& a = mol.atom(i);
    if (mol.bond_units(i) + a.hydrogens > max_valence(a.element, a.charge)) {
      report.ok = false;
      report.violations.push_back(i);
    }
  }
  return report;
}

}  // namespace retrograph::molgraph
