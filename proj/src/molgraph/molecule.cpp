//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/molgraph/molecule.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <tuple>

namespace retrograph::molgraph {
namespace {

constexpr std::array<std::string_view, kElementCount> kSymbols = {"B", "C",  "N",  "O", "P",
                                                                  "S", "F", "Cl", "Br", "I"};

}  // namespace

std::string_view symbol(Element e) { return kSymbols.at(static_cast<std::size_t>(e)); }

std::optional<Element> element_from_symbol(std::string_view s) {
  for (std::size_t i = 0; i < kSymbols.size(); ++i) {
    if (kSymbols[i] == s) return static_cast<Element>(i);
  }
  return std::nullopt;
}

int valence_units(BondType t) {
  switch (t) {
    case BondType::Single:
      return 1;
    case BondType::Double:
      return 2;
    case BondType::Triple:
      return 3;
    case BondType::Aromatic:
      return 1;
  }
  return 1;
}

char bond_symbol(BondType t) {
  switch (t) {
    case BondType::Single:
      return '-';
    case BondType::Double:
      return '=';
    case BondType::Triple:
      return '#';
    case BondType::Aromatic:
      return ':';
  }
  return '-';
}

std::optional<BondType> Molecule::bond(std::uint32_t i, std::uint32_t j) const {
  for (const auto& nb : adjacency_.at(i)) {
    if (nb.atom == j) return nb.type;
  }
  return std::nullopt;
}

std::size_t Molecule::bond_count() const {
  std::size_t n = 0;
  for (const auto& list : adjacency_) n += list.size();
  return n / 2;
}

std::vector<Bond> Molecule::bonds() const {
  std::vector<Bond> out;
  for (std::uint32_t i = 0; i < adjacency_.size(); ++i) {
    for (const auto& nb : adjacency_[i]) {
      if (i < nb.atom) out.push_back({i, nb.atom, nb.type});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const Bond& x, const Bond& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return out;
}

int Molecule::bond_units(std::uint32_t i) const {
  int units = 0;
  for (const auto& nb : adjacency_.at(i)) units += valence_units(nb.type);
  return units;
}

bool Molecule::is_aromatic(std::uint32_t i) const {
  return std::any_of(adjacency_.at(i).begin(), adjacency_.at(i).end(),
                     [](const Neighbor& nb) { return nb.type == BondType::Aromatic; });
}

std::uint32_t Molecule::add_atom(const AtomRecord& atom) {
  atoms_.push_back(atom);
  adjacency_.emplace_back();
  return static_cast<std::uint32_t>(atoms_.size() - 1);
}

void Molecule::add_bond(std::uint32_t i, std::uint32_t j, BondType type) {
  if (i >= atoms_.size() || j >= atoms_.size()) throw std::out_of_range("bond atom index");
  if (i == j) throw std::invalid_argument("self-bond on atom " + std::to_string(i));
  if (bond(i, j)) {
    throw std::invalid_argument("atoms " + std::to_string(i) + " and " + std::to_string(j) +
                                " are already bonded");
  }
  adjacency_[i].push_back({j, type});
  adjacency_[j].push_back({i, type});
}

void Molecule::remove_bond(std::uint32_t i, std::uint32_t j) {
  if (i >= atoms_.size() || j >= atoms_.size() || !bond(i, j)) {
    throw std::invalid_argument("atoms " + std::to_string(i) + " and " + std::to_string(j) +
                                " are not bonded");
  }
  auto drop = [](std::vector<Neighbor>& list, std::uint32_t other) {
    list.erase(std::remove_if(list.begin(), list.end(),
                              [&](const Neighbor& nb) { return nb.atom == other; }),
               list.end());
  };
  drop(adjacency_[i], j);
  drop(adjacency_[j], i);
}

std::vector<std::uint8_t> Molecule::adjacency_tensor() const {
  const std::size_t n = atoms_.size();
  std::vector<std::uint8_t> a(n * n * kBondTypes, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (const auto& nb : adjacency_[i]) {
      a[(i * n + nb.atom) * kBondTypes + static_cast<std::size_t>(nb.type)] = 1;
    }
  }
  return a;
}

bool operator==(const Molecule& x, const Molecule& y) {
  if (x.atoms_ != y.atoms_) return false;
  return x.bonds() == y.bonds();
}

Molecule permute(const Molecule& mol, std::span<const std::uint32_t> perm) {
  const std::size_t n = mol.atom_count();
  if (perm.size() != n) throw std::invalid_argument("permutation length mismatch");
  std::vector<std::uint32_t> inverse(n, UINT32_MAX);
  for (std::uint32_t i = 0; i < n; ++i) {
    if (perm[i] >= n || inverse[perm[i]] != UINT32_MAX) {
      throw std::invalid_argument("not a permutation");
    }
    inverse[perm[i]] = i;
  }
  Molecule out;
  for (std::uint32_t k = 0; k < n; ++k) out.add_atom(mol.atom(inverse[k]));
  for (const auto& b : mol.bonds()) out.add_bond(perm[b.a], perm[b.b], b.type);
  return out;
}

Molecule strip_maps(const Molecule& mol) {
  Molecule out = mol;
  for (std::uint32_t i = 0; i < out.atom_count(); ++i) {
    AtomRecord a = out.atom(i);
    a.map_number = 0;
    out.set_atom(i, a);
  }
  return out;
}

}  // namespace retrograph::molgraph
