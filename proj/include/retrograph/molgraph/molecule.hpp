//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace retrograph::molgraph {

/// Supported elements (the SMILES organic subset).
enum class Element : std::uint8_t { B, C, N, O, P, S, F, Cl, Br, I };
inline constexpr int kElementCount = 10;

std::string_view symbol(Element e);
std::optional<Element> element_from_symbol(std::string_view s);

/// Bond types; the index doubles as the adjacency-tensor channel.
enum class BondType : std::uint8_t { Single = 0, Double = 1, Triple = 2, Aromatic = 3 };
inline constexpr int kBondTypes = 4;

/// Valence units a bond consumes: 1, 2, 3, and 1 for aromatic.
int valence_units(BondType t);
char bond_symbol(BondType t);

inline constexpr int kMinCharge = -2;
inline constexpr int kMaxCharge = 2;
inline constexpr int kMaxHydrogens = 4;

struct AtomRecord {
  Element element = Element::C;
  int charge = 0;
  int hydrogens = 0;
  int map_number = 0;  // 0 = unmapped

  friend bool operator==(const AtomRecord&, const AtomRecord&) = default;
};

struct Neighbor {
  std::uint32_t atom;
  BondType type;
};

struct Bond {
  std::uint32_t a;
  std::uint32_t b;
  BondType type;

  friend bool operator==(const Bond&, const Bond&) = default;
};

/// Undirected labelled graph with at most one bond per atom pair and no
/// self-bonds. Atom indices are stable; bonds are stored as neighbour lists.
class Molecule {
 public:
  std::size_t atom_count() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const AtomRecord& atom(std::uint32_t i) const { return atoms_.at(i); }
  std::span<const AtomRecord> atoms() const { return atoms_; }
  const std::vector<Neighbor>& neighbors(std::uint32_t i) const { return adjacency_.at(i); }

  std::optional<BondType> bond(std::uint32_t i, std::uint32_t j) const;
  std::size_t bond_count() const;
  /// Every bond once, with a < b, in ascending (a, b) order.
  std::vector<Bond> bonds() const;

  std::size_t degree(std::uint32_t i) const { return adjacency_.at(i).size(); }
  /// Sum of valence units over the atom's bonds.
  int bond_units(std::uint32_t i) const;
  /// True when the atom carries at least one aromatic bond.
  bool is_aromatic(std::uint32_t i) const;

  std::uint32_t add_atom(const AtomRecord& atom);
  /// Rejects self-bonds, duplicates and out-of-range indices.
  void add_bond(std::uint32_t i, std::uint32_t j, BondType type);
  /// Rejects pairs that are not bonded.
  void remove_bond(std::uint32_t i, std::uint32_t j);
  void set_atom(std::uint32_t i, const AtomRecord& atom) { atoms_.at(i) = atom; }

  /// Dense n x n x kBondTypes binary tensor, index (i * n + j) * kBondTypes + k.
  std::vector<std::uint8_t> adjacency_tensor() const;

  /// Structural identity: same atom records at the same indices and the same bond set.
  friend bool operator==(const Molecule& x, const Molecule& y);

 private:
  std::vector<AtomRecord> atoms_;
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Returns the molecule with atom i moved to index perm[i].
Molecule permute(const Molecule& mol, std::span<const std::uint32_t> perm);

/// Copy with every atom-map number cleared.
Molecule strip_maps(const Molecule& mol);

}  // namespace retrograph::molgraph
