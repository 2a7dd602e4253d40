//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "retrograph/molgraph/molecule.hpp"

namespace retrograph::molgraph {

enum class SmilesErrorKind { Lexical, UnclosedRing, UnclosedBranch, UnknownElement, Valence, Bond };

std::string_view to_string(SmilesErrorKind kind);

class SmilesError : public std::invalid_argument {
 public:
  SmilesError(SmilesErrorKind kind, std::size_t position, const std::string& message);
  SmilesErrorKind kind() const { return kind_; }
  /// Zero-based byte offset into the parsed text.
  std::size_t position() const { return position_; }

 private:
  SmilesErrorKind kind_;
  std::size_t position_;
};

/// Parses the supported SMILES subset (see docs/smiles_grammar.md). Atoms are
/// numbered in token order. Bare atoms receive their implied hydrogens.
Molecule parse_smiles(std::string_view text);

/// Writes a SMILES string by depth-first traversal where `rank` orders start
/// atoms and neighbours (lower first). Components are joined with '.'.
std::string write_smiles(const Molecule& mol, std::span<const std::uint32_t> rank,
                         bool include_maps = false);

/// write_smiles with atom index as rank.
std::string write_smiles(const Molecule& mol, bool include_maps = false);

/// True when the atom is written in lowercase.
bool written_aromatic(const Molecule& mol, std::uint32_t atom);

}  // namespace retrograph::molgraph
