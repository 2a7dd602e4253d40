//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "retrograph/molgraph/molecule.hpp"

namespace retrograph::molgraph {

inline constexpr int kReactionClasses = 10;

class ReactionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Reaction {
  std::vector<Molecule> reactants;
  Molecule product;
  std::optional<int> reaction_class;  // 1..kReactionClasses
};

/// Parses "reactants>>product". Reactant-side components become separate
/// reactants. The result is validated with validate_reaction.
Reaction parse_reaction(std::string_view text, std::optional<int> reaction_class = std::nullopt);

/// Throws ReactionError unless: the product is one connected molecule with
/// every atom mapped; map numbers are unique on each side; every product map
/// occurs in a reactant; every reactant shares a map with the product; the
/// class, if present, is in 1..kReactionClasses.
void validate_reaction(const Reaction& r);

/// Map number -> atom index for mapped atoms.
std::unordered_map<int, std::uint32_t> map_index(const Molecule& mol);

/// Canonical strings of the reactants, sorted.
std::vector<std::string> canonical_set(const std::vector<Molecule>& mols);

}  // namespace retrograph::molgraph
