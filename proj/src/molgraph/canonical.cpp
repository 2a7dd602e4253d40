//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/molgraph/canonical.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <tuple>
#include <utility>

#include "retrograph/molgraph/smiles.hpp"
#include "retrograph/molgraph/surgery.hpp"

namespace retrograph::molgraph {
namespace {

constexpr std::size_t kLeafBudget = 10000;

using Classes = std::vector<std::uint32_t>;

// class[i] = number of atoms whose key is strictly smaller.
template <typename Key>
Classes rank_by(const std::vector<Key>& keys) {
  const std::size_t n = keys.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0U);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
  Classes cls(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint32_t i = order[k];
    cls[i] = (k > 0 && keys[order[k - 1]] == keys[i]) ? cls[order[k - 1]]
                                                       : static_cast<std::uint32_t>(k);
  }
  return cls;
}

std::size_t distinct(const Classes& c) {
  Classes s = c;
  std::sort(s.begin(), s.end());
  return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

Classes initial_classes(const Molecule& mol) {
  using Key = std::tuple<int, int, int, std::size_t, bool, std::vector<int>, int>;
  std::vector<Key> keys;
  keys.reserve(mol.atom_count());
  for (std::uint32_t i = 0; i < mol.atom_count(); ++i) {
    const auto& a = mol.atom(i);
    std::vector<int> types;
    for (const auto& nb : mol.neighbors(i)) types.push_back(static_cast<int>(nb.type));
    std::sort(types.begin(), types.end());
    keys.emplace_back(static_cast<int>(a.element), a.charge, a.hydrogens, mol.degree(i),
                      mol.is_aromatic(i), std::move(types), a.map_number);
  }
  return rank_by(keys);
}

Classes refine(const Molecule& mol, Classes cls) {
  std::size_t count = distinct(cls);
  while (true) {
    using Key = std::pair<std::uint32_t, std::vector<std::uint64_t>>;
    std::vector<Key> keys(mol.atom_count());
    for (std::uint32_t i = 0; i < mol.atom_count(); ++i) {
      keys[i].first = cls[i];
      for (const auto& nb : mol.neighbors(i)) {
        keys[i].second.push_back(static_cast<std::uint64_t>(cls[nb.atom]) * kBondTypes +
                                 static_cast<std::uint64_t>(nb.type));
      }
      std::sort(keys[i].second.begin(), keys[i].second.end());
    }
    Classes next = rank_by(keys);
    const std::size_t next_count = distinct(next);
    cls = std::move(next);
    if (next_count == count) return cls;
    count = next_count;
  }
}

struct Search {
  const Molecule& mol;
  bool keep_maps;
  std::optional<std::string> best;
  Classes best_ranks;
  std::size_t leaves = 0;

  void run(const Classes& cls) {
    if (leaves >= kLeafBudget) return;
    const std::size_t n = cls.size();
    // Smallest class value shared by more than one atom.
    std::vector<std::uint32_t> counts(n, 0);
    for (auto c : cls) ++counts[c];
    std::optional<std::uint32_t> tied;
    for (std::uint32_t c = 0; c < n; ++c) {
      if (counts[c] > 1) {
        tied = c;
        break;
      }
    }
    if (!tied) {
      ++leaves;
      std::string s = write_smiles(mol, cls, keep_maps);
      if (!best || s < *best) {
        best = std::move(s);
        best_ranks = cls;
      }
      return;
    }
    for (std::uint32_t m = 0; m < n; ++m) {
      if (cls[m] != *tied) continue;
      Classes split = cls;
      for (std::uint32_t o = 0; o < n; ++o) {
        if (o != m && cls[o] == *tied) split[o] = *tied + 1;
      }
      run(refine(mol, std::move(split)));
      if (leaves >= kLeafBudget) return;
    }
  }
};

struct CanonicalComponent {
  std::string smiles;
  Component comp;
  Classes ranks;
};

std::vector<CanonicalComponent> canonical_components(const Molecule& mol, bool keep_maps) {
  std::vector<CanonicalComponent> out;
  for (auto& comp : connected_components(keep_maps ? mol : strip_maps(mol))) {
    Search search{comp.mol, keep_maps, std::nullopt, {}, 0};
    search.run(refine(comp.mol, initial_classes(comp.mol)));
    out.push_back({std::move(*search.best), std::move(comp), std::move(search.best_ranks)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CanonicalComponent& a, const CanonicalComponent& b) {
                     return a.smiles < b.smiles;
                   });
  return out;
}

}  // namespace

std::vector<std::uint32_t> canonical_ranks(const Molecule& mol) {
  std::vector<std::uint32_t> ranks(mol.atom_count());
  std::uint32_t offset = 0;
  for (const auto& c : canonical_components(mol, false)) {
    for (std::size_t i = 0; i < c.ranks.size(); ++i) {
      ranks[c.comp.parent_index[i]] = offset + c.ranks[i];
    }
    offset += static_cast<std::uint32_t>(c.ranks.size());
  }
  return ranks;
}

namespace {

std::string join_components(const Molecule& mol, bool keep_maps) {
  std::string out;
  for (const auto& c : canonical_components(mol, keep_maps)) {
    if (!out.empty()) out.push_back('.');
    out += c.smiles;
  }
  return out;
}

}  // namespace

std::string write_canonical(const Molecule& mol) { return join_components(mol, false); }

std::string write_canonical_with_maps(const Molecule& mol) { return join_components(mol, true); }

std::string canonicalize(std::string_view smiles) { return write_canonical(parse_smiles(smiles)); }

}  // namespace retrograph::molgraph
