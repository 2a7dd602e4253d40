//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "../support/corpus.hpp"
#include "retrograph/molgraph/canonical.hpp"
#include "retrograph/molgraph/features.hpp"
#include "retrograph/molgraph/reaction.hpp"
#include "retrograph/molgraph/smiles.hpp"
#include "retrograph/molgraph/surgery.hpp"
#include "retrograph/molgraph/valence.hpp"

namespace {

using namespace retrograph::molgraph;

std::vector<std::uint32_t> random_perm(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0U);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// Products and reactants of the desk corpus, maps stripped.
std::vector<Molecule> corpus_molecules() {
  std::vector<Molecule> out;
  for (const auto& line : retrograph::testing::read_corpus()) {
    const auto r = parse_reaction(line.reaction, line.reaction_class);
    out.push_back(strip_maps(r.product));
    for (const auto& m : r.reactants) out.push_back(strip_maps(m));
  }
  return out;
}

void expect_adjacency_invariants(const Molecule& m) {
  const auto a = m.adjacency_tensor();
  const std::size_t n = m.atom_count();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      int set = 0;
      for (int k = 0; k < kBondTypes; ++k) {
        EXPECT_EQ(a[(i * n + j) * kBondTypes + k], a[(j * n + i) * kBondTypes + k]);
        set += a[(i * n + j) * kBondTypes + k];
      }
      EXPECT_LE(set, 1);
      if (i == j) {
        EXPECT_EQ(set, 0);
      }
    }
  }
}

SmilesErrorKind error_kind(const std::string& s) {
  try {
    parse_smiles(s);
  } catch (const SmilesError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << s;
  return SmilesErrorKind::Lexical;
}

// Parsing -------------------------------------------------------------------

TEST(Parse, Ethane) {
  const auto m = parse_smiles("CC");
  ASSERT_EQ(m.atom_count(), 2U);
  EXPECT_EQ(m.bond_count(), 1U);
  EXPECT_EQ(m.bond(0, 1), BondType::Single);
  EXPECT_EQ(m.atom(0).hydrogens, 3);
}

TEST(Parse, MappedBracketAtoms) {
  const auto m = parse_smiles("[CH3:1][OH:2]");
  ASSERT_EQ(m.atom_count(), 2U);
  EXPECT_EQ(m.atom(0).map_number, 1);
  EXPECT_EQ(m.atom(1).map_number, 2);
  EXPECT_EQ(m.atom(0).hydrogens, 3);
  EXPECT_EQ(m.atom(1).hydrogens, 1);
  EXPECT_EQ(m.atom(1).element, Element::O);
  EXPECT_EQ(m.bond(0, 1), BondType::Single);
}

TEST(Parse, CyclopropaneMatchesHandAdjacency) {
  const auto m = parse_smiles("C1CC1");
  ASSERT_EQ(m.atom_count(), 3U);
  // Hand-drawn: every pair of the three carbons is singly bonded.
  const std::vector<Bond> expected = {
      {0, 1, BondType::Single}, {0, 2, BondType::Single}, {1, 2, BondType::Single}};
  EXPECT_EQ(m.bonds(), expected);
  for (std::uint32_t i = 0; i < 3; ++i) EXPECT_EQ(m.atom(i).hydrogens, 2);
}

TEST(Parse, BranchesBondsAndCharges) {
  const auto m = parse_smiles("CC(=O)[O-].[NH4+]");
  ASSERT_EQ(m.atom_count(), 5U);
  EXPECT_EQ(m.bond(1, 2), BondType::Double);
  EXPECT_EQ(m.bond(1, 3), BondType::Single);
  EXPECT_EQ(m.atom(3).charge, -1);
  EXPECT_EQ(m.atom(4).charge, 1);
  EXPECT_EQ(m.atom(4).hydrogens, 4);
  EXPECT_FALSE(m.bond(3, 4).has_value());
  EXPECT_EQ(parse_smiles("[O--]").atom(0).charge, -2);
  EXPECT_EQ(parse_smiles("[N+2]").atom(0).charge, 2);
}

TEST(Parse, AromaticRingsAndImplicitHydrogens) {
  const auto benzene = parse_smiles("c1ccccc1");
  for (std::uint32_t i = 0; i < 6; ++i) {
    EXPECT_EQ(benzene.atom(i).hydrogens, 1);
    EXPECT_TRUE(benzene.is_aromatic(i));
  }
  EXPECT_EQ(benzene.bond(0, 5), BondType::Aromatic);
  const auto pyridine = parse_smiles("c1ccncc1");
  EXPECT_EQ(pyridine.atom(3).hydrogens, 0);
  const auto biphenyl = parse_smiles("c1ccccc1-c1ccccc1");
  EXPECT_EQ(biphenyl.bond(5, 6), BondType::Single);
  EXPECT_EQ(biphenyl.atom(5).hydrogens, 0);
  EXPECT_EQ(parse_smiles("[nH]1cccc1").atom(0).hydrogens, 1);
}

TEST(Parse, HypervalentDefaults) {
  EXPECT_EQ(parse_smiles("CS(=O)(=O)C").atom(1).hydrogens, 0);
  EXPECT_EQ(parse_smiles("S").atom(0).hydrogens, 2);
  EXPECT_EQ(parse_smiles("ClCBr").atom(0).hydrogens, 0);
  EXPECT_EQ(parse_smiles("CB(O)O").atom(1).hydrogens, 0);
  EXPECT_EQ(parse_smiles("B(O)O").atom(0).hydrogens, 1);
}

TEST(Parse, TwoDigitRingClosure) {
  const auto m = parse_smiles("C%12CC%12");
  EXPECT_EQ(m.bond_count(), 3U);
}

TEST(Parse, ErrorKindsAndPositions) {
  EXPECT_EQ(error_kind("C1CC"), SmilesErrorKind::UnclosedRing);
  EXPECT_EQ(error_kind("CC(C"), SmilesErrorKind::UnclosedBranch);
  EXPECT_EQ(error_kind("C[Xe]"), SmilesErrorKind::UnknownElement);
  EXPECT_EQ(error_kind("CX"), SmilesErrorKind::UnknownElement);
  EXPECT_EQ(error_kind("C(C)(C)(C)(C)C"), SmilesErrorKind::Valence);
  EXPECT_EQ(error_kind("C$C"), SmilesErrorKind::Lexical);
  EXPECT_EQ(error_kind("C/C=C/C"), SmilesErrorKind::Lexical);
  EXPECT_EQ(error_kind("[13CH4]"), SmilesErrorKind::Lexical);
  EXPECT_EQ(error_kind("[C@H](C)(N)O"), SmilesErrorKind::Lexical);
  EXPECT_EQ(error_kind("[CH5]"), SmilesErrorKind::Lexical);
  EXPECT_EQ(error_kind("[C+3]"), SmilesErrorKind::Lexical);
  EXPECT_EQ(error_kind(""), SmilesErrorKind::Lexical);
  EXPECT_EQ(error_kind("C."), SmilesErrorKind::Lexical);
  EXPECT_EQ(error_kind("CC)"), SmilesErrorKind::Lexical);
  EXPECT_EQ(error_kind("C11"), SmilesErrorKind::Bond);
  EXPECT_EQ(error_kind("C=1CC-1"), SmilesErrorKind::Bond);
  EXPECT_EQ(error_kind("cC"), SmilesErrorKind::Bond);

  try {
    parse_smiles("CC(C)1CC");
    FAIL();
  } catch (const SmilesError& e) {
    EXPECT_EQ(e.kind(), SmilesErrorKind::UnclosedRing);
    EXPECT_EQ(e.position(), 5U);
  }
  try {
    parse_smiles("CCO[Zz]");
    FAIL();
  } catch (const SmilesError& e) {
    EXPECT_EQ(e.position(), 4U);
  }
}

// Writing and canonical form --------------------------------------------------

TEST(Canonical, SingleCarbon) { EXPECT_EQ(write_canonical(parse_smiles("C")), "C"); }

TEST(Canonical, EthanolIsOrderInvariant) {
  EXPECT_EQ(write_canonical(parse_smiles("CCO")), write_canonical(parse_smiles("OCC")));
  EXPECT_EQ(canonicalize("C(O)C"), canonicalize("OCC"));
}

TEST(Canonical, MapsAreOmitted) {
  EXPECT_EQ(canonicalize("[CH3:1][CH2:2][OH:3]"), canonicalize("CCO"));
}

TEST(Canonical, ComponentsAreSorted) {
  EXPECT_EQ(canonicalize("O.CC"), canonicalize("CC.O"));
}

TEST(Canonical, DistinctMoleculesDiffer) {
  EXPECT_NE(canonicalize("CCO"), canonicalize("COC"));
  EXPECT_NE(canonicalize("c1ccccc1"), canonicalize("C1CCCCC1"));
  EXPECT_NE(canonicalize("Cc1ccccc1C"), canonicalize("Cc1cccc(C)c1"));
}

TEST(Canonical, CorpusPermutationFuzz) {
  const auto mols = corpus_molecules();
  ASSERT_GE(mols.size(), 50U);
  std::mt19937_64 rng(7);
  for (std::size_t k = 0; k < 50; ++k) {
    const auto& m = mols[k];
    const std::string reference = write_canonical(m);
    for (int t = 0; t < 500; ++t) {
      const auto p = random_perm(m.atom_count(), rng);
      ASSERT_EQ(write_canonical(permute(m, p)), reference) << "molecule " << k;
    }
  }
}

TEST(Canonical, CorpusRoundTrip) {
  for (const auto& m : corpus_molecules()) {
    const std::string s = write_canonical(m);
    const auto back = parse_smiles(s);
    EXPECT_EQ(back.atom_count(), m.atom_count());
    EXPECT_EQ(write_canonical(back), s);
    // Identity through the canonical labelling.
    EXPECT_TRUE(permute(back, canonical_ranks(back)) == permute(m, canonical_ranks(m))) << s;
  }
}

TEST(Canonical, MappedWriterRoundTripsExactly) {
  for (const auto& line : retrograph::testing::read_corpus()) {
    const auto r = parse_reaction(line.reaction);
    EXPECT_TRUE(parse_smiles(write_smiles(r.product, true)) == r.product);
  }
}

TEST(Ranks, ChainHasDistinctRanks) {
  const auto r = canonical_ranks(parse_smiles("CNO"));
  EXPECT_EQ(std::set<std::uint32_t>(r.begin(), r.end()).size(), 3U);
}

TEST(Ranks, SymmetricRingTieBreak) {
  const auto m = parse_smiles("C1CCCCC1");
  const auto r = canonical_ranks(m);
  std::vector<std::uint32_t> sorted = r;
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < 6; ++i) EXPECT_EQ(sorted[i], i);
  // Neighbouring ranks walk around the ring.
  const auto first = static_cast<std::uint32_t>(std::find(r.begin(), r.end(), 0U) - r.begin());
  const auto second = static_cast<std::uint32_t>(std::find(r.begin(), r.end(), 1U) - r.begin());
  EXPECT_TRUE(m.bond(first, second).has_value());
}

Molecule random_molecule(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(2, 12);
  const int n = size(rng);
  const Element pool[] = {Element::C, Element::C, Element::C, Element::N, Element::O};
  Molecule m;
  for (int i = 0; i < n; ++i) {
    m.add_atom({pool[std::uniform_int_distribution<int>(0, 4)(rng)], 0, 0, 0});
  }
  auto room = [&](std::uint32_t i, int units) {
    return m.bond_units(i) + units <= max_valence(m.atom(i).element, 0);
  };
  for (std::uint32_t i = 1; i < static_cast<std::uint32_t>(n); ++i) {
    for (int tries = 0; tries < 20; ++tries) {
      const auto j = std::uniform_int_distribution<std::uint32_t>(0, i - 1)(rng);
      if (room(i, 1) && room(j, 1)) {
        m.add_bond(i, j, BondType::Single);
        break;
      }
    }
  }
  for (int extra = 0; extra < 3; ++extra) {
    const auto i = std::uniform_int_distribution<std::uint32_t>(0, n - 1)(rng);
    const auto j = std::uniform_int_distribution<std::uint32_t>(0, n - 1)(rng);
    const auto t = std::bernoulli_distribution(0.3)(rng) ? BondType::Double : BondType::Single;
    if (i != j && !m.bond(i, j) && room(i, valence_units(t)) && room(j, valence_units(t))) {
      m.add_bond(i, j, t);
    }
  }
  for (std::uint32_t i = 0; i < static_cast<std::uint32_t>(n); ++i) {
    AtomRecord a = m.atom(i);
    a.hydrogens = implicit_hydrogens(a.element, m.bond_units(i), false);
    m.set_atom(i, a);
  }
  return m;
}

TEST(Ranks, StableUnderRelabeling) {
  std::mt19937_64 rng(11);
  for (int g = 0; g < 100; ++g) {
    const auto m = random_molecule(rng);
    const auto canon = permute(m, canonical_ranks(m));
    for (int t = 0; t < 10; ++t) {
      const auto pm = permute(m, random_perm(m.atom_count(), rng));
      ASSERT_TRUE(permute(pm, canonical_ranks(pm)) == canon) << write_smiles(m);
      ASSERT_EQ(write_canonical(pm), write_canonical(m));
    }
  }
}

// Surgery -------------------------------------------------------------------

TEST(Surgery, RemoveOnlyBondOfEthane) {
  const std::vector<AtomPair> pairs = {{0, 1}};
  const auto m = remove_bonds(parse_smiles("CC"), pairs);
  EXPECT_EQ(m.atom_count(), 2U);
  EXPECT_EQ(m.bond_count(), 0U);
  EXPECT_EQ(connected_components(m).size(), 2U);
}

TEST(Surgery, RingOpeningStaysConnected) {
  const std::vector<AtomPair> pairs = {{0, 2}};
  const auto m = remove_bonds(parse_smiles("C1CC1"), pairs);
  EXPECT_EQ(m.bond_count(), 2U);
  EXPECT_EQ(connected_components(m).size(), 1U);
}

TEST(Surgery, RemovingUnbondedPairIsRejected) {
  const std::vector<AtomPair> pairs = {{0, 2}};
  EXPECT_THROW(remove_bonds(parse_smiles("CCC"), pairs), std::invalid_argument);
}

TEST(Surgery, EsterSplitMatchesHandOracle) {
  // Methyl acetate: carbonyl C is atom 1, ester O atom 3, methyl atom 4.
  const auto ester = parse_smiles("[CH3:1][C:2](=[O:3])[O:4][CH3:5]");
  const std::vector<AtomPair> pairs = {{1, 3}};
  const auto split = remove_bonds(ester, pairs);
  const auto comps = connected_components(split);
  ASSERT_EQ(comps.size(), 2U);
  EXPECT_EQ(comps[0].parent_index, (std::vector<std::uint32_t>{0, 1, 2}));
  EXPECT_EQ(comps[1].parent_index, (std::vector<std::uint32_t>{3, 4}));
  // Hand oracle: an acetyl fragment and a methoxy fragment, hydrogens unchanged.
  EXPECT_EQ(comps[0].mol.bonds(),
            (std::vector<Bond>{{0, 1, BondType::Single}, {1, 2, BondType::Double}}));
  EXPECT_EQ(comps[1].mol.bonds(), (std::vector<Bond>{{0, 1, BondType::Single}}));
  EXPECT_EQ(comps[1].mol.atom(0).map_number, 4);
  EXPECT_EQ(comps[1].mol.atom(0).hydrogens, 0);
}

TEST(Surgery, ComponentsOfConnectedMoleculeIsIdentity) {
  const auto m = parse_smiles("CC(=O)O");
  const auto comps = connected_components(m);
  ASSERT_EQ(comps.size(), 1U);
  EXPECT_TRUE(comps[0].mol == m);
}

TEST(Surgery, IsolatedAtomsAreSingletons) {
  const auto comps = connected_components(parse_smiles("C.O"));
  ASSERT_EQ(comps.size(), 2U);
  EXPECT_EQ(comps[0].mol.atom_count(), 1U);
  EXPECT_EQ(comps[1].parent_index, (std::vector<std::uint32_t>{1}));
}

TEST(Surgery, ComponentsPartitionAndPreserve) {
  for (const auto& m : corpus_molecules()) {
    std::mt19937_64 rng(m.atom_count());
    auto bonds = m.bonds();
    std::shuffle(bonds.begin(), bonds.end(), rng);
    std::vector<AtomPair> cut;
    for (std::size_t k = 0; k < std::min<std::size_t>(2, bonds.size()); ++k) {
      cut.emplace_back(bonds[k].a, bonds[k].b);
    }
    const auto split = remove_bonds(m, cut);
    expect_adjacency_invariants(split);
    std::vector<int> covered(m.atom_count(), 0);
    std::size_t bond_total = 0;
    for (const auto& c : connected_components(split)) {
      for (std::uint32_t i = 0; i < c.mol.atom_count(); ++i) {
        ++covered[c.parent_index[i]];
        EXPECT_EQ(c.mol.atom(i), split.atom(c.parent_index[i]));
      }
      for (const auto& b : c.mol.bonds()) {
        EXPECT_EQ(split.bond(c.parent_index[b.a], c.parent_index[b.b]), b.type);
      }
      bond_total += c.mol.bond_count();
    }
    EXPECT_EQ(bond_total, split.bond_count());
    for (int v : covered) EXPECT_EQ(v, 1);

    // Re-adding the removed bonds restores the canonical form.
    Molecule restored = split;
    for (std::size_t k = 0; k < cut.size(); ++k) {
      restored.add_bond(cut[k].first, cut[k].second, *m.bond(cut[k].first, cut[k].second));
    }
    expect_adjacency_invariants(restored);
    EXPECT_EQ(write_canonical(restored), write_canonical(m));
  }
}

TEST(Molecule, MutationsRejectBadBonds) {
  Molecule m;
  m.add_atom({Element::C, 0, 4, 0});
  m.add_atom({Element::C, 0, 4, 0});
  EXPECT_THROW(m.add_bond(0, 0, BondType::Single), std::invalid_argument);
  m.add_bond(0, 1, BondType::Single);
  EXPECT_THROW(m.add_bond(1, 0, BondType::Double), std::invalid_argument);
  EXPECT_THROW(m.add_bond(0, 7, BondType::Single), std::out_of_range);
  expect_adjacency_invariants(m);
}

// Valence -------------------------------------------------------------------

TEST(Valence, MethaneIsFine) {
  EXPECT_TRUE(valence_ok(parse_smiles("C")).ok);
  EXPECT_EQ(parse_smiles("C").atom(0).hydrogens, 4);
}

TEST(Valence, FiveBondCarbonIsFlagged) {
  Molecule m;
  const auto c = m.add_atom({Element::C, 0, 0, 0});
  for (int i = 0; i < 5; ++i) m.add_bond(c, m.add_atom({Element::F, 0, 0, 0}), BondType::Single);
  const auto report = valence_ok(m);
  EXPECT_FALSE(report.ok);
  EXPECT_EQ(report.violations, (std::vector<std::uint32_t>{0}));
}

TEST(Valence, ChargeAdjustsCapacity) {
  EXPECT_EQ(max_valence(Element::N, 1), 4);
  EXPECT_EQ(max_valence(Element::O, -1), 1);
  EXPECT_EQ(max_valence(Element::C, 1), 3);
  EXPECT_EQ(max_valence(Element::C, -1), 3);
  EXPECT_EQ(max_valence(Element::B, -1), 4);
  EXPECT_EQ(max_valence(Element::Cl, 0), 1);
}

TEST(Valence, CorpusScan) {
  for (const auto& m : corpus_molecules()) EXPECT_TRUE(valence_ok(m).ok) << write_canonical(m);
}

// Reactions and features ------------------------------------------------------

TEST(Reaction, ParsesCorpus) {
  const auto lines = retrograph::testing::read_corpus();
  ASSERT_EQ(lines.size(), 50U);
  for (const auto& line : lines) {
    const auto r = parse_reaction(line.reaction, line.reaction_class);
    EXPECT_GE(r.reactants.size(), 1U);
    const auto maps = map_index(r.product);
    EXPECT_EQ(maps.size(), r.product.atom_count());
  }
}

TEST(Reaction, ValidationRejectsBadInput) {
  EXPECT_THROW(parse_reaction("[CH4:1]"), ReactionError);
  EXPECT_THROW(parse_reaction("[CH4:1]>>[CH4:1].[OH2:2]"), ReactionError);
  EXPECT_THROW(parse_reaction("[CH4:1]>>[CH3:1]C"), ReactionError);
  EXPECT_THROW(parse_reaction("[CH4:1].[CH4:1]>>[CH4:1]"), ReactionError);
  EXPECT_THROW(parse_reaction("[CH4:2]>>[CH4:1]"), ReactionError);
  EXPECT_THROW(parse_reaction("[CH4:1].O>>[CH4:1]"), ReactionError);
  EXPECT_THROW(parse_reaction("[CH4:1]>>[CH4:1]", 11), ReactionError);
  EXPECT_NO_THROW(parse_reaction("[CH4:1]>>[CH4:1]", 10));
}

TEST(Reaction, CanonicalSetIgnoresOrder) {
  const std::vector<Molecule> a = {parse_smiles("CCO"), parse_smiles("O=C=O")};
  const std::vector<Molecule> b = {parse_smiles("C(=O)=O"), parse_smiles("OCC")};
  EXPECT_EQ(canonical_set(a), canonical_set(b));
}

TEST(Features, OneHotLayout) {
  const ElementVocabulary vocab({Element::C, Element::O});
  EXPECT_EQ(feature_width(vocab), 12U);
  const auto x = node_features(parse_smiles("C[O-]"), vocab);
  ASSERT_EQ(x.rows(), 2U);
  const std::vector<double> carbon = {1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0};
  const std::vector<double> oxide = {0, 1, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0};
  EXPECT_TRUE(std::equal(carbon.begin(), carbon.end(), x.row(0).begin()));
  EXPECT_TRUE(std::equal(oxide.begin(), oxide.end(), x.row(1).begin()));
}

TEST(Features, UnknownElementRejected) {
  const ElementVocabulary vocab({Element::C});
  EXPECT_THROW(node_features(parse_smiles("CO"), vocab), VocabularyError);
}

TEST(Features, VocabularyRoundTrip) {
  const auto mols = corpus_molecules();
  const auto vocab = ElementVocabulary::from_molecules(mols);
  EXPECT_EQ(ElementVocabulary::parse(vocab.to_string()), vocab);
  for (const auto& m : mols) EXPECT_TRUE(vocab.contains(m));
}

}  // namespace

namespace {

TEST(Canonical, MapAwareVariant) {
  using namespace retrograph::molgraph;
  const auto a = parse_smiles("[CH3:1]C[OH:2]");
  const auto b = parse_smiles("[OH:2]C[CH3:1]");
  const auto c = parse_smiles("[CH3:2]C[OH:1]");
  EXPECT_EQ(write_canonical_with_maps(a), write_canonical_with_maps(b));
  EXPECT_NE(write_canonical_with_maps(a), write_canonical_with_maps(c));
  EXPECT_EQ(write_canonical(a), write_canonical(c));
  EXPECT_EQ(write_canonical(parse_smiles(write_canonical_with_maps(a))), write_canonical(a));
}

}  // namespace
