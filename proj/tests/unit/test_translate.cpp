//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "../support/corpus.hpp"
#include "../support/exhaustive.hpp"
#include "../support/gradcheck.hpp"
#include "retrograph/molgraph/canonical.hpp"
#include "retrograph/molgraph/smiles.hpp"
#include "retrograph/molgraph/valence.hpp"
#include "retrograph/numcore/batch.hpp"
#include "retrograph/numcore/functions.hpp"
#include "retrograph/translate/beam.hpp"
#include "retrograph/translate/train.hpp"

namespace {

using namespace retrograph;
using molgraph::BondType;
using molgraph::Element;
using numcore::ParameterStore;
using numcore::Tensor2;
using translate::Action;
using translate::AtomVocabulary;
using translate::Trace;
using translate::TranslationState;
using translate::VocabAtom;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<molgraph::Reaction> corpus() {
  std::vector<molgraph::Reaction> out;
  for (const auto& line : retrograph::testing::read_corpus()) {
    out.push_back(molgraph::parse_reaction(line.reaction, line.reaction_class));
  }
  return out;
}

molgraph::ElementVocabulary corpus_elements() {
  std::vector<molgraph::Molecule> mols;
  for (const auto& r : corpus()) {
    mols.push_back(r.product);
    for (const auto& m : r.reactants) mols.push_back(m);
  }
  return molgraph::ElementVocabulary::from_molecules(mols);
}

AtomVocabulary corpus_atoms() {
  std::vector<VocabAtom> types;
  for (const auto& r : corpus()) {
    const auto t = translate::new_atom_types(r);
    types.insert(types.end(), t.begin(), t.end());
  }
  return AtomVocabulary(types);
}

std::vector<translate::TranslationPair> corpus_pairs(const AtomVocabulary& atoms, std::size_t limit = 50) {
  std::vector<translate::TranslationPair> out;
  const auto rxns = corpus();
  for (std::size_t i = 0; i < std::min(limit, rxns.size()); ++i) {
    const auto centers = center::derive_labels(rxns[i]).positives();
    for (auto& p : translate::make_translation_pairs(rxns[i], centers, atoms, false)) out.push_back(std::move(p));
  }
  return out;
}

// Synthon state from SMILES; hydrogens are taken as free hydrogens.
TranslationState state_of(const std::string& smiles, std::vector<char> attachment = {}) {
  TranslationState s;
  s.mol = molgraph::parse_smiles(smiles);
  s.attachment = attachment.empty() ? std::vector<char>(s.mol.atom_count(), 0) : std::move(attachment);
  return s;
}

translate::TranslateConfig small_config(bool with_class = false) {
  translate::TranslateConfig cfg;
  cfg.encoder = {2, 6};
  cfg.latent = 3;
  cfg.class_conditioned = with_class;
  cfg.class_width = 3;
  return cfg;
}

void zero_final_layer(ParameterStore& store, const numcore::FeedForward& ff) {
  store[ff.weight(ff.layers() - 1)].value.fill(0.0);
  store[ff.bias(ff.layers() - 1)].value.fill(0.0);
}

// A few random valid actions from each corpus synthon.
std::vector<TranslationState> random_states(const AtomVocabulary& atoms, std::uint64_t seed) {
  std::vector<TranslationState> out;
  numcore::Rng rng(seed);
  for (const auto& p : corpus_pairs(atoms, 20)) {
    TranslationState s = p.synthon;
    out.push_back(s);
    for (int step = 0; step < 3; ++step) {
      std::vector<Action> valid;
      for (std::uint32_t a2 = 0; a2 < s.atom_count(); ++a2) {
        for (std::uint32_t a3 = 0; a3 < s.atom_count() + atoms.size(); ++a3) {
          const Action a{false, a2, a3, BondType::Single};
          if (translate::action_valid(s, a, atoms)) valid.push_back(a);
        }
      }
      if (valid.empty()) break;
      std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
      translate::apply_action(s, valid[pick(rng)], atoms);
      out.push_back(s);
    }
  }
  return out;
}

// ---- vocabulary, actions, edits ----

TEST(Vocabulary, SortedUniqueAndRoundTrips) {
  const AtomVocabulary v({{Element::O, 0, 2}, {Element::C, 0, 4}, {Element::O, 0, 2}, {Element::Br, 0, 1}});
  ASSERT_EQ(v.size(), 3U);
  EXPECT_EQ(v[0].element, Element::C);
  EXPECT_EQ(v.to_string(), "C/0/4,O/0/2,Br/0/1");
  EXPECT_EQ(AtomVocabulary::parse(v.to_string()), v);
  EXPECT_EQ(v.index_of({Element::O, 0, 2}), 1U);
  EXPECT_FALSE(v.index_of({Element::N, 0, 3}).has_value());
  EXPECT_THROW(AtomVocabulary::parse("C/0"), translate::VocabularyError);
  EXPECT_THROW(AtomVocabulary::parse("Xx/0/1"), translate::VocabularyError);
}

TEST(Actions, ApplyMovesHydrogensIntoTheBond) {
  const AtomVocabulary v({{Element::O, 0, 2}});
  auto s = state_of("[CH4:1]", {1});
  translate::apply_action(s, {false, 0, 1, BondType::Double}, v);
  ASSERT_EQ(s.atom_count(), 2U);
  EXPECT_EQ(s.mol.atom(0).hydrogens, 2);
  EXPECT_EQ(s.mol.atom(1).hydrogens, 0);
  EXPECT_EQ(s.mol.bond(0, 1), BondType::Double);
  EXPECT_EQ(s.attachment, (std::vector<char>{1, 0}));
  EXPECT_THROW(translate::apply_action(s, {false, 0, 0, BondType::Single}, v), translate::ActionError);
  EXPECT_THROW(translate::apply_action(s, {false, 0, 1, BondType::Single}, v), translate::ActionError);
  EXPECT_THROW(translate::apply_action(s, {false, 2, 0, BondType::Single}, v), translate::ActionError);
  EXPECT_THROW(translate::apply_action(s, Action::stop_action(), v), translate::ActionError);
}

TEST(Actions, ValidityFilter) {
  const AtomVocabulary v({{Element::F, 0, 1}, {Element::O, 0, 2}});
  const auto s = state_of("[CH:1]([CH3:2])=O", {1, 0, 0});
  EXPECT_TRUE(translate::action_valid(s, {false, 0, 3, BondType::Single}, v));
  EXPECT_FALSE(translate::action_valid(s, {false, 0, 3, BondType::Double}, v));  // C has one free H
  EXPECT_FALSE(translate::action_valid(s, {false, 0, 1, BondType::Single}, v));  // already bonded
  EXPECT_FALSE(translate::action_valid(s, {false, 2, 3, BondType::Single}, v));  // O has no free H
  EXPECT_FALSE(translate::action_valid(s, {false, 0, 0, BondType::Single}, v));
  EXPECT_FALSE(translate::action_valid(s, {false, 0, 5, BondType::Single}, v));
  EXPECT_TRUE(translate::action_valid(s, Action::stop_action(), v));
  auto crowded = state_of("C");
  auto rec = crowded.mol.atom(0);
  rec.hydrogens = 5;
  crowded.mol.set_atom(0, rec);
  EXPECT_FALSE(translate::action_valid(crowded, Action::stop_action(), v));
}

TEST(Synthons, CappingAddsBrokenUnitsAndFlags) {
  const auto product = molgraph::parse_smiles("[CH3:1][O:2][CH2:3][CH3:4]");
  const std::vector<molgraph::AtomPair> centers = {{0, 1}};
  const auto syn = translate::make_synthons(product, centers);
  ASSERT_EQ(syn.size(), 2U);
  EXPECT_EQ(syn[0].state.mol.atom(0).hydrogens, 4);
  EXPECT_EQ(syn[0].state.attachment, (std::vector<char>{1}));
  EXPECT_EQ(syn[1].state.mol.atom(0).hydrogens, 1);
  EXPECT_EQ(syn[1].state.attachment, (std::vector<char>{1, 0, 0}));
  EXPECT_EQ(syn[1].product_index, (std::vector<std::uint32_t>{1, 2, 3}));
}

TEST(Synthons, StateKeySeesAttachmentFlags) {
  const auto a = state_of("[CH3:1][CH2:2][OH:3]", {1, 0, 0});
  const auto b = state_of("[CH3:7][CH2:8][OH:9]", {1, 0, 0});
  const auto c = state_of("[CH3:1][CH2:2][OH:3]", {0, 0, 1});
  EXPECT_EQ(translate::state_key(a), translate::state_key(b));
  EXPECT_NE(translate::state_key(a), translate::state_key(c));
}

TEST(Edits, IdentityIsEmpty) {
  const auto s = state_of("[CH3:1][OH:2]");
  const auto e = translate::diff_edits(s, s.mol);
  EXPECT_TRUE(e.empty());
  EXPECT_TRUE(e.new_atoms.empty());
}

TEST(Edits, HalideAddsOneAtomAndOneBond) {
  const auto s = state_of("[CH3:1][CH3:2]", {0, 1});
  const auto g = molgraph::parse_smiles("[CH3:1][CH2:2]Br");
  const auto e = translate::diff_edits(s, g);
  EXPECT_EQ(e.synthon_to_reactant, (std::vector<std::uint32_t>{0, 1}));
  EXPECT_EQ(e.new_atoms, (std::vector<std::uint32_t>{2}));
  ASSERT_EQ(e.new_atom_types.size(), 1U);
  EXPECT_EQ(e.new_atom_types[0], (VocabAtom{Element::Br, 0, 1}));
  ASSERT_EQ(e.new_bonds.size(), 1U);
  EXPECT_EQ(e.new_bonds[0].a, 1U);
  EXPECT_EQ(e.new_bonds[0].b, 2U);
  EXPECT_EQ(e.new_bonds[0].type, BondType::Single);
}

TEST(Edits, RingClosureAddsOnlyABond) {
  const auto s = state_of("[CH3:1][CH2:2][CH3:3]", {1, 0, 1});
  const auto g = molgraph::parse_smiles("[CH2:1]1[CH2:2][CH2:3]1");
  const auto e = translate::diff_edits(s, g);
  EXPECT_TRUE(e.new_atoms.empty());
  ASSERT_EQ(e.new_bonds.size(), 1U);
  EXPECT_EQ(std::minmax(e.new_bonds[0].a, e.new_bonds[0].b), std::minmax(0U, 2U));
}

TEST(Edits, ApplyingEditsReproducesTheReactant) {
  const auto atoms = corpus_atoms();
  for (const auto& p : corpus_pairs(atoms)) {
    const auto traces = translate::bfs_traces(p.synthon, p.edits, atoms);
    ASSERT_TRUE(traces.has_value());
    const auto out = translate::replay(p.synthon, traces->front(), atoms);
    EXPECT_EQ(molgraph::write_canonical_with_maps(out.mol), molgraph::write_canonical_with_maps(p.reactant));
  }
}

TEST(Edits, RejectsPairsThatAreNotSubgraphs) {
  EXPECT_THROW(translate::diff_edits(state_of("[CH2:1]=[CH2:2]"), molgraph::parse_smiles("[CH3:1][CH3:2]")),
               translate::EditError);
  EXPECT_THROW(translate::diff_edits(state_of("[CH4:1]"), molgraph::parse_smiles("[NH3:1]")), translate::EditError);
  EXPECT_THROW(translate::diff_edits(state_of("[CH3:1]"), molgraph::parse_smiles("[CH3:1]Br")), translate::EditError);
  EXPECT_THROW(translate::diff_edits(state_of("[CH4:1]"), molgraph::parse_smiles("[CH4:2]")), translate::EditError);
  EXPECT_THROW(translate::diff_edits(state_of("C"), molgraph::parse_smiles("C")), translate::EditError);
  EXPECT_NO_THROW(translate::diff_edits(state_of("[CH4:1]"), molgraph::parse_smiles("[CH3:1]Br")));
}

// ---- traces ----

// Distances from the synthon of the atoms a trace adds, in the order it adds them.
std::vector<int> added_depths(const TranslationState& s, const Trace& t, const AtomVocabulary& v) {
  const auto out = translate::replay(s, t, v);
  std::vector<int> depth(out.atom_count(), -1);
  std::vector<std::uint32_t> frontier;
  for (std::uint32_t i = 0; i < s.atom_count(); ++i) {
    depth[i] = 0;
    frontier.push_back(i);
  }
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    for (const auto& nb : out.mol.neighbors(frontier[i])) {
      if (depth[nb.atom] < 0) {
        depth[nb.atom] = depth[frontier[i]] + 1;
        frontier.push_back(nb.atom);
      }
    }
  }
  return {depth.begin() + static_cast<long>(s.atom_count()), depth.end()};
}

TEST(Traces, EmptyEditSetIsJustStop) {
  const AtomVocabulary v({{Element::F, 0, 1}});
  const auto s = state_of("[CH4:1]");
  const auto traces = translate::bfs_traces(s, translate::diff_edits(s, s.mol), v);
  ASSERT_TRUE(traces.has_value());
  ASSERT_EQ(traces->size(), 1U);
  EXPECT_EQ(traces->front().actions, std::vector<Action>{Action::stop_action()});
}

TEST(Traces, ChainsGrowNearAtomsFirst) {
  const auto s = state_of("[CH3:1][CH3:2]", {1, 1});
  const auto g = molgraph::parse_smiles("Br[CH2][CH2:1][CH2:2][O][CH3]");
  const auto e = translate::diff_edits(s, g);
  const AtomVocabulary v(e.new_atom_types);
  const auto bfs = translate::bfs_traces(s, e, v);
  ASSERT_TRUE(bfs.has_value());
  EXPECT_EQ(bfs->size(), 2U);
  // Breadth-first orders among all orderings: added atoms appear by nondecreasing depth.
  std::set<Trace> legal;
  for (const auto& t : translate::all_traces(s, e, v)) {
    const auto d = added_depths(s, t, v);
    if (std::is_sorted(d.begin(), d.end())) legal.insert(t);
  }
  EXPECT_LT(legal.size(), translate::all_traces(s, e, v).size());
  for (const auto& t : *bfs) {
    EXPECT_TRUE(legal.count(t));
    EXPECT_EQ(added_depths(s, t, v), (std::vector<int>{1, 1, 2, 2}));
  }
}

TEST(Traces, EveryPrefixStaysConnected) {
  const auto atoms = corpus_atoms();
  for (const auto& p : corpus_pairs(atoms)) {
    for (const auto& t : p.sampler.universe()) {
      TranslationState st = p.synthon;
      for (const auto& a : t.actions) {
        if (a.stop) break;
        ASSERT_LT(a.a2, st.atom_count());
        translate::apply_action(st, a, atoms);
        EXPECT_EQ(molgraph::connected_components(st.mol).size(), 1U);
      }
      EXPECT_TRUE(t.actions.back().stop);
    }
  }
}

TEST(Traces, IndependentEditsAreSampledUniformly) {
  const auto s = state_of("[CH3:1][CH2:2][CH3:3]", {1, 1, 1});
  const auto g = molgraph::parse_smiles("F[CH2:1][CH:2](Cl)[CH2:3]Br");
  const auto e = translate::diff_edits(s, g);
  const AtomVocabulary v(e.new_atom_types);
  const translate::TraceSampler sampler(s, e, v);
  ASSERT_EQ(sampler.universe_size(), 6U);
  std::map<Trace, int> counts;
  numcore::Rng rng(2026);
  constexpr int kDraws = 1000;
  for (int i = 0; i < kDraws; ++i) ++counts[sampler.sample(rng)];
  ASSERT_EQ(counts.size(), 6U);
  double chi2 = 0.0;
  const double expected = kDraws / 6.0;
  for (const auto& [t, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 15.086);  // chi-square, 5 degrees of freedom, p = 0.01
}

TEST(Traces, CappedSamplerFallsBackToRandomWalk) {
  const auto s = state_of("[CH3:1][CH2:2][CH3:3]", {1, 1, 1});
  const auto g = molgraph::parse_smiles("F[CH2:1][CH:2](Cl)[CH2:3]Br");
  const auto e = translate::diff_edits(s, g);
  const AtomVocabulary v(e.new_atom_types);
  EXPECT_FALSE(translate::bfs_traces(s, e, v, 5).has_value());
  const translate::TraceSampler sampler(s, e, v, 5);
  EXPECT_FALSE(sampler.universe_size().has_value());
  numcore::Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(molgraph::write_canonical(translate::replay(s, sampler.sample(rng), v).mol),
              molgraph::write_canonical(g));
  }
}

TEST(Traces, AllOrderingsOfTwoIndependentEdits) {
  const auto s = state_of("[CH3:1][CH3:2]", {1, 1});
  const auto g = molgraph::parse_smiles("F[CH2:1][CH2:2]Cl");
  const auto e = translate::diff_edits(s, g);
  const AtomVocabulary v(e.new_atom_types);
  EXPECT_EQ(translate::all_traces(s, e, v).size(), 2U);
  const auto ring = state_of("[CH3:1][CH2:2][CH3:3]", {1, 0, 1});
  const auto closed = molgraph::parse_smiles("[CH2:1]1[CH2:2][CH2:3]1");
  const auto re = translate::diff_edits(ring, closed);
  EXPECT_EQ(translate::all_traces(ring, re, v).size(), 2U);  // both orientations
  EXPECT_EQ(translate::bfs_traces(ring, re, v)->size(), 2U);  // either root may pop first
}

TEST(Traces, ExactEnumerationRefusesLargeEditSets) {
  const auto s = state_of("[CH4:1]", {1});
  const auto g = molgraph::parse_smiles("[CH3:1]CCCCCCC");
  const auto e = translate::diff_edits(s, g);
  const AtomVocabulary v(e.new_atom_types);
  EXPECT_THROW(translate::all_traces(s, e, v), translate::TooManyEdits);
}

TEST(Traces, SampledTracesRebuildEveryCorpusReactant) {
  const auto atoms = corpus_atoms();
  numcore::Rng rng(5);
  for (const auto& p : corpus_pairs(atoms)) {
    for (int i = 0; i < 5; ++i) {
      const auto out = translate::replay(p.synthon, p.sampler.sample(rng), atoms);
      EXPECT_EQ(molgraph::write_canonical_with_maps(out.mol), molgraph::write_canonical_with_maps(p.reactant));
    }
  }
}

// ---- step distributions and trace probabilities ----

class ModelTest : public ::testing::Test {
 protected:
  void SetUp() override {
    elements = corpus_elements();
    atoms = corpus_atoms();
    numcore::Rng rng(11);
    model = translate::TranslateModel(store, elements, atoms, small_config(), rng);
    z = {0.3, -1.2, 0.5};
  }

  molgraph::ElementVocabulary elements;
  AtomVocabulary atoms;
  ParameterStore store;
  translate::TranslateModel model;
  std::vector<double> z;
};

TEST_F(ModelTest, SingleAtomStateForcesTheFirstNode) {
  const auto d = model.step(store, state_of("[CH4:1]", {1}), z, std::nullopt);
  ASSERT_EQ(d.log_first().size(), 1 + atoms.size());
  EXPECT_EQ(d.log_first()[0], 0.0);
  for (std::size_t v = 1; v < d.log_first().size(); ++v) EXPECT_EQ(d.log_first()[v], kNegInf);
}

TEST_F(ModelTest, DistributionsNormalizeAndRespectMasks) {
  for (const auto& s : random_states(atoms, 1)) {
    const auto d = model.step(store, s, z, std::nullopt);
    EXPECT_NEAR(std::exp(d.log_stop()) + std::exp(d.log_continue()), 1.0, 1e-9);
    double total = 0.0;
    for (std::size_t v = 0; v < d.nodes(); ++v) {
      if (v >= s.atom_count()) {
        EXPECT_EQ(d.log_first()[v], kNegInf);
      }
      total += std::exp(d.log_first()[v]);
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    for (std::uint32_t a2 = 0; a2 < s.atom_count(); ++a2) {
      const auto second = d.log_second(a2);
      EXPECT_EQ(second[a2], kNegInf);
      double t2 = 0.0;
      for (double lp : second) t2 += std::exp(lp);
      EXPECT_NEAR(t2, 1.0, 1e-9);
      const Tensor2 bond = d.log_bond(a2);
      for (std::size_t a3 = 0; a3 < d.nodes(); ++a3) {
        if (a3 == a2) continue;
        double t3 = 0.0;
        for (std::size_t t = 0; t < bond.cols(); ++t) t3 += std::exp(bond(a3, t));
        EXPECT_NEAR(t3, 1.0, 1e-9);
      }
    }
  }
}

TEST_F(ModelTest, StopOnlyTraceIsOneFactor) {
  const auto s = state_of("[CH3:1][OH:2]", {1, 0});
  const Trace t{{Action::stop_action()}};
  EXPECT_EQ(model.trace_logprob(store, s, t, z, std::nullopt), model.step(store, s, z, std::nullopt).log_stop());
}

TEST_F(ModelTest, TraceLogprobFactorsOverSteps) {
  numcore::Rng rng(12);
  for (const auto& p : corpus_pairs(atoms, 20)) {
    const Trace t = p.sampler.sample(rng);
    // Product of probabilities from per-step distributions.
    TranslationState st = p.synthon;
    double product = 1.0;
    double running = 0.0;
    for (const auto& a : t.actions) {
      const auto d = model.step(store, st, z, std::nullopt);
      if (a.stop) {
        product *= std::exp(d.log_stop());
        break;
      }
      const auto second = numcore::softmax(std::vector<double>(d.log_second(a.a2)));
      const Tensor2 bond = d.log_bond(a.a2);
      const double p_step = std::exp(d.log_continue()) * std::exp(d.log_first()[a.a2]) * second[a.a3] *
                            std::exp(bond(a.a3, static_cast<std::size_t>(a.a4)));
      product *= p_step;
      const double before = running;
      running += std::log(p_step);
      EXPECT_LE(running, before);
      translate::apply_action(st, a, atoms);
    }
    const double direct = model.trace_logprob(store, p.synthon, t, z, std::nullopt);
    EXPECT_NEAR(direct, std::log(product), 1e-10);
    numcore::Tape tape(store);
    const double taped = tape.scalar(
        model.trace_logprob(tape, p.synthon, t, tape.constant(Tensor2::row_vector(z)), std::nullopt));
    EXPECT_NEAR(taped, direct, 1e-10);
    EXPECT_LE(direct, 0.0);
  }
}

TEST_F(ModelTest, MaskedActionGivesSentinelWithReason) {
  const auto s = state_of("[CH3:1][CH3:2]", {1, 1});
  std::string why;
  EXPECT_EQ(model.trace_logprob(store, s, Trace{{{false, 0, 0, BondType::Single}, Action::stop_action()}}, z,
                                std::nullopt, &why),
            kNegInf);
  EXPECT_NE(why.find("masked"), std::string::npos);
  EXPECT_EQ(model.trace_logprob(store, s, Trace{{{false, 0, 1, BondType::Single}}}, z, std::nullopt, &why),
            kNegInf);
  EXPECT_NE(why.find("stop"), std::string::npos);
}

TEST_F(ModelTest, ExactMarginalOfEmptyEditsIsTheStopTrace) {
  const auto s = state_of("[CH3:1][OH:2]", {1, 0});
  const auto e = translate::diff_edits(s, s.mol);
  EXPECT_NEAR(model.marginal_logprob_exact(store, s, e, z, std::nullopt),
              model.trace_logprob(store, s, Trace{{Action::stop_action()}}, z, std::nullopt), 1e-12);
}

TEST_F(ModelTest, ExactMarginalSumsBothOrderings) {
  const auto s = state_of("[CH3:1][CH3:2]", {1, 1});
  const auto g = molgraph::parse_smiles("F[CH2:1][CH2:2]Cl");
  const auto e = translate::diff_edits(s, g);
  const std::size_t n = 2;
  const auto f = static_cast<std::uint32_t>(n + *atoms.index_of({Element::F, 0, 1}));
  const auto cl = static_cast<std::uint32_t>(n + *atoms.index_of({Element::Cl, 0, 1}));
  const Trace first{{{false, 0, f, BondType::Single}, {false, 1, cl + 1, BondType::Single}, Action::stop_action()}};
  const Trace second{{{false, 1, cl, BondType::Single}, {false, 0, f + 1, BondType::Single}, Action::stop_action()}};
  const double l1 = model.trace_logprob(store, s, first, z, std::nullopt);
  const double l2 = model.trace_logprob(store, s, second, z, std::nullopt);
  ASSERT_GT(l1, kNegInf);
  ASSERT_GT(l2, kNegInf);
  const double expected = std::log(std::exp(l1) + std::exp(l2));
  EXPECT_NEAR(model.marginal_logprob_exact(store, s, e, z, std::nullopt), expected, 1e-10);
}

TEST_F(ModelTest, ExpectedLogLikelihoodBoundsTheMarginal) {
  numcore::Rng rng(13);
  std::normal_distribution<double> normal;
  for (const auto& p : corpus_pairs(atoms)) {
    if (p.edits.new_bonds.size() > 4) continue;
    const std::vector<double> zz = {normal(rng), normal(rng), normal(rng)};
    const auto& universe = p.sampler.universe();
    double mean = 0.0;
    for (const auto& t : universe) mean += model.trace_logprob(store, p.synthon, t, zz, std::nullopt);
    mean /= static_cast<double>(universe.size());
    const double bound = std::log(static_cast<double>(universe.size())) + mean;
    const double exact = model.marginal_logprob_exact(store, p.synthon, p.edits, zz, std::nullopt);
    const double bfs = model.log_marginal(store, p.synthon, universe, zz, std::nullopt);
    EXPECT_LE(bound, bfs + 1e-9);
    EXPECT_LE(bfs, exact + 1e-9);
  }
}

// ---- posterior and ELBO ----

TEST_F(ModelTest, ZeroHeadsGiveTheStandardNormal) {
  zero_final_layer(store, model.mu_head());
  zero_final_layer(store, model.logvar_head());
  const auto pair = corpus_pairs(atoms, 1).front();
  const auto q = model.posterior(store, pair.synthon, pair.reactant);
  ASSERT_EQ(q.mu.size(), 3U);
  for (double m : q.mu) EXPECT_EQ(m, 0.0);
  for (double lv : q.logvar) EXPECT_EQ(lv, 0.0);
}

TEST(Posterior, DefaultLatentWidthIsTen) { EXPECT_EQ(translate::TranslateConfig{}.latent, 10U); }

TEST_F(ModelTest, ReparameterizedSamplesCentreOnTheMean) {
  const auto pair = corpus_pairs(atoms, 1).front();
  const auto q = model.posterior(store, pair.synthon, pair.reactant);
  numcore::Rng rng(14);
  std::normal_distribution<double> normal;
  constexpr int kDraws = 100000;
  std::vector<double> sum(q.mu.size(), 0.0);
  for (int i = 0; i < kDraws; ++i) {
    numcore::Tape tape(store);
    std::vector<double> eps(q.mu.size());
    for (double& e : eps) e = normal(rng);
    const auto zv = tape.gaussian_sample(tape.constant(Tensor2::row_vector(q.mu)),
                                         tape.constant(Tensor2::row_vector(q.logvar)), eps);
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += tape.value(zv)(0, j);
  }
  for (std::size_t j = 0; j < sum.size(); ++j) {
    const double se = std::exp(q.logvar[j] / 2) / std::sqrt(static_cast<double>(kDraws));
    EXPECT_NEAR(sum[j] / kDraws, q.mu[j], 3 * se);
  }
}

TEST(Posterior, KlClosedFormCases) {
  const ParameterStore store;
  const auto kl = [&](std::vector<double> mu, std::vector<double> logvar) {
    numcore::Tape tape(store);
    return tape.scalar(tape.kl_standard_normal(tape.constant(Tensor2::row_vector(mu)),
                                               tape.constant(Tensor2::row_vector(logvar))));
  };
  EXPECT_EQ(kl({0.0, 0.0}, {0.0, 0.0}), 0.0);
  EXPECT_NEAR(kl({1.0}, {0.0}), 0.5, 1e-15);
  numcore::Rng rng(15);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) EXPECT_GE(kl({u(rng), u(rng)}, {u(rng), u(rng)}), 0.0);
}

TEST_F(ModelTest, ElboWithPriorPosteriorIsNegativeTraceLogprob) {
  zero_final_layer(store, model.mu_head());
  zero_final_layer(store, model.logvar_head());
  const auto s = state_of("[CH3:1][CH3:2]", {0, 1});
  const auto g = molgraph::parse_smiles("[CH3:1][CH2:2]Br");
  const auto e = translate::diff_edits(s, g);
  const auto traces = translate::bfs_traces(s, e, atoms);
  ASSERT_EQ(traces->size(), 1U);
  numcore::Tape tape(store);
  const double loss = tape.scalar(model.elbo_loss(tape, s, g, *traces, z, std::nullopt));
  EXPECT_NEAR(loss, -model.trace_logprob(store, s, traces->front(), z, std::nullopt), 1e-12);
}

TEST(Elbo, GradientsMatchFiniteDifferences) {
  const auto elements = molgraph::ElementVocabulary::parse("C,O,F");
  const AtomVocabulary atoms({{Element::F, 0, 1}, {Element::O, 0, 2}});
  ParameterStore store;
  numcore::Rng rng(16);
  auto cfg = small_config(true);
  cfg.encoder = {2, 4};
  cfg.latent = 2;
  const translate::TranslateModel model(store, elements, atoms, cfg, rng);
  const auto s = state_of("[CH3:1][CH3:2]", {0, 1});
  const auto g = molgraph::parse_smiles("[CH3:1][CH2:2]F");
  const auto traces = *translate::bfs_traces(s, translate::diff_edits(s, g), atoms);
  const std::vector<double> eps = {0.4, -0.7};
  const auto result = retrograph::testing::check_gradients(store, [&](numcore::Tape& tape) {
    return model.elbo_loss(tape, s, g, traces, eps, 3);
  });
  EXPECT_GT(result.checked, 100U);
  EXPECT_LT(result.max_rel_error, 1e-4) << result.worst;
}

TEST_F(ModelTest, ClassConditioningIsChecked) {
  const auto s = state_of("[CH4:1]", {1});
  EXPECT_THROW(model.step(store, s, z, 2), std::invalid_argument);
  ParameterStore cs;
  numcore::Rng rng(17);
  const translate::TranslateModel conditioned(cs, elements, atoms, small_config(true), rng);
  EXPECT_THROW(conditioned.step(cs, s, z, std::nullopt), std::invalid_argument);
  EXPECT_THROW(conditioned.step(cs, s, z, 11), std::invalid_argument);
  EXPECT_NO_THROW(conditioned.step(cs, s, z, 10));
}

// ---- beam search ----

TEST_F(ModelTest, BeamWidthOneIsGreedy) {
  for (const auto& p : corpus_pairs(atoms, 6)) {
    TranslationState st = p.synthon;
    double score = 0.0;
    bool stopped = false;
    for (std::size_t step = 0; step < 4 && !stopped; ++step) {
      const auto d = model.step(store, st, z, std::nullopt);
      std::optional<std::pair<double, Action>> best;
      const auto offer = [&](double lp, const Action& a) {
        if (!best || lp > best->first || (lp == best->first && a < best->second)) best = {lp, a};
      };
      if (translate::action_valid(st, Action::stop_action(), atoms)) offer(d.log_stop(), Action::stop_action());
      for (std::uint32_t a2 = 0; a2 < d.atoms(); ++a2) {
        for (std::uint32_t a3 = 0; a3 < d.nodes(); ++a3) {
          for (int t = 0; t < molgraph::kBondTypes; ++t) {
            const Action a{false, a2, a3, static_cast<BondType>(t)};
            if (translate::action_valid(st, a, atoms)) offer(d.log_prob(a), a);
          }
        }
      }
      ASSERT_TRUE(best.has_value());
      score += best->first;
      if (best->second.stop) {
        stopped = true;
      } else {
        translate::apply_action(st, best->second, atoms);
      }
    }
    const auto out = translate::beam_generate(model, store, p.synthon, {1, 4}, z, std::nullopt);
    ASSERT_EQ(out.size(), 1U);
    EXPECT_EQ(out[0].canonical, molgraph::write_canonical(st.mol));
    EXPECT_NEAR(out[0].logprob, score, 1e-9);
    EXPECT_EQ(out[0].stopped, stopped);
  }
}

TEST(Beam, LargeBeamMatchesExhaustiveDecode) {
  const auto elements = molgraph::ElementVocabulary::parse("C,O,F");
  const AtomVocabulary atoms({{Element::F, 0, 1}, {Element::O, 0, 2}});
  ParameterStore store;
  numcore::Rng rng(18);
  const translate::TranslateModel model(store, elements, atoms, small_config(), rng);
  const std::vector<double> z = {0.1, 0.2, -0.3};
  for (const auto& s : {state_of("[CH4:1]", {1}), state_of("[CH3:1][OH:2]", {1, 1})}) {
    const auto oracle = retrograph::testing::exhaustive_decode(model, store, s, 2, z, std::nullopt);
    EXPECT_GT(oracle.size(), 10U);
    const auto beam = translate::beam_generate(model, store, s, {100000, 2}, z, std::nullopt);
    ASSERT_EQ(beam.size(), oracle.size());
    for (std::size_t i = 0; i < beam.size(); ++i) {
      EXPECT_EQ(beam[i].canonical, oracle[i].first) << i;
      EXPECT_NEAR(beam[i].logprob, oracle[i].second, 1e-9) << i;
    }
  }
}

TEST_F(ModelTest, DecodedMoleculesAreValidAndRanked) {
  for (const auto& p : corpus_pairs(atoms)) {
    const auto out = translate::beam_generate(model, store, p.synthon, {3, 5}, z, std::nullopt);
    EXPECT_LE(out.size(), 3U);
    for (std::size_t i = 0; i < out.size(); ++i) {
      EXPECT_TRUE(molgraph::valence_ok(out[i].state.mol)) << out[i].canonical;
      EXPECT_NO_THROW(molgraph::parse_smiles(out[i].canonical)) << out[i].canonical;
      if (i > 0) {
        EXPECT_GE(out[i - 1].logprob, out[i].logprob);
      }
    }
  }
}

TEST(Beam, RejectsDegenerateOptions) {
  const auto elements = molgraph::ElementVocabulary::parse("C");
  const AtomVocabulary atoms({{Element::C, 0, 4}});
  ParameterStore store;
  numcore::Rng rng(19);
  const translate::TranslateModel model(store, elements, atoms, small_config(), rng);
  const auto s = state_of("C");
  const std::vector<double> z(3, 0.0);
  EXPECT_THROW(translate::beam_generate(model, store, s, {0, 2}, z, std::nullopt), std::invalid_argument);
  EXPECT_THROW(translate::beam_generate(model, store, s, {2, 0}, z, std::nullopt), std::invalid_argument);
}

// ---- training ----

TEST(Pairs, SynthonsAreMatchedToTheirReactants) {
  const auto rxn = molgraph::parse_reaction("[CH3:1]Br.[OH:2][CH2:3][CH3:4]>>[CH3:1][O:2][CH2:3][CH3:4]", 1);
  const AtomVocabulary atoms(translate::new_atom_types(rxn));
  ASSERT_EQ(atoms.size(), 1U);
  EXPECT_EQ(atoms[0], (VocabAtom{Element::Br, 0, 1}));
  const auto pairs = translate::make_translation_pairs(rxn, center::derive_labels(rxn).positives(), atoms, true);
  ASSERT_EQ(pairs.size(), 2U);
  EXPECT_EQ(pairs[0].edits.new_bonds.size(), 1U);
  EXPECT_TRUE(pairs[1].edits.empty());
  EXPECT_EQ(pairs[0].reaction_class, 1);
}

TEST(Pairs, WrongCentersAreRejected) {
  const auto rxn = molgraph::parse_reaction("[CH3:1]Br.[OH:2][CH2:3][CH3:4]>>[CH3:1][O:2][CH2:3][CH3:4]", 1);
  const AtomVocabulary atoms({{Element::Br, 0, 1}});
  const std::vector<molgraph::AtomPair> wrong = {{1, 2}};
  EXPECT_THROW(translate::make_translation_pairs(rxn, wrong, atoms, false), translate::EditError);
}

TEST(Train, ParallelBatchMatchesSerialBitForBit) {
  const auto atoms = corpus_atoms();
  const auto pairs = corpus_pairs(atoms, 10);
  ParameterStore store;
  numcore::Rng rng(20);
  const translate::TranslateModel model(store, corpus_elements(), atoms, small_config(), rng);
  auto fn = [&](std::size_t i, numcore::Gradients& g) {
    numcore::Rng r(i);
    const auto eps = translate::sample_prior(3, r);
    const std::vector<Trace> t = {pairs[i].sampler.sample(r)};
    numcore::Tape tape(store);
    const auto l = model.elbo_loss(tape, pairs[i].synthon, pairs[i].reactant, t, eps, std::nullopt);
    tape.backward(l, g);
    return tape.scalar(l);
  };
  numcore::Gradients a(store);
  numcore::Gradients b(store);
  EXPECT_EQ(numcore::accumulate_batch(store, pairs.size(), fn, a),
            numcore::accumulate_batch_serial(store, pairs.size(), fn, b));
  for (std::size_t i = 0; i < store.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Train, LossFallsOnTwentyPairs) {
  const auto atoms = corpus_atoms();
  auto pairs = corpus_pairs(atoms, 12);
  pairs.resize(20);
  ParameterStore store;
  numcore::Rng rng(21);
  auto cfg = small_config();
  cfg.encoder = {3, 16};
  const translate::TranslateModel model(store, corpus_elements(), atoms, cfg, rng);
  numcore::Adam adam(store, {.learning_rate = 1e-3});
  center::TrainOptions opt;
  opt.epochs = 60;
  opt.batch_size = 4;
  const auto history = translate::train_translate(model, store, adam, pairs, opt);
  ASSERT_EQ(history.size(), 60U);
  double head = 0.0;
  double tail = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    head += history[i].loss;
    tail += history[history.size() - 1 - i].loss;
  }
  EXPECT_LT(tail, 0.5 * head);
}

TEST(Train, SameSeedSameParameters) {
  const auto atoms = corpus_atoms();
  const auto pairs = corpus_pairs(atoms, 4);
  const auto run = [&]() {
    ParameterStore store;
    numcore::Rng rng(22);
    const translate::TranslateModel model(store, corpus_elements(), atoms, small_config(), rng);
    numcore::Adam adam(store, {.learning_rate = 1e-3});
    center::TrainOptions opt;
    opt.epochs = 3;
    opt.batch_size = 3;
    translate::train_translate(model, store, adam, pairs, opt);
    return store;
  };
  const ParameterStore a = run();
  const ParameterStore b = run();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].value, b[i].value);
}

}  // namespace
