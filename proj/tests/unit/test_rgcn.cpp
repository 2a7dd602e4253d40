//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "../support/corpus.hpp"
#include "../support/gradcheck.hpp"
#include "retrograph/molgraph/features.hpp"
#include "retrograph/molgraph/reaction.hpp"
#include "retrograph/molgraph/smiles.hpp"
#include "retrograph/numcore/kernels.hpp"
#include "retrograph/rgcn/rgcn.hpp"

namespace {

using namespace retrograph;
using molgraph::ElementVocabulary;
using molgraph::Molecule;
using numcore::ParameterStore;
using numcore::Tensor2;

std::vector<Molecule> corpus_molecules() {
  std::vector<Molecule> out;
  for (const auto& line : retrograph::testing::read_corpus()) {
    const auto r = molgraph::parse_reaction(line.reaction);
    out.push_back(r.product);
    for (const auto& m : r.reactants) out.push_back(m);
  }
  return out;
}

struct Fixture {
  ElementVocabulary vocab;
  ParameterStore store;
  rgcn::Rgcn net;

  explicit Fixture(rgcn::RgcnConfig cfg = {3, 16}, std::uint64_t seed = 3)
      : vocab(ElementVocabulary::from_molecules(corpus_molecules())) {
    numcore::Rng rng(seed);
    net = rgcn::Rgcn(store, "enc", molgraph::feature_width(vocab), cfg, rng);
  }

  Tensor2 encode(const Molecule& m) const {
    return net.encode(store, molgraph::node_features(m, vocab), rgcn::relational_graph(m));
  }
};

TEST(Rgcn, IsolatedAtomUsesSelfLoopsOnly) {
  Fixture f({1, 8});
  const auto m = molgraph::parse_smiles("C");
  const Tensor2 x = molgraph::node_features(m, f.vocab);
  const Tensor2 h = f.encode(m);
  // Oracle: sum over types of ReLU(X W_i).
  Tensor2 expected(1, 8);
  for (int t = 0; t < molgraph::kBondTypes; ++t) {
    Tensor2 xw(1, 8);
    numcore::kernels::matmul_serial(x, f.store[f.net.weight(0, t)].value, xw);
    for (std::size_t c = 0; c < 8; ++c) expected(0, c) += std::max(0.0, xw(0, c));
  }
  for (std::size_t c = 0; c < 8; ++c) EXPECT_NEAR(h(0, c), expected(0, c), 1e-12);
}

TEST(Rgcn, ZeroWeightsGiveZeroEmbeddings) {
  Fixture f;
  for (auto& p : f.store) p.value.fill(0.0);
  const Tensor2 h = f.encode(molgraph::parse_smiles("CC(=O)Oc1ccccc1"));
  for (double v : h.data()) EXPECT_EQ(v, 0.0);
}

TEST(Rgcn, FeatureWidthMismatchRejected) {
  Fixture f;
  const auto m = molgraph::parse_smiles("CC");
  EXPECT_THROW(f.net.encode(f.store, Tensor2(2, 3), rgcn::relational_graph(m)), numcore::ShapeError);
}

TEST(Rgcn, PermutationEquivariance) {
  Fixture f;
  std::mt19937_64 rng(5);
  const auto mols = corpus_molecules();
  ASSERT_GE(mols.size(), 100U);
  for (const auto& m : mols) {
    std::vector<std::uint32_t> p(m.atom_count());
    std::iota(p.begin(), p.end(), 0U);
    std::shuffle(p.begin(), p.end(), rng);
    const Tensor2 h = f.encode(m);
    const Tensor2 hp = f.encode(molgraph::permute(m, p));
    double max_diff = 0.0;
    for (std::uint32_t i = 0; i < m.atom_count(); ++i) {
      for (std::size_t c = 0; c < h.cols(); ++c) {
        max_diff = std::max(max_diff, std::abs(h(i, c) - hp(p[i], c)));
      }
    }
    EXPECT_LT(max_diff, 1e-9);
    const Tensor2 g = rgcn::readout(h);
    const Tensor2 gp = rgcn::readout(hp);
    for (std::size_t c = 0; c < g.cols(); ++c) EXPECT_NEAR(g(0, c), gp(0, c), 1e-9);
  }
}

TEST(Readout, SingleNodeIsIdentity) {
  const Tensor2 h = Tensor2::from_rows({{1.5, -2.0, 3.0}});
  EXPECT_EQ(rgcn::readout(h), h);
}

TEST(Readout, TwoIdenticalNodesDouble) {
  const Tensor2 h = Tensor2::from_rows({{1.0, 2.0}, {1.0, 2.0}});
  EXPECT_EQ(rgcn::readout(h), Tensor2::from_rows({{2.0, 4.0}}));
}

TEST(Readout, MatchesColumnSumOnTape) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  Tensor2 h(7, 5);
  for (double& v : h.data()) v = normal(rng);
  ParameterStore store;
  numcore::Tape tape(store);
  const Tensor2 got = tape.value(rgcn::readout(tape, tape.constant(h)));
  for (std::size_t c = 0; c < 5; ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < 7; ++r) s += h(r, c);
    EXPECT_NEAR(got(0, c), s, 1e-12);
  }
  EXPECT_EQ(rgcn::readout(h), got);
}

TEST(Rgcn, LocalityOnPathGraph) {
  const std::size_t layers = 3;
  Fixture f({layers, 8});
  // Atom 0 of a 7-atom chain; atoms more than `layers` hops away are edited.
  const auto base = molgraph::parse_smiles("CCCCCCC");
  const Tensor2 h0 = f.encode(base);
  for (std::uint32_t far = layers + 1; far < 7; ++far) {
    Molecule edited = base;
    auto rec = edited.atom(far);
    rec.element = molgraph::Element::N;
    rec.hydrogens = 1;
    edited.set_atom(far, rec);
    const Tensor2 h1 = f.encode(edited);
    for (std::size_t c = 0; c < h0.cols(); ++c) EXPECT_EQ(h0(0, c), h1(0, c)) << far;
  }
  // An edit within reach changes the embedding.
  Molecule near = base;
  auto rec = near.atom(layers);
  rec.element = molgraph::Element::O;
  rec.hydrogens = 2;
  near.set_atom(layers, rec);
  const Tensor2 h2 = f.encode(near);
  double diff = 0.0;
  for (std::size_t c = 0; c < h0.cols(); ++c) diff += std::abs(h0(0, c) - h2(0, c));
  EXPECT_GT(diff, 0.0);
}

TEST(Rgcn, GradientsMatchFiniteDifferences) {
  Fixture f({2, 6}, 17);
  const auto m = molgraph::parse_smiles("c1ccccc1C(=O)OC#N");
  const Tensor2 x = molgraph::node_features(m, f.vocab);
  const auto graph = rgcn::relational_graph(m);
  numcore::Rng rng(23);
  std::normal_distribution<double> normal;
  Tensor2 probe(6, 1);
  for (double& v : probe.data()) v = normal(rng);
  auto loss = [&](numcore::Tape& tape) {
    const auto g = rgcn::readout(tape, f.net.encode(tape, tape.constant(x), graph));
    return tape.sum_all(tape.sigmoid(tape.matmul(g, tape.constant(probe))));
  };
  const auto result = retrograph::testing::check_gradients(f.store, loss, 1e-5, 1e-6);
  EXPECT_GT(result.checked, 0U);
  EXPECT_LT(result.max_rel_error, 1e-4) << result.worst;
}

TEST(Rgcn, ExtraNodesAreIsolated) {
  const auto m = molgraph::parse_smiles("CO");
  const auto g = rgcn::relational_graph(m, 3);
  EXPECT_EQ(g.nodes, 5U);
  for (const auto& adj : g.by_type) {
    ASSERT_EQ(adj.offsets.size(), 6U);
    for (std::size_t v = 2; v < 5; ++v) EXPECT_EQ(adj.offsets[v], adj.offsets[v + 1]);
  }
}

}  // namespace
