//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/rgcn/rgcn.hpp"

namespace retrograph::rgcn {

using numcore::ShapeError;
using numcore::Tensor2;

RelationalGraph relational_graph(const molgraph::Molecule& mol, std::size_t extra_nodes) {
  RelationalGraph g;
  g.nodes = mol.atom_count() + extra_nodes;
  for (int t = 0; t < molgraph::kBondTypes; ++t) {
    auto& adj = g.by_type[t];
    adj.offsets.assign(1, 0);
    for (std::uint32_t v = 0; v < g.nodes; ++v) {
      if (v < mol.atom_count()) {
        for (const auto& nb : mol.neighbors(v)) {
          if (static_cast<int>(nb.type) == t) adj.targets.push_back(nb.atom);
        }
      }
      adj.offsets.push_back(static_cast<std::uint32_t>(adj.targets.size()));
    }
  }
  return g;
}

Rgcn::Rgcn(numcore::ParameterStore& store, const std::string& name, std::size_t in_width,
           const RgcnConfig& config, numcore::Rng& rng)
    : in_width_(in_width), config_(config) {
  if (config.layers == 0 || config.width == 0) throw ShapeError("rgcn needs layers and width");
  for (std::size_t l = 0; l < config.layers; ++l) {
    const std::size_t in = l == 0 ? in_width : config.width;
    for (int t = 0; t < molgraph::kBondTypes; ++t) {
      weights_.push_back(store.add_uniform(
          name + ".l" + std::to_string(l) + ".w" + std::to_string(t), in, config.width, in, rng));
    }
  }
}

numcore::ParamId Rgcn::weight(std::size_t layer, std::size_t type) const {
  return weights_.at(layer * molgraph::kBondTypes + type);
}

Var Rgcn::encode(Tape& tape, Var features, const RelationalGraph& graph) const {
  const auto& x = tape.value(features);
  if (x.cols() != in_width_) {
    throw ShapeError("rgcn expects feature width " + std::to_string(in_width_) + ", got " +
                     std::to_string(x.cols()));
  }
  if (x.rows() != graph.nodes || x.rows() == 0) {
    throw ShapeError("feature rows do not match graph nodes");
  }
  Var h = features;
  for (std::size_t l = 0; l < config_.layers; ++l) {
    Var sum;
    for (int t = 0; t < molgraph::kBondTypes; ++t) {
      Var message = tape.relu(
          tape.matmul(tape.propagate(h, graph.by_type[t]), tape.param(weight(l, t))));
      sum = sum.valid() ? tape.add(sum, message) : message;
    }
    h = sum;
  }
  return h;
}

Tensor2 Rgcn::encode(const numcore::ParameterStore& store, const Tensor2& features,
                     const RelationalGraph& graph) const {
  Tape tape(store);
  return tape.value(encode(tape, tape.constant(features), graph));
}

Var readout(Tape& tape, Var nodes) { return tape.sum_rows(nodes); }

Tensor2 readout(const Tensor2& nodes) {
  Tensor2 out(1, nodes.cols());
  for (std::size_t r = 0; r < nodes.rows(); ++r) {
    for (std::size_t c = 0; c < nodes.cols(); ++c) out(0, c) += nodes(r, c);
  }
  return out;
}

}  // namespace retrograph::rgcn
