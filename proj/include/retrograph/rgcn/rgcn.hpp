//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "retrograph/molgraph/molecule.hpp"
#include "retrograph/numcore/params.hpp"
#include "retrograph/numcore/tape.hpp"
#include "retrograph/numcore/tensor.hpp"

namespace retrograph::rgcn {

using numcore::Tape;
using numcore::Var;

/// One neighbour list per bond type.
struct RelationalGraph {
  std::size_t nodes = 0;
  std::array<numcore::Adjacency, molgraph::kBondTypes> by_type;
};

/// Per-type adjacency of `mol`, followed by `extra_nodes` isolated nodes.
RelationalGraph relational_graph(const molgraph::Molecule& mol, std::size_t extra_nodes = 0);

struct RgcnConfig {
  std::size_t layers = 3;
  std::size_t width = 64;
};

/// Relational graph convolution:
///   H^l = sum_i ReLU((A_i + I) H^{l-1} W_i^l),  H^0 = X,
/// summed over bond types, without bias or degree normalisation.
class Rgcn {
 public:
  Rgcn() = default;
  Rgcn(numcore::ParameterStore& store, const std::string& name, std::size_t in_width,
       const RgcnConfig& config, numcore::Rng& rng);

  /// Node embeddings (n x width). Throws ShapeError on a feature width mismatch.
  Var encode(Tape& tape, Var features, const RelationalGraph& graph) const;
  numcore::Tensor2 encode(const numcore::ParameterStore& store, const numcore::Tensor2& features,
                          const RelationalGraph& graph) const;

  std::size_t in_width() const { return in_width_; }
  std::size_t width() const { return config_.width; }
  std::size_t layers() const { return config_.layers; }
  numcore::ParamId weight(std::size_t layer, std::size_t type) const;

 private:
  std::size_t in_width_ = 0;
  RgcnConfig config_;
  std::vector<numcore::ParamId> weights_;  // layer-major, kBondTypes per layer
};

/// Graph embedding: column sum of the node embeddings.
Var readout(Tape& tape, Var nodes);
numcore::Tensor2 readout(const numcore::Tensor2& nodes);

}  // namespace retrograph::rgcn
