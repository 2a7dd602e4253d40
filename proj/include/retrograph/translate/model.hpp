//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "retrograph/molgraph/features.hpp"
#include "retrograph/numcore/feedforward.hpp"
#include "retrograph/rgcn/rgcn.hpp"
#include "retrograph/translate/traces.hpp"

namespace retrograph::translate {

using numcore::Tape;
using numcore::Tensor2;
using numcore::Var;

struct TranslateConfig {
  rgcn::RgcnConfig encoder;
  std::size_t latent = 10;
  bool class_conditioned = false;
  std::size_t class_width = 32;
  std::size_t mc_traces = 1;
};

inline constexpr double kLogVarMin = -10.0;
inline constexpr double kLogVarMax = 10.0;

/// Encoder input for a state: its atoms (with the attachment flag in the last
/// column) followed by one isolated node per vocabulary atom.
struct PreparedState {
  std::size_t atoms = 0;
  Tensor2 features;
  rgcn::RelationalGraph graph;
};

PreparedState prepare_state(const TranslationState& state, const molgraph::ElementVocabulary& elements,
                            const AtomVocabulary& atoms, bool with_vocabulary = true);

class TranslateModel;

/// Action distributions at one state, in log space. Masked entries are -inf.
/// Index layout for node vectors: state atoms, then vocabulary slots.
class StepDistributions {
 public:
  double log_stop() const { return log_stop_; }
  double log_continue() const { return log_continue_; }
  const std::vector<double>& log_first() const { return log_first_; }
  std::vector<double> log_second(std::uint32_t a2) const;
  /// (atoms + m) x kBondTypes; row a3 holds log p(a4 | a2, a3). Row a2 is -inf.
  Tensor2 log_bond(std::uint32_t a2) const;
  /// Full log-probability of one action.
  double log_prob(const Action& action) const;

  std::size_t atoms() const { return atoms_; }
  std::size_t nodes() const { return nodes_; }

 private:
  friend class TranslateModel;

  const TranslateModel* model_ = nullptr;
  const numcore::ParameterStore* store_ = nullptr;
  std::size_t atoms_ = 0;
  std::size_t nodes_ = 0;
  Tensor2 h_;
  std::vector<double> ctx_;
  double log_stop_ = 0.0;
  double log_continue_ = 0.0;
  std::vector<double> log_first_;
  Tensor2 second_nodes_;  // h_v part of the m_s first layer
  Tensor2 bond_nodes_;    // h_a3 part of the m_e first layer
};

struct PosteriorValue {
  std::vector<double> mu;
  std::vector<double> logvar;
};

struct PosteriorVars {
  Var mu;
  Var logvar;
};

class TranslateModel {
 public:
  TranslateModel() = default;
  TranslateModel(numcore::ParameterStore& store, const molgraph::ElementVocabulary& elements,
                 const AtomVocabulary& atoms, const TranslateConfig& config, numcore::Rng& rng);

  StepDistributions step(const numcore::ParameterStore& store, const TranslationState& state,
                         std::span<const double> z, std::optional<int> reaction_class) const;

  /// Sum of per-step log-probabilities. Returns -inf, with a reason in
  /// `diagnostic` when given, for a trace that breaks a mask or cannot apply.
  double trace_logprob(const numcore::ParameterStore& store, const TranslationState& start,
                       const Trace& trace, std::span<const double> z,
                       std::optional<int> reaction_class, std::string* diagnostic = nullptr) const;

  Var trace_logprob(Tape& tape, const TranslationState& start, const Trace& trace, Var z,
                    std::optional<int> reaction_class) const;

  /// log sum_t p(t) over a set of traces, sharing work across common prefixes.
  double log_marginal(const numcore::ParameterStore& store, const TranslationState& start,
                      std::span<const Trace> traces, std::span<const double> z,
                      std::optional<int> reaction_class) const;

  /// Marginal over every executable ordering of the edits (small edit sets only).
  double marginal_logprob_exact(const numcore::ParameterStore& store, const TranslationState& start,
                                const EditSet& edits, std::span<const double> z,
                                std::optional<int> reaction_class) const;

  PosteriorVars posterior(Tape& tape, const TranslationState& synthon,
                          const molgraph::Molecule& reactant) const;
  PosteriorValue posterior(const numcore::ParameterStore& store, const TranslationState& synthon,
                           const molgraph::Molecule& reactant) const;

  /// -mean_j log p(t_j | z, S) + KL(q || N(0, I)) with z = mu + sigma * eps.
  /// `traces` are the sampled traces and `eps` the standard-normal draw.
  Var elbo_loss(Tape& tape, const TranslationState& synthon, const molgraph::Molecule& reactant,
                std::span<const Trace> traces, std::span<const double> eps,
                std::optional<int> reaction_class) const;

  const TranslateConfig& config() const { return config_; }
  const molgraph::ElementVocabulary& elements() const { return elements_; }
  const AtomVocabulary& atoms() const { return atoms_; }
  const rgcn::Rgcn& encoder() const { return encoder_; }
  const numcore::FeedForward& stop_head() const { return m_t_; }
  const numcore::FeedForward& first_head() const { return m_f_; }
  const numcore::FeedForward& second_head() const { return m_s_; }
  const numcore::FeedForward& bond_head() const { return m_e_; }
  const numcore::FeedForward& mu_head() const { return m_mu_; }
  const numcore::FeedForward& logvar_head() const { return m_sigma_; }
  std::size_t context_width() const;

 private:
  friend class StepDistributions;

  void check_class(std::optional<int> reaction_class) const;
  Var context(Tape& tape, Var h, std::size_t atoms, Var z, std::optional<int> reaction_class) const;
  double log_marginal_node(const numcore::ParameterStore& store, const TranslationState& state,
                           std::span<const Trace> traces, std::size_t depth,
                           std::span<const double> z, std::optional<int> reaction_class) const;

  TranslateConfig config_;
  molgraph::ElementVocabulary elements_;
  AtomVocabulary atoms_;
  rgcn::Rgcn encoder_;
  numcore::FeedForward m_t_;
  numcore::FeedForward m_f_;
  numcore::FeedForward m_s_;
  numcore::FeedForward m_e_;
  numcore::FeedForward m_mu_;
  numcore::FeedForward m_sigma_;
  std::optional<numcore::ParamId> class_table_;
};

}  // namespace retrograph::translate
