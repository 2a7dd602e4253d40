//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/translate/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "retrograph/molgraph/reaction.hpp"
#include "retrograph/numcore/functions.hpp"
#include "retrograph/numcore/kernels.hpp"

namespace retrograph::translate {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// h (r x k) times rows [offset, offset + k) of w.
Tensor2 rows_times(const Tensor2& h, const Tensor2& w, std::size_t offset) {
  Tensor2 slice(h.cols(), w.cols());
  for (std::size_t i = 0; i < h.cols(); ++i) {
    std::copy(w.row(offset + i).begin(), w.row(offset + i).end(), slice.row(i).begin());
  }
  Tensor2 out(h.rows(), w.cols());
  numcore::kernels::matmul(h, slice, out);
  return out;
}

void add_vec_times(std::span<const double> x, const Tensor2& w, std::size_t offset,
                   std::span<double> acc) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    const auto wr = w.row(offset + i);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += x[i] * wr[j];
  }
}

// Runs the layers after the first, given first-layer pre-activations.
Tensor2 finish(const numcore::ParameterStore& store, const numcore::FeedForward& ff, Tensor2 pre) {
  Tensor2 x = std::move(pre);
  for (std::size_t l = 1; l < ff.layers(); ++l) {
    for (double& v : x.data()) v = v > 0.0 ? v : 0.0;
    const Tensor2& w = store[ff.weight(l)].value;
    const Tensor2& b = store[ff.bias(l)].value;
    Tensor2 y(x.rows(), w.cols());
    numcore::kernels::matmul(x, w, y);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      for (std::size_t c = 0; c < y.cols(); ++c) y(r, c) += b(0, c);
    }
    x = std::move(y);
  }
  return x;
}

// First-layer pre-activation of `ff` for each row of `nodes` plus a shared row.
Tensor2 with_shared_row(Tensor2 nodes, std::span<const double> shared) {
  for (std::size_t r = 0; r < nodes.rows(); ++r) {
    auto row = nodes.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += shared[c];
  }
  return nodes;
}

std::vector<double> bias_row(const numcore::ParameterStore& store, const numcore::FeedForward& ff) {
  const auto b = store[ff.bias(0)].value.data();
  return {b.begin(), b.end()};
}

std::vector<std::uint32_t> first_rows(std::size_t n) {
  std::vector<std::uint32_t> rows(n);
  std::iota(rows.begin(), rows.end(), 0U);
  return rows;
}

TranslationState plain_state(const molgraph::Molecule& mol) {
  return TranslationState{mol, std::vector<char>(mol.atom_count(), 0)};
}

}  // namespace

PreparedState prepare_state(const TranslationState& state, const molgraph::ElementVocabulary& elements,
                            const AtomVocabulary& atoms, bool with_vocabulary) {
  PreparedState out;
  out.atoms = state.atom_count();
  const std::size_t extra = with_vocabulary ? atoms.size() : 0;
  const std::size_t fw = molgraph::feature_width(elements);
  out.features = Tensor2(out.atoms + extra, fw + 1);
  for (std::uint32_t i = 0; i < out.atoms; ++i) {
    molgraph::encode_atom(state.mol.atom(i), elements, out.features.row(i).first(fw));
    out.features(i, fw) = state.attachment.at(i) ? 1.0 : 0.0;
  }
  for (std::size_t v = 0; v < extra; ++v) {
    const VocabAtom& a = atoms[v];
    molgraph::encode_atom({a.element, a.charge, a.hydrogens, 0}, elements,
                          out.features.row(out.atoms + v).first(fw));
  }
  out.graph = rgcn::relational_graph(state.mol, extra);
  return out;
}

std::vector<double> StepDistributions::log_second(std::uint32_t a2) const {
  const numcore::FeedForward& ff = model_->m_s_;
  const Tensor2& w = (*store_)[ff.weight(0)].value;
  const std::size_t k = h_.cols();
  auto shared = bias_row(*store_, ff);
  add_vec_times(h_.row(a2), w, k, shared);
  add_vec_times(ctx_, w, 2 * k, shared);
  const Tensor2 logits = finish(*store_, ff, with_shared_row(second_nodes_, shared));
  std::vector<char> mask(nodes_, 1);
  mask[a2] = 0;
  return numcore::log_softmax(logits.data(), mask);
}

Tensor2 StepDistributions::log_bond(std::uint32_t a2) const {
  const numcore::FeedForward& ff = model_->m_e_;
  const Tensor2& w = (*store_)[ff.weight(0)].value;
  const std::size_t k = h_.cols();
  auto shared = bias_row(*store_, ff);
  add_vec_times(h_.row(a2), w, 0, shared);
  add_vec_times(ctx_, w, 2 * k, shared);
  Tensor2 logits = finish(*store_, ff, with_shared_row(bond_nodes_, shared));
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    if (r == a2) {
      std::fill(row.begin(), row.end(), kNegInf);
      continue;
    }
    const auto lp = numcore::log_softmax(row);
    std::copy(lp.begin(), lp.end(), row.begin());
  }
  return logits;
}

double StepDistributions::log_prob(const Action& action) const {
  if (action.stop) return log_stop_;
  if (action.a2 >= atoms_ || action.a3 >= nodes_ || action.a3 == action.a2) return kNegInf;
  return log_continue_ + log_first_[action.a2] + log_second(action.a2)[action.a3] +
         log_bond(action.a2)(action.a3, static_cast<std::size_t>(action.a4));
}

TranslateModel::TranslateModel(numcore::ParameterStore& store, const molgraph::ElementVocabulary& elements,
                               const AtomVocabulary& atoms, const TranslateConfig& config,
                               numcore::Rng& rng)
    : config_(config), elements_(elements), atoms_(atoms) {
  if (config.latent == 0) throw std::invalid_argument("latent width must be positive");
  encoder_ = rgcn::Rgcn(store, "translate.encoder", molgraph::feature_width(elements) + 1,
                        config.encoder, rng);
  const std::size_t k = config.encoder.width;
  if (config.class_conditioned) {
    class_table_ = store.add_uniform("translate.class_table", molgraph::kReactionClasses,
                                     config.class_width, config.class_width, rng);
  }
  const std::size_t c = context_width();
  m_t_ = numcore::FeedForward(store, "translate.m_t", {c, k, 2}, rng);
  m_f_ = numcore::FeedForward(store, "translate.m_f", {k + c, k, 1}, rng);
  m_s_ = numcore::FeedForward(store, "translate.m_s", {2 * k + c, k, 1}, rng);
  m_e_ = numcore::FeedForward(store, "translate.m_e", {2 * k + c, k, molgraph::kBondTypes}, rng);
  m_mu_ = numcore::FeedForward(store, "translate.m_mu", {2 * k, k, config.latent}, rng);
  m_sigma_ = numcore::FeedForward(store, "translate.m_sigma", {2 * k, k, config.latent}, rng);
}

std::size_t TranslateModel::context_width() const {
  return config_.encoder.width + config_.latent + (config_.class_conditioned ? config_.class_width : 0);
}

void TranslateModel::check_class(std::optional<int> reaction_class) const {
  if (reaction_class && !config_.class_conditioned) {
    throw std::invalid_argument("reaction class given but the translation model is not class-conditioned");
  }
  if (!reaction_class && config_.class_conditioned) {
    throw std::invalid_argument("the translation model is class-conditioned; a reaction class is required");
  }
  if (reaction_class && (*reaction_class < 1 || *reaction_class > molgraph::kReactionClasses)) {
    throw std::invalid_argument("reaction class out of range");
  }
}

StepDistributions TranslateModel::step(const numcore::ParameterStore& store, const TranslationState& state,
                                       std::span<const double> z,
                                       std::optional<int> reaction_class) const {
  check_class(reaction_class);
  if (state.atom_count() == 0) throw std::invalid_argument("empty translation state");
  if (z.size() != config_.latent) throw numcore::ShapeError("latent code width");
  const PreparedState prep = prepare_state(state, elements_, atoms_);
  StepDistributions d;
  d.model_ = this;
  d.store_ = &store;
  d.atoms_ = prep.atoms;
  d.nodes_ = prep.features.rows();
  d.h_ = encoder_.encode(store, prep.features, prep.graph);
  const std::size_t k = d.h_.cols();

  d.ctx_.assign(k, 0.0);
  for (std::size_t r = 0; r < d.atoms_; ++r) {
    for (std::size_t c = 0; c < k; ++c) d.ctx_[c] += d.h_(r, c);
  }
  d.ctx_.insert(d.ctx_.end(), z.begin(), z.end());
  if (class_table_) {
    const auto row = store[*class_table_].value.row(static_cast<std::size_t>(*reaction_class - 1));
    d.ctx_.insert(d.ctx_.end(), row.begin(), row.end());
  }

  const auto t = numcore::log_softmax(m_t_.apply(store, d.ctx_));
  d.log_continue_ = t[0];
  d.log_stop_ = t[1];

  {
    const Tensor2& w = store[m_f_.weight(0)].value;
    auto shared = bias_row(store, m_f_);
    add_vec_times(d.ctx_, w, k, shared);
    const Tensor2 logits = finish(store, m_f_, with_shared_row(rows_times(d.h_, w, 0), shared));
    std::vector<char> mask(d.nodes_, 0);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(d.atoms_), 1);
    d.log_first_ = numcore::log_softmax(logits.data(), mask);
  }
  d.second_nodes_ = rows_times(d.h_, store[m_s_.weight(0)].value, 0);
  d.bond_nodes_ = rows_times(d.h_, store[m_e_.weight(0)].value, k);
  return d;
}

double TranslateModel::trace_logprob(const numcore::ParameterStore& store, const TranslationState& start,
                                     const Trace& trace, std::span<const double> z,
                                     std::optional<int> reaction_class, std::string* diagnostic) const {
  const auto fail = [&](std::size_t i, const std::string& why) {
    if (diagnostic) *diagnostic = "step " + std::to_string(i) + ": " + why;
    return kNegInf;
  };
  if (trace.actions.empty() || !trace.actions.back().stop) return fail(trace.actions.size(), "trace does not end with stop");
  TranslationState state = start;
  double total = 0.0;
  for (std::size_t i = 0; i < trace.actions.size(); ++i) {
    const Action& a = trace.actions[i];
    if (a.stop && i + 1 != trace.actions.size()) return fail(i, "stop before the last step");
    const double lp = step(store, state, z, reaction_class).log_prob(a);
    if (lp == kNegInf) return fail(i, "action " + to_string(a) + " is masked out");
    total += lp;
    if (!a.stop) {
      try {
        apply_action(state, a, atoms_);
      } catch (const ActionError& e) {
        return fail(i, e.what());
      }
    }
  }
  return total;
}

Var TranslateModel::context(Tape& tape, Var h, std::size_t atoms, Var z,
                            std::optional<int> reaction_class) const {
  std::vector<Var> parts = {tape.sum_rows(tape.gather_rows(h, first_rows(atoms))), z};
  if (class_table_) {
    parts.push_back(tape.gather_rows(tape.param(*class_table_),
                                     {static_cast<std::uint32_t>(*reaction_class - 1)}));
  }
  return tape.concat_cols(parts);
}

Var TranslateModel::trace_logprob(Tape& tape, const TranslationState& start, const Trace& trace, Var z,
                                  std::optional<int> reaction_class) const {
  check_class(reaction_class);
  if (trace.actions.empty() || !trace.actions.back().stop) {
    throw ActionError("trace does not end with stop");
  }
  TranslationState state = start;
  std::vector<Var> terms;
  for (std::size_t i = 0; i < trace.actions.size(); ++i) {
    const Action& a = trace.actions[i];
    if (a.stop && i + 1 != trace.actions.size()) throw ActionError("stop before the last step");
    const PreparedState prep = prepare_state(state, elements_, atoms_);
    const std::size_t n = prep.atoms;
    const std::size_t rows = prep.features.rows();
    const Var h = encoder_.encode(tape, tape.constant(prep.features), prep.graph);
    const Var ctx = context(tape, h, n, z, reaction_class);
    terms.push_back(tape.log_softmax_at(m_t_.forward(tape, ctx), {}, a.stop ? 1 : 0));
    if (a.stop) break;
    if (a.a2 >= n || a.a3 >= rows || a.a3 == a.a2) {
      throw ActionError("step " + std::to_string(i) + ": action " + to_string(a) + " is masked out");
    }
    const Var ctx_rows = tape.gather_rows(ctx, std::vector<std::uint32_t>(rows, 0));
    std::vector<char> first_mask(rows, 0);
    std::fill(first_mask.begin(), first_mask.begin() + static_cast<long>(n), 1);
    const Var f = m_f_.forward(tape, tape.concat_cols(std::vector<Var>{h, ctx_rows}));
    terms.push_back(tape.log_softmax_at(f, first_mask, a.a2));

    const Var h2 = tape.gather_rows(h, std::vector<std::uint32_t>(rows, a.a2));
    std::vector<char> second_mask(rows, 1);
    second_mask[a.a2] = 0;
    const Var s = m_s_.forward(tape, tape.concat_cols(std::vector<Var>{h, h2, ctx_rows}));
    terms.push_back(tape.log_softmax_at(s, second_mask, a.a3));

    const Var e = m_e_.forward(tape, tape.concat_cols(std::vector<Var>{
                                         tape.gather_rows(h, {a.a2}), tape.gather_rows(h, {a.a3}), ctx}));
    terms.push_back(tape.log_softmax_at(e, {}, static_cast<std::size_t>(a.a4)));
    apply_action(state, a, atoms_);
  }
  Var total = terms.front();
  for (std::size_t i = 1; i < terms.size(); ++i) total = tape.add(total, terms[i]);
  return total;
}

double TranslateModel::log_marginal_node(const numcore::ParameterStore& store, const TranslationState& state,
                                         std::span<const Trace> traces, std::size_t depth,
                                         std::span<const double> z,
                                         std::optional<int> reaction_class) const {
  const StepDistributions d = step(store, state, z, reaction_class);
  std::vector<double> values;
  std::size_t lo = 0;
  while (lo < traces.size()) {
    const Action& a = traces[lo].actions.at(depth);
    std::size_t hi = lo + 1;
    while (hi < traces.size() && traces[hi].actions.at(depth) == a) ++hi;
    double v = d.log_prob(a);
    if (!a.stop && v != kNegInf) {
      TranslationState next = state;
      apply_action(next, a, atoms_);
      v += log_marginal_node(store, next, traces.subspan(lo, hi - lo), depth + 1, z, reaction_class);
    }
    values.push_back(v);
    lo = hi;
  }
  return numcore::log_sum_exp(values);
}

double TranslateModel::log_marginal(const numcore::ParameterStore& store, const TranslationState& start,
                                    std::span<const Trace> traces, std::span<const double> z,
                                    std::optional<int> reaction_class) const {
  if (traces.empty()) return kNegInf;
  std::vector<Trace> sorted(traces.begin(), traces.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (const auto& t : sorted) {
    if (t.actions.empty() || !t.actions.back().stop) throw ActionError("trace does not end with stop");
  }
  return log_marginal_node(store, start, sorted, 0, z, reaction_class);
}

double TranslateModel::marginal_logprob_exact(const numcore::ParameterStore& store,
                                              const TranslationState& start, const EditSet& edits,
                                              std::span<const double> z,
                                              std::optional<int> reaction_class) const {
  const auto traces = all_traces(start, edits, atoms_);
  return log_marginal(store, start, traces, z, reaction_class);
}

PosteriorVars TranslateModel::posterior(Tape& tape, const TranslationState& synthon,
                                        const molgraph::Molecule& reactant) const {
  if (synthon.atom_count() == 0 || reactant.empty()) throw std::invalid_argument("empty posterior input");
  const PreparedState ps = prepare_state(synthon, elements_, atoms_, false);
  const PreparedState pg = prepare_state(plain_state(reactant), elements_, atoms_, false);
  const Var hs = rgcn::readout(tape, encoder_.encode(tape, tape.constant(ps.features), ps.graph));
  const Var hg = rgcn::readout(tape, encoder_.encode(tape, tape.constant(pg.features), pg.graph));
  const Var in = tape.concat_cols(std::vector<Var>{hg, hs});
  return {m_mu_.forward(tape, in), tape.clamp(m_sigma_.forward(tape, in), kLogVarMin, kLogVarMax)};
}

PosteriorValue TranslateModel::posterior(const numcore::ParameterStore& store,
                                         const TranslationState& synthon,
                                         const molgraph::Molecule& reactant) const {
  if (synthon.atom_count() == 0 || reactant.empty()) throw std::invalid_argument("empty posterior input");
  const PreparedState ps = prepare_state(synthon, elements_, atoms_, false);
  const PreparedState pg = prepare_state(plain_state(reactant), elements_, atoms_, false);
  const Tensor2 hs = rgcn::readout(encoder_.encode(store, ps.features, ps.graph));
  const Tensor2 hg = rgcn::readout(encoder_.encode(store, pg.features, pg.graph));
  std::vector<double> in(hg.data().begin(), hg.data().end());
  in.insert(in.end(), hs.data().begin(), hs.data().end());
  PosteriorValue out{m_mu_.apply(store, in), m_sigma_.apply(store, in)};
  for (double& v : out.logvar) v = std::clamp(v, kLogVarMin, kLogVarMax);
  return out;
}

Var TranslateModel::elbo_loss(Tape& tape, const TranslationState& synthon,
                              const molgraph::Molecule& reactant, std::span<const Trace> traces,
                              std::span<const double> eps, std::optional<int> reaction_class) const {
  if (traces.empty()) throw std::invalid_argument("elbo needs at least one trace");
  if (eps.size() != config_.latent) throw numcore::ShapeError("noise width");
  const PosteriorVars q = posterior(tape, synthon, reactant);
  const Var z = tape.gaussian_sample(q.mu, q.logvar, eps);
  Var sum = trace_logprob(tape, synthon, traces[0], z, reaction_class);
  for (std::size_t j = 1; j < traces.size(); ++j) {
    sum = tape.add(sum, trace_logprob(tape, synthon, traces[j], z, reaction_class));
  }
  return tape.add(tape.scale(sum, -1.0 / static_cast<double>(traces.size())),
                  tape.kl_standard_normal(q.mu, q.logvar));
}

}  // namespace retrograph::translate
