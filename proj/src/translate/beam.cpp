//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/translate/beam.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "retrograph/molgraph/canonical.hpp"

namespace retrograph::translate {

namespace {

struct Scored {
  double score;
  Action action;
};

bool better(const Scored& x, const Scored& y) {
  if (x.score != y.score) return x.score > y.score;
  return x.action < y.action;
}

struct Live {
  TranslationState state;
  std::string key;
  double score = 0.0;
};

std::vector<Scored> top_actions(const StepDistributions& d, const TranslationState& state,
                                const AtomVocabulary& vocab, std::size_t k) {
  std::vector<Scored> all;
  if (action_valid(state, Action::stop_action(), vocab)) all.push_back({d.log_stop(), Action::stop_action()});
  const auto& first = d.log_first();
  for (std::uint32_t a2 = 0; a2 < d.atoms(); ++a2) {
    if (state.mol.atom(a2).hydrogens < 1) continue;
    const auto second = d.log_second(a2);
    const Tensor2 bond = d.log_bond(a2);
    const double base = d.log_continue() + first[a2];
    for (std::uint32_t a3 = 0; a3 < d.nodes(); ++a3) {
      if (a3 == a2) continue;
      for (int t = 0; t < molgraph::kBondTypes; ++t) {
        const Action act{false, a2, a3, static_cast<molgraph::BondType>(t)};
        if (!action_valid(state, act, vocab)) continue;
        all.push_back({base + second[a3] + bond(a3, static_cast<std::size_t>(t)), act});
      }
    }
  }
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<long>(keep), all.end(), better);
  all.resize(keep);
  return all;
}

void add_to_pool(std::map<std::string, Decoded>& pool, TranslationState state, double score,
                 bool stopped) {
  std::string canonical = molgraph::write_canonical(state.mol);
  auto it = pool.find(canonical);
  if (it != pool.end() && it->second.logprob >= score) return;
  Decoded d{std::move(state), canonical, score, stopped};
  pool.insert_or_assign(std::move(canonical), std::move(d));
}

}  // namespace

std::vector<double> sample_prior(std::size_t latent, numcore::Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> z(latent);
  for (double& v : z) v = normal(rng);
  return z;
}

std::vector<Decoded> beam_generate(const TranslateModel& model, const numcore::ParameterStore& store,
                                   const TranslationState& start, const BeamOptions& options,
                                   std::span<const double> z, std::optional<int> reaction_class) {
  if (options.k == 0) throw std::invalid_argument("beam width must be at least 1");
  if (options.max_steps == 0) throw std::invalid_argument("max_steps must be at least 1");
  const AtomVocabulary& vocab = model.atoms();
  std::map<std::string, Decoded> pool;
  std::vector<Live> live = {{start, state_key(start), 0.0}};
  for (std::size_t step = 0; step < options.max_steps && !live.empty(); ++step) {
    std::map<std::string, Live> children;
    for (const Live& cand : live) {
      const StepDistributions d = model.step(store, cand.state, z, reaction_class);
      const auto actions = top_actions(d, cand.state, vocab, options.k);
      for (const Scored& s : actions) {
        const double score = cand.score + s.score;
        if (s.action.stop) {
          add_to_pool(pool, cand.state, score, true);
          continue;
        }
        TranslationState next = cand.state;
        apply_action(next, s.action, vocab);
        std::string key = state_key(next);
        auto it = children.find(key);
        if (it != children.end() && it->second.score >= score) continue;
        Live child{std::move(next), key, score};
        children.insert_or_assign(std::move(key), std::move(child));
      }
    }
    live.clear();
    for (auto& [key, child] : children) live.push_back(std::move(child));
    std::stable_sort(live.begin(), live.end(), [](const Live& x, const Live& y) {
      if (x.score != y.score) return x.score > y.score;
      return x.key < y.key;
    });
    if (live.size() > options.k) live.resize(options.k);
  }
  for (Live& cand : live) {
    if (action_valid(cand.state, Action::stop_action(), vocab)) {
      add_to_pool(pool, std::move(cand.state), cand.score, false);
    }
  }
  std::vector<Decoded> out;
  for (auto& [key, d] : pool) out.push_back(std::move(d));
  std::stable_sort(out.begin(), out.end(), [](const Decoded& x, const Decoded& y) {
    if (x.logprob != y.logprob) return x.logprob > y.logprob;
    return x.canonical < y.canonical;
  });
  if (out.size() > options.k) out.resize(options.k);
  return out;
}

}  // namespace retrograph::translate
