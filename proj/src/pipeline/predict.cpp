//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/pipeline/predict.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "retrograph/molgraph/valence.hpp"

namespace retrograph::pipeline {

namespace {

constexpr double kScoreFloor = 1e-12;

bool ranks_before(const Candidate& a, const std::string& ka, const Candidate& b,
                  const std::string& kb) {
  if (a.score != b.score) return a.score > b.score;
  return ka < kb;
}

}  // namespace

DecodeOptions decode_options(const RunConfig& config, std::uint64_t stream) {
  return {config.beam, config.max_steps, config.samples, config.seed, stream};
}

std::string reactant_key(std::span<const std::string> sorted_reactants) {
  std::string key;
  for (const auto& r : sorted_reactants) {
    if (!key.empty()) key += '.';
    key += r;
  }
  return key;
}

std::vector<Candidate> merge_candidates(std::vector<Candidate> pool, std::size_t k) {
  std::map<std::string, Candidate> best;
  for (auto& c : pool) {
    std::sort(c.reactants.begin(), c.reactants.end());
    std::string key = reactant_key(c.reactants);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(std::move(key), std::move(c));
    } else if (c.score > it->second.score) {
      it->second = std::move(c);
    }
  }
  std::vector<std::pair<std::string, Candidate>> ranked(std::make_move_iterator(best.begin()),
                                                        std::make_move_iterator(best.end()));
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return ranks_before(a.second, a.first, b.second, b.first);
  });
  if (ranked.size() > k) ranked.resize(k);
  std::vector<Candidate> out;
  out.reserve(ranked.size());
  for (auto& [key, c] : ranked) out.push_back(std::move(c));
  return out;
}

std::vector<Candidate> cross_candidates(std::span<const Candidate> a, std::span<const Candidate> b,
                                        std::size_t k) {
  std::vector<Candidate> pool;
  pool.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) {
      Candidate c;
      c.reactants = x.reactants;
      c.reactants.insert(c.reactants.end(), y.reactants.begin(), y.reactants.end());
      c.score = x.score + y.score;
      c.centers = x.centers;
      pool.push_back(std::move(c));
    }
  }
  return merge_candidates(std::move(pool), k);
}

double hypothesis_log_score(const numcore::Tensor2& scores, const molgraph::Molecule& product,
                            std::span<const center::AtomPair> centers) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> cut;
  for (const auto& p : centers) cut.insert(std::minmax(p.first, p.second));
  double total = 0.0;
  for (const auto& p : center::rank_bonded_pairs(scores, product)) {
    const double s = scores(p.first, p.second);
    total += cut.contains(std::minmax(p.first, p.second)) ? std::log(std::max(s, kScoreFloor))
                                                           : std::log(std::max(1.0 - s, kScoreFloor));
  }
  return total;
}

std::vector<CenterHypothesis> center_hypotheses(const numcore::Tensor2& scores,
                                                const molgraph::Molecule& product,
                                                double threshold, std::size_t count) {
  std::vector<CenterHypothesis> out;
  if (count == 0) return out;
  const auto ranked = center::rank_bonded_pairs(scores, product);
  const auto above = center::select_centers(scores, product, threshold, ranked.size());
  out.push_back({above, hypothesis_log_score(scores, product, above)});
  for (const auto& p : ranked) {
    if (out.size() >= count) break;
    if (above.size() == 1 && above.front() == p) continue;
    const std::vector<center::AtomPair> single{p};
    out.push_back({single, hypothesis_log_score(scores, product, single)});
  }
  return out;
}

std::vector<Candidate> decode_synthons(const TranslateStage& translate,
                                       const molgraph::Molecule& product,
                                       std::span<const center::AtomPair> centers,
                                       std::optional<int> reaction_class,
                                       const DecodeOptions& options, std::uint64_t& call_index,
                                       std::size_t* invalid_dropped) {
  const std::uint64_t base = numcore::derive_seed(options.seed, options.stream);
  const translate::BeamOptions beam{options.k, options.max_steps};
  std::vector<Candidate> joint;
  bool first = true;
  for (const auto& synthon : translate::make_synthons(product, centers)) {
    std::vector<Candidate> pool;
    for (std::size_t s = 0; s < options.samples; ++s) {
      numcore::Rng rng(numcore::derive_seed(base, call_index++));
      const auto z = translate::sample_prior(translate.model.config().latent, rng);
      for (const auto& d : translate::beam_generate(translate.model, translate.store, synthon.state,
                                                    beam, z, reaction_class)) {
        if (!molgraph::valence_ok(translate::result_molecule(d.state))) {
          if (invalid_dropped != nullptr) ++*invalid_dropped;
          continue;
        }
        pool.push_back({{d.canonical}, d.logprob, {}});
      }
    }
    auto ranked = merge_candidates(std::move(pool), options.k);
    joint = first ? std::move(ranked) : cross_candidates(joint, ranked, options.k);
    first = false;
  }
  for (auto& c : joint) c.centers.assign(centers.begin(), centers.end());
  return joint;
}

Prediction predict(const CenterStage& center, const TranslateStage& translate,
                   const molgraph::Molecule& product, std::optional<int> reaction_class,
                   const RunConfig& config, std::uint64_t stream) {
  Prediction out;
  try {
    const auto prepared = center::prepare_product(product, center.model.vocab());
    const auto scores = center.model.score_pairs(center.store, prepared, reaction_class);
    const DecodeOptions options = decode_options(config, stream);
    std::uint64_t call_index = 0;
    std::vector<Candidate> pool;
    for (const auto& h :
         center_hypotheses(scores, product, config.threshold, config.centers_k)) {
      for (auto& c : decode_synthons(translate, product, h.centers, reaction_class, options,
                                     call_index, &out.invalid_dropped)) {
        c.score += h.log_score;
        pool.push_back(std::move(c));
      }
    }
    out.candidates = merge_candidates(std::move(pool), config.beam);
  } catch (const std::invalid_argument& e) {
    out.candidates.clear();
    out.diagnostic = e.what();
  }
  if (out.candidates.empty() && out.diagnostic.empty()) out.diagnostic = "no valid candidate";
  return out;
}

Prediction predict_with_centers(const TranslateStage& translate, const molgraph::Molecule& product,
                                std::span<const center::AtomPair> centers,
                                std::optional<int> reaction_class, const RunConfig& config,
                                std::uint64_t stream) {
  Prediction out;
  try {
    std::uint64_t call_index = 0;
    out.candidates = decode_synthons(translate, product, centers, reaction_class,
                                     decode_options(config, stream), call_index,
                                     &out.invalid_dropped);
  } catch (const std::invalid_argument& e) {
    out.candidates.clear();
    out.diagnostic = e.what();
  }
  if (out.candidates.empty() && out.diagnostic.empty()) out.diagnostic = "no valid candidate";
  return out;
}

}  // namespace retrograph::pipeline
