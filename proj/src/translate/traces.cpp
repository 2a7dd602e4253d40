//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/translate/traces.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace retrograph::translate {

namespace {

// Search over the reactant's atom indices; `slot` tracks where each atom
// lives in the growing state.
class Walker {
 public:
  Walker(const TranslationState& start, const EditSet& edits, const AtomVocabulary& vocab)
      : edits_(&edits) {
    std::size_t reactant_atoms = edits.synthon_to_reactant.size() + edits.new_atoms.size();
    vocab_slot_.assign(reactant_atoms, 0);
    for (std::size_t i = 0; i < edits.new_atoms.size(); ++i) {
      const auto v = vocab.index_of(edits.new_atom_types[i]);
      if (!v) throw VocabularyError("new atom type is not in the atom vocabulary");
      vocab_slot_[edits.new_atoms[i]] = static_cast<std::uint32_t>(*v);
    }
    incident_.resize(reactant_atoms);
    for (std::size_t e = 0; e < edits.new_bonds.size(); ++e) {
      incident_[edits.new_bonds[e].a].push_back(e);
      incident_[edits.new_bonds[e].b].push_back(e);
    }
    initial_.slot.assign(reactant_atoms, -1);
    for (std::size_t i = 0; i < edits.synthon_to_reactant.size(); ++i) {
      initial_.slot[edits.synthon_to_reactant[i]] = static_cast<std::int64_t>(i);
      if (!incident_[edits.synthon_to_reactant[i]].empty()) roots_.push_back(edits.synthon_to_reactant[i]);
    }
    initial_.done.assign(edits.new_bonds.size(), 0);
    initial_.atoms = static_cast<std::uint32_t>(start.atom_count());
  }

  struct Walk {
    std::vector<std::int64_t> slot;
    std::vector<char> done;
    std::deque<std::uint32_t> queue;
    std::vector<Action> actions;
    std::uint32_t atoms = 0;
  };

  const Walk& initial() const { return initial_; }
  const std::vector<std::uint32_t>& roots() const { return roots_; }
  const std::vector<molgraph::Bond>& bonds() const { return edits_->new_bonds; }

  std::vector<std::size_t> pending(const Walk& w, std::uint32_t atom) const {
    std::vector<std::size_t> out;
    for (const std::size_t e : incident_[atom]) {
      if (!w.done[e]) out.push_back(e);
    }
    return out;
  }

  // Adds bond e with `from` as the first node.
  void emit(Walk& w, std::size_t e, std::uint32_t from, bool enqueue) const {
    const auto& b = edits_->new_bonds[e];
    const std::uint32_t to = b.a == from ? b.b : b.a;
    Action act;
    act.a2 = static_cast<std::uint32_t>(w.slot[from]);
    act.a4 = b.type;
    if (w.slot[to] < 0) {
      act.a3 = w.atoms + vocab_slot_[to];
      w.slot[to] = w.atoms++;
      if (enqueue) w.queue.push_back(to);
    } else {
      act.a3 = static_cast<std::uint32_t>(w.slot[to]);
    }
    w.done[e] = 1;
    w.actions.push_back(act);
  }

 private:
  const EditSet* edits_;
  std::vector<std::uint32_t> vocab_slot_;
  std::vector<std::vector<std::size_t>> incident_;
  std::vector<std::uint32_t> roots_;
  Walk initial_;
};

struct Enumeration {
  std::set<std::vector<Action>> found;
  std::size_t cap = 0;
  std::size_t leaf_budget = 0;
  bool overflow = false;
};

void expand(const Walker& walker, Walker::Walk w, Enumeration& out) {
  if (out.overflow) return;
  while (!w.queue.empty()) {
    const std::uint32_t u = w.queue.front();
    w.queue.pop_front();
    auto pending = walker.pending(w, u);
    if (pending.empty()) continue;
    std::sort(pending.begin(), pending.end());
    do {
      Walker::Walk next = w;
      for (const std::size_t e : pending) walker.emit(next, e, u, true);
      expand(walker, std::move(next), out);
      if (out.overflow) return;
    } while (std::next_permutation(pending.begin(), pending.end()));
    return;
  }
  if (out.leaf_budget == 0) {
    out.overflow = true;
    return;
  }
  --out.leaf_budget;
  w.actions.push_back(Action::stop_action());
  out.found.insert(std::move(w.actions));
  if (out.found.size() > out.cap) out.overflow = true;
}

void expand_all(const Walker& walker, const Walker::Walk& w, std::set<std::vector<Action>>& out) {
  bool finished = true;
  for (std::size_t e = 0; e < walker.bonds().size(); ++e) {
    if (w.done[e]) continue;
    finished = false;
    const auto& b = walker.bonds()[e];
    const bool pa = w.slot[b.a] >= 0;
    const bool pb = w.slot[b.b] >= 0;
    if (pa) {
      Walker::Walk next = w;
      walker.emit(next, e, b.a, false);
      expand_all(walker, next, out);
    }
    if (pb) {
      Walker::Walk next = w;
      walker.emit(next, e, b.b, false);
      expand_all(walker, next, out);
    }
  }
  if (finished) {
    auto actions = w.actions;
    actions.push_back(Action::stop_action());
    out.insert(std::move(actions));
  }
}

std::vector<Trace> to_traces(std::set<std::vector<Action>> found) {
  std::vector<Trace> out;
  out.reserve(found.size());
  for (auto it = found.begin(); it != found.end();) {
    out.push_back(Trace{std::move(found.extract(it++).value())});
  }
  return out;
}

}  // namespace

TranslationState replay(const TranslationState& start, const Trace& trace,
                        const AtomVocabulary& vocab) {
  TranslationState state = start;
  for (const auto& a : trace.actions) {
    if (!a.stop) apply_action(state, a, vocab);
  }
  return state;
}

std::optional<std::vector<Trace>> bfs_traces(const TranslationState& start, const EditSet& edits,
                                             const AtomVocabulary& vocab, std::size_t cap) {
  const Walker walker(start, edits, vocab);
  Enumeration out;
  out.cap = cap;
  out.leaf_budget = cap * 64;
  auto roots = walker.roots();
  std::sort(roots.begin(), roots.end());
  do {
    Walker::Walk w = walker.initial();
    w.queue.assign(roots.begin(), roots.end());
    expand(walker, std::move(w), out);
    if (out.overflow) return std::nullopt;
  } while (std::next_permutation(roots.begin(), roots.end()));
  return to_traces(std::move(out.found));
}

Trace random_bfs_trace(const TranslationState& start, const EditSet& edits,
                       const AtomVocabulary& vocab, numcore::Rng& rng) {
  const Walker walker(start, edits, vocab);
  Walker::Walk w = walker.initial();
  auto roots = walker.roots();
  std::shuffle(roots.begin(), roots.end(), rng);
  w.queue.assign(roots.begin(), roots.end());
  while (!w.queue.empty()) {
    const std::uint32_t u = w.queue.front();
    w.queue.pop_front();
    auto pending = walker.pending(w, u);
    std::shuffle(pending.begin(), pending.end(), rng);
    for (const std::size_t e : pending) walker.emit(w, e, u, true);
  }
  w.actions.push_back(Action::stop_action());
  return Trace{std::move(w.actions)};
}

std::vector<Trace> all_traces(const TranslationState& start, const EditSet& edits,
                              const AtomVocabulary& vocab) {
  if (edits.new_bonds.size() > kMaxExactBonds) {
    throw TooManyEdits("exact enumeration refuses more than " + std::to_string(kMaxExactBonds) +
                       " new bonds");
  }
  const Walker walker(start, edits, vocab);
  std::set<std::vector<Action>> found;
  expand_all(walker, walker.initial(), found);
  return to_traces(std::move(found));
}

TraceSampler::TraceSampler(const TranslationState& start, const EditSet& edits,
                           const AtomVocabulary& vocab, std::size_t cap)
    : start_(start), edits_(edits), vocab_(vocab) {
  if (auto traces = bfs_traces(start, edits, vocab, cap)) {
    traces_ = std::move(*traces);
  } else {
    capped_ = true;
  }
}

Trace TraceSampler::sample(numcore::Rng& rng) const {
  if (capped_) return random_bfs_trace(start_, edits_, vocab_, rng);
  std::uniform_int_distribution<std::size_t> pick(0, traces_.size() - 1);
  return traces_[pick(rng)];
}

std::optional<std::size_t> TraceSampler::universe_size() const {
  if (capped_) return std::nullopt;
  return traces_.size();
}

}  // namespace retrograph::translate
