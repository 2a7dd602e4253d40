//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/molgraph/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "retrograph/molgraph/valence.hpp"

namespace retrograph::molgraph {
namespace {

bool can_be_aromatic(Element e) {
  switch (e) {
    case Element::B:
    case Element::C:
    case Element::N:
    case Element::O:
    case Element::P:
    case Element::S:
      return true;
    default:
      return false;
  }
}

std::optional<Element> aromatic_symbol(char c) {
  switch (c) {
    case 'b':
      return Element::B;
    case 'c':
      return Element::C;
    case 'n':
      return Element::N;
    case 'o':
      return Element::O;
    case 'p':
      return Element::P;
    case 's':
      return Element::S;
    default:
      return std::nullopt;
  }
}

struct ParsedAtom {
  std::size_t position;
  bool lowercase;
  bool bracket;
};

struct OpenRing {
  std::uint32_t atom;
  std::optional<BondType> bond;
  std::size_t position;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Molecule run() {
    if (text_.empty()) fail(SmilesErrorKind::Lexical, 0, "empty SMILES");
    while (pos_ < text_.size()) step();
    if (pending_bond_) fail(SmilesErrorKind::Lexical, pending_pos_, "dangling bond symbol");
    if (!branches_.empty()) {
      fail(SmilesErrorKind::UnclosedBranch, branches_.back().second, "unclosed branch");
    }
    if (!rings_.empty()) {
      const auto& [digit, ring] = *rings_.begin();
      fail(SmilesErrorKind::UnclosedRing, ring.position,
           "unclosed ring bond " + std::to_string(digit));
    }
    if (!prev_) fail(SmilesErrorKind::Lexical, text_.size() - 1, "trailing '.'");
    finish_hydrogens();
    const auto report = valence_ok(mol_);
    if (!report) {
      const auto atom = report.violations.front();
      fail(SmilesErrorKind::Valence, meta_[atom].position,
           "valence exceeded on atom " + std::to_string(atom));
    }
    return std::move(mol_);
  }

 private:
  [[noreturn]] void fail(SmilesErrorKind kind, std::size_t at, const std::string& what) const {
    throw SmilesError(kind, at, what);
  }

  void step() {
    const char c = text_[pos_];
    switch (c) {
      case '-':
        return bond_symbol_token(BondType::Single);
      case '=':
        return bond_symbol_token(BondType::Double);
      case '#':
        return bond_symbol_token(BondType::Triple);
      case ':':
        return bond_symbol_token(BondType::Aromatic);
      case '(':
        if (!prev_) fail(SmilesErrorKind::Lexical, pos_, "branch without a preceding atom");
        if (pending_bond_) fail(SmilesErrorKind::Lexical, pos_, "bond symbol before '('");
        branches_.emplace_back(*prev_, pos_);
        ++pos_;
        return;
      case ')':
        if (branches_.empty()) fail(SmilesErrorKind::Lexical, pos_, "unbalanced ')'");
        if (pending_bond_) fail(SmilesErrorKind::Lexical, pending_pos_, "dangling bond symbol");
        prev_ = branches_.back().first;
        branches_.pop_back();
        ++pos_;
        return;
      case '.':
        if (pending_bond_) fail(SmilesErrorKind::Lexical, pending_pos_, "dangling bond symbol");
        if (!branches_.empty()) fail(SmilesErrorKind::Lexical, pos_, "'.' inside a branch");
        if (!prev_) fail(SmilesErrorKind::Lexical, pos_, "empty component");
        prev_.reset();
        ++pos_;
        return;
      case '%':
        return percent_ring();
      case '[':
        return bracket_atom();
      case '/':
      case '\\':
      case '@':
        fail(SmilesErrorKind::Lexical, pos_, "stereochemistry is not supported");
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      ring_digit(c - '0', pos_);
      ++pos_;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return organic_atom();
    fail(SmilesErrorKind::Lexical, pos_, std::string("unexpected character '") + c + "'");
  }

  void bond_symbol_token(BondType t) {
    if (!prev_) fail(SmilesErrorKind::Lexical, pos_, "bond without a preceding atom");
    if (pending_bond_) fail(SmilesErrorKind::Lexical, pos_, "two consecutive bond symbols");
    pending_bond_ = t;
    pending_pos_ = pos_;
    ++pos_;
  }

  void percent_ring() {
    const std::size_t at = pos_;
    if (pos_ + 2 >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])) ||
        !std::isdigit(static_cast<unsigned char>(text_[pos_ + 2]))) {
      fail(SmilesErrorKind::Lexical, at, "'%' must be followed by two digits");
    }
    ring_digit((text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0'), at);
    pos_ += 3;
  }

  BondType implicit_bond(std::uint32_t a, std::uint32_t b) const {
    return meta_[a].lowercase && meta_[b].lowercase ? BondType::Aromatic : BondType::Single;
  }

  void connect(std::uint32_t a, std::uint32_t b, BondType t, std::size_t at) {
    if (a == b) fail(SmilesErrorKind::Bond, at, "ring bond closes on the same atom");
    if (mol_.bond(a, b)) fail(SmilesErrorKind::Bond, at, "duplicate bond");
    mol_.add_bond(a, b, t);
  }

  void ring_digit(int digit, std::size_t at) {
    if (!prev_) fail(SmilesErrorKind::Lexical, at, "ring bond without a preceding atom");
    auto it = rings_.find(digit);
    if (it == rings_.end()) {
      rings_.emplace(digit, OpenRing{*prev_, pending_bond_, at});
    } else {
      const OpenRing open = it->second;
      rings_.erase(it);
      if (open.bond && pending_bond_ && *open.bond != *pending_bond_) {
        fail(SmilesErrorKind::Bond, at, "ring bond symbols disagree");
      }
      const auto given = open.bond ? open.bond : pending_bond_;
      connect(open.atom, *prev_, given ? *given : implicit_bond(open.atom, *prev_), at);
    }
    pending_bond_.reset();
  }

  void organic_atom() {
    const std::size_t at = pos_;
    const char c = text_[pos_];
    std::optional<Element> e;
    bool lowercase = false;
    if (std::islower(static_cast<unsigned char>(c))) {
      e = aromatic_symbol(c);
      lowercase = true;
      ++pos_;
    } else {
      if (pos_ + 1 < text_.size()) {
        const std::string two{c, text_[pos_ + 1]};
        if (two == "Cl" || two == "Br") {
          e = element_from_symbol(two);
          pos_ += 2;
        }
      }
      if (!e) {
        e = element_from_symbol(std::string(1, c));
        ++pos_;
      }
    }
    if (!e) {
      fail(SmilesErrorKind::UnknownElement, at, std::string("unknown element '") + c + "'");
    }
    add_atom({*e, 0, 0, 0}, {at, lowercase, false});
  }

  int read_number() {
    int v = 0;
    int digits = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (++digits > 6) fail(SmilesErrorKind::Lexical, pos_, "number too long");
      v = v * 10 + (text_[pos_] - '0');
      ++pos_;
    }
    return v;
  }

  bool at_digit() const {
    return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  void bracket_atom() {
    const std::size_t at = pos_;
    ++pos_;
    auto expect_more = [&] {
      if (pos_ >= text_.size()) fail(SmilesErrorKind::Lexical, at, "unterminated bracket atom");
    };
    expect_more();
    if (at_digit()) fail(SmilesErrorKind::Lexical, pos_, "isotopes are not supported");

    AtomRecord rec;
    bool lowercase = false;
    const char c = text_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      const auto e = aromatic_symbol(c);
      if (!e) fail(SmilesErrorKind::UnknownElement, pos_, std::string("unknown element '") + c + "'");
      rec.element = *e;
      lowercase = true;
      ++pos_;
    } else if (std::isupper(static_cast<unsigned char>(c))) {
      std::string sym(1, c);
      ++pos_;
      if (pos_ < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_]))) {
        sym.push_back(text_[pos_]);
        ++pos_;
      }
      const auto e = element_from_symbol(sym);
      if (!e) fail(SmilesErrorKind::UnknownElement, at + 1, "unknown element '" + sym + "'");
      rec.element = *e;
    } else {
      fail(SmilesErrorKind::Lexical, pos_, "expected an element symbol");
    }

    expect_more();
    if (text_[pos_] == '@') fail(SmilesErrorKind::Lexical, pos_, "stereochemistry is not supported");
    if (text_[pos_] == 'H') {
      ++pos_;
      rec.hydrogens = at_digit() ? read_number() : 1;
      if (rec.hydrogens > kMaxHydrogens) {
        fail(SmilesErrorKind::Lexical, pos_, "hydrogen count above " + std::to_string(kMaxHydrogens));
      }
    }
    expect_more();
    if (text_[pos_] == '+' || text_[pos_] == '-') {
      const char sign = text_[pos_];
      const std::size_t charge_pos = pos_;
      int magnitude = 0;
      while (pos_ < text_.size() && text_[pos_] == sign) {
        ++magnitude;
        ++pos_;
      }
      if (magnitude == 1 && at_digit()) magnitude = read_number();
      rec.charge = sign == '+' ? magnitude : -magnitude;
      if (rec.charge < kMinCharge || rec.charge > kMaxCharge) {
        fail(SmilesErrorKind::Lexical, charge_pos, "formal charge outside [-2, 2]");
      }
    }
    expect_more();
    if (text_[pos_] == ':') {
      ++pos_;
      if (!at_digit()) fail(SmilesErrorKind::Lexical, pos_, "atom map needs a number");
      rec.map_number = read_number();
    }
    expect_more();
    if (text_[pos_] != ']') {
      fail(SmilesErrorKind::Lexical, pos_, "unexpected character in bracket atom");
    }
    ++pos_;
    add_atom(rec, {at, lowercase, true});
  }

  void add_atom(const AtomRecord& rec, const ParsedAtom& meta) {
    const std::uint32_t idx = mol_.add_atom(rec);
    meta_.push_back(meta);
    if (prev_) {
      const BondType t = pending_bond_ ? *pending_bond_ : implicit_bond(*prev_, idx);
      connect(*prev_, idx, t, meta.position);
    }
    pending_bond_.reset();
    prev_ = idx;
  }

  void finish_hydrogens() {
    for (std::uint32_t i = 0; i < mol_.atom_count(); ++i) {
      const auto& m = meta_[i];
      if (m.lowercase && !mol_.is_aromatic(i)) {
        fail(SmilesErrorKind::Bond, m.position, "aromatic atom outside an aromatic ring");
      }
      if (m.bracket) continue;
      AtomRecord rec = mol_.atom(i);
      rec.hydrogens = implicit_hydrogens(rec.element, mol_.bond_units(i), m.lowercase);
      mol_.set_atom(i, rec);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Molecule mol_;
  std::vector<ParsedAtom> meta_;
  std::optional<std::uint32_t> prev_;
  std::optional<BondType> pending_bond_;
  std::size_t pending_pos_ = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> branches_;
  std::map<int, OpenRing> rings_;
};

// Writer ------------------------------------------------------------------

class Writer {
 public:
  Writer(const Molecule& mol, std::span<const std::uint32_t> rank, bool include_maps)
      : mol_(mol), rank_(rank), include_maps_(include_maps), visited_(mol.atom_count(), 0) {
    if (rank.size() != mol.atom_count()) throw std::invalid_argument("rank length mismatch");
    sorted_neighbors_.resize(mol.atom_count());
    for (std::uint32_t i = 0; i < mol.atom_count(); ++i) {
      auto& list = sorted_neighbors_[i];
      list = mol.neighbors(i);
      std::sort(list.begin(), list.end(),
                [&](const Neighbor& x, const Neighbor& y) { return rank_[x.atom] < rank_[y.atom]; });
    }
  }

  std::string run() {
    std::vector<std::uint32_t> order(mol_.atom_count());
    std::iota(order.begin(), order.end(), 0U);
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t a, std::uint32_t b) { return rank_[a] < rank_[b]; });
    children_.assign(mol_.atom_count(), {});
    openings_.assign(mol_.atom_count(), {});
    closings_.assign(mol_.atom_count(), {});
    std::string out;
    for (std::uint32_t start : order) {
      if (visited_[start]) continue;
      plan(start, UINT32_MAX);
      if (!out.empty()) out.push_back('.');
      emit(start, out);
    }
    return out;
  }

 private:
  void plan(std::uint32_t x, std::uint32_t parent) {
    visited_[x] = 1;
    for (const auto& nb : sorted_neighbors_[x]) {
      if (nb.atom == parent) continue;
      if (!visited_[nb.atom]) {
        children_[x].push_back(nb);
        plan(nb.atom, x);
      } else if (visited_[nb.atom] == 1 && !ring_seen_.count(key(x, nb.atom))) {
        // nb is an ancestor still on the stack: it opens, x closes.
        ring_seen_.insert(key(x, nb.atom));
        openings_[nb.atom].push_back({x, nb.type});
        closings_[x].push_back({nb.atom, nb.type});
      }
    }
    visited_[x] = 2;
  }

  static std::uint64_t key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  bool lowercase(std::uint32_t i) const { return written_aromatic(mol_, i); }

  void bond_token(std::uint32_t a, std::uint32_t b, BondType t, std::string& out) const {
    switch (t) {
      case BondType::Single:
        if (lowercase(a) && lowercase(b)) out.push_back('-');
        break;
      case BondType::Double:
        out.push_back('=');
        break;
      case BondType::Triple:
        out.push_back('#');
        break;
      case BondType::Aromatic:
        if (!(lowercase(a) && lowercase(b))) out.push_back(':');
        break;
    }
  }

  void atom_token(std::uint32_t i, std::string& out) const {
    const auto& a = mol_.atom(i);
    const bool lower = lowercase(i);
    std::string sym(symbol(a.element));
    if (lower) sym[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(sym[0])));
    const bool mapped = include_maps_ && a.map_number != 0;
    const bool bare = a.charge == 0 && !mapped &&
                      implicit_hydrogens(a.element, mol_.bond_units(i), lower) == a.hydrogens;
    if (bare) {
      out += sym;
      return;
    }
    out.push_back('[');
    out += sym;
    if (a.hydrogens > 0) {
      out.push_back('H');
      if (a.hydrogens > 1) out += std::to_string(a.hydrogens);
    }
    if (a.charge != 0) {
      out.push_back(a.charge > 0 ? '+' : '-');
      if (std::abs(a.charge) > 1) out += std::to_string(std::abs(a.charge));
    }
    if (mapped) {
      out.push_back(':');
      out += std::to_string(a.map_number);
    }
    out.push_back(']');
  }

  static void digit_token(int d, std::string& out) {
    if (d < 10) {
      out.push_back(static_cast<char>('0' + d));
    } else if (d < 100) {
      out.push_back('%');
      out += std::to_string(d);
    } else {
      throw std::length_error("more than 99 simultaneous ring bonds");
    }
  }

  int take_digit() {
    int d = 1;
    while (digits_in_use_.count(d)) ++d;
    digits_in_use_.insert(d);
    return d;
  }

  void emit(std::uint32_t x, std::string& out) {
    atom_token(x, out);
    auto by_rank = [&](const Neighbor& p, const Neighbor& q) { return rank_[p.atom] < rank_[q.atom]; };
    auto& closings = closings_[x];
    std::sort(closings.begin(), closings.end(), by_rank);
    for (const auto& c : closings) {
      const int d = ring_digit_.at(key(x, c.atom));
      digit_token(d, out);
      digits_in_use_.erase(d);
    }
    auto& openings = openings_[x];
    std::sort(openings.begin(), openings.end(), by_rank);
    for (const auto& o : openings) {
      const int d = take_digit();
      ring_digit_[key(x, o.atom)] = d;
      bond_token(x, o.atom, o.type, out);
      digit_token(d, out);
    }
    const auto& kids = children_[x];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      const bool branch = k + 1 < kids.size();
      if (branch) out.push_back('(');
      bond_token(x, kids[k].atom, kids[k].type, out);
      emit(kids[k].atom, out);
      if (branch) out.push_back(')');
    }
  }

  const Molecule& mol_;
  std::span<const std::uint32_t> rank_;
  bool include_maps_;
  std::vector<std::uint8_t> visited_;
  std::vector<std::vector<Neighbor>> sorted_neighbors_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<std::vector<Neighbor>> openings_;
  std::vector<std::vector<Neighbor>> closings_;
  std::set<std::uint64_t> ring_seen_;
  std::map<std::uint64_t, int> ring_digit_;
  std::set<int> digits_in_use_;
};

}  // namespace

std::string_view to_string(SmilesErrorKind kind) {
  switch (kind) {
    case SmilesErrorKind::Lexical:
      return "lexical error";
    case SmilesErrorKind::UnclosedRing:
      return "unclosed ring bond";
    case SmilesErrorKind::UnclosedBranch:
      return "unclosed branch";
    case SmilesErrorKind::UnknownElement:
      return "unknown element";
    case SmilesErrorKind::Valence:
      return "valence violation";
    case SmilesErrorKind::Bond:
      return "invalid bond";
  }
  return "error";
}

SmilesError::SmilesError(SmilesErrorKind kind, std::size_t position, const std::string& message)
    : std::invalid_argument(std::string(to_string(kind)) + " at position " +
                            std::to_string(position) + ": " + message),
      kind_(kind),
      position_(position) {}

bool written_aromatic(const Molecule& mol, std::uint32_t atom) {
  return mol.is_aromatic(atom) && can_be_aromatic(mol.atom(atom).element);
}

Molecule parse_smiles(std::string_view text) { return Parser(text).run(); }

std::string write_smiles(const Molecule& mol, std::span<const std::uint32_t> rank,
                         bool include_maps) {
  return Writer(mol, rank, include_maps).run();
}

std::string write_smiles(const Molecule& mol, bool include_maps) {
  std::vector<std::uint32_t> rank(mol.atom_count());
  std::iota(rank.begin(), rank.end(), 0U);
  return write_smiles(mol, rank, include_maps);
}

}  // namespace retrograph::molgraph
