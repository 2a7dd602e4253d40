//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/pipeline/dataset.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "retrograph/center/center.hpp"
#include "retrograph/numcore/params.hpp"
#include "retrograph/translate/train.hpp"

namespace retrograph::pipeline {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
  }
  return out;
}

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> out;
  while (true) {
    const auto tab = line.find('\t');
    out.push_back(line.substr(0, tab));
    if (tab == std::string_view::npos) break;
    line.remove_prefix(tab + 1);
  }
  return out;
}

std::size_t parse_count(std::string_view text) {
  std::size_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw DatasetError("bad number '" + std::string(text) + "'");
  }
  return v;
}

void build_vocabularies(Dataset& ds) {
  std::vector<molgraph::Molecule> mols;
  std::set<translate::VocabAtom> atoms;
  for (const auto& e : ds.entries) {
    if (e.split != Split::kTrain) continue;
    mols.push_back(e.reaction.product);
    for (const auto& r : e.reaction.reactants) mols.push_back(r);
    for (const auto& a : translate::new_atom_types(e.reaction)) atoms.insert(a);
  }
  ds.elements = molgraph::ElementVocabulary::from_molecules(mols);
  ds.atoms = translate::AtomVocabulary({atoms.begin(), atoms.end()});
}

}  // namespace

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  if (text == "test") return Split::kTest;
  throw DatasetError("unknown split '" + std::string(text) + "'");
}

std::vector<const DatasetEntry*> Dataset::split(Split which) const {
  std::vector<const DatasetEntry*> out;
  for (const auto& e : entries) {
    if (e.split == which) out.push_back(&e);
  }
  return out;
}

molgraph::Reaction parse_line(std::string_view line, ReactionLine* raw) {
  const auto fields = fields_of(line);
  if (fields.size() != 2) throw std::invalid_argument("expected reaction<TAB>class");
  int cls = 0;
  const auto [end, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), cls);
  if (ec != std::errc() || end != fields[1].data() + fields[1].size() || cls < 0 ||
      cls > molgraph::kReactionClasses) {
    throw std::invalid_argument("bad reaction class '" + std::string(fields[1]) + "'");
  }
  const std::optional<int> reaction_class = cls == 0 ? std::nullopt : std::optional<int>(cls);
  molgraph::Reaction rxn = molgraph::parse_reaction(fields[0], reaction_class);
  molgraph::validate_reaction(rxn);
  // Rejects reactions the edit model cannot express.
  translate::new_atom_types(rxn);
  if (raw != nullptr) *raw = {std::string(fields[0]), reaction_class};
  return rxn;
}

Dataset ingest_text(std::string_view text, std::uint64_t seed) {
  Dataset ds;
  ds.seed = seed;
  std::size_t line_no = 0;
  for (const auto line : lines_of(text)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    try {
      ReactionLine raw;
      molgraph::Reaction rxn = parse_line(line, &raw);
      ds.entries.push_back({ds.entries.size(), std::move(raw.text), std::move(rxn), Split::kTrain});
    } catch (const std::exception& e) {
      ds.skipped.push_back("line " + std::to_string(line_no) + ": " + e.what());
      spdlog::warn("skipping {}", ds.skipped.back());
    }
  }
  if (ds.entries.empty()) throw DatasetError("no valid reactions");

  const std::size_t n = ds.entries.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  numcore::Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  const std::size_t n_train = n * 8 / 10;
  const std::size_t n_val = (n - n_train) / 2;
  for (std::size_t r = 0; r < n; ++r) {
    ds.entries[order[r]].split = r < n_train ? Split::kTrain
                                 : r < n_train + n_val ? Split::kVal
                                                       : Split::kTest;
  }
  build_vocabularies(ds);
  return ds;
}

Dataset ingest(const std::filesystem::path& path, std::uint64_t seed) {
  return ingest_text(read_file(path), seed);
}

std::string write_dataset(const Dataset& ds) {
  std::string out = "#retrograph-dataset\t1\n";
  out += "#seed\t" + std::to_string(ds.seed) + "\n";
  out += "#elements\t" + ds.elements.to_string() + "\n";
  out += "#atoms\t" + ds.atoms.to_string() + "\n";
  for (const auto& e : ds.entries) {
    out += std::to_string(e.id) + "\t" + std::string(to_string(e.split)) + "\t" + e.text + "\t" +
           std::to_string(e.reaction.reaction_class.value_or(0)) + "\n";
  }
  return out;
}

Dataset read_dataset(std::string_view text) {
  Dataset ds;
  bool have_header = false;
  for (const auto line : lines_of(text)) {
    if (line.empty()) continue;
    const auto f = fields_of(line);
    if (line.front() == '#') {
      if (f.size() != 2) throw DatasetError("bad header line");
      if (f[0] == "#retrograph-dataset") {
        if (f[1] != "1") throw DatasetError("unsupported dataset version " + std::string(f[1]));
        have_header = true;
      } else if (f[0] == "#seed") {
        ds.seed = parse_count(f[1]);
      } else if (f[0] == "#elements") {
        ds.elements = molgraph::ElementVocabulary::parse(f[1]);
      } else if (f[0] == "#atoms") {
        ds.atoms = translate::AtomVocabulary::parse(f[1]);
      } else {
        throw DatasetError("unknown header " + std::string(f[0]));
      }
      continue;
    }
    if (!have_header) throw DatasetError("not a dataset manifest");
    if (f.size() != 4) throw DatasetError("bad dataset line");
    DatasetEntry e;
    e.id = parse_count(f[0]);
    e.split = parse_split(f[1]);
    e.text = std::string(f[2]);
    e.reaction = parse_line(e.text + "\t" + std::string(f[3]));
    ds.entries.push_back(std::move(e));
  }
  if (!have_header) throw DatasetError("not a dataset manifest");
  return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError("cannot write " + path.string());
  out << write_dataset(dataset);
  if (!out) throw DatasetError("write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) { return read_dataset(read_file(path)); }

}  // namespace retrograph::pipeline
