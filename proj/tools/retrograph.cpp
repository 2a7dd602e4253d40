//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "retrograph/molgraph/canonical.hpp"
#include "retrograph/molgraph/smiles.hpp"
#include "retrograph/pipeline/evaluate.hpp"

namespace {

using namespace retrograph;
using pipeline::RunConfig;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool class_known = false;
  std::optional<std::size_t> centers_k;
  std::optional<std::size_t> samples;
  std::vector<std::string> overrides;
  bool quiet = false;
};

RunConfig resolve(const Globals& g) {
  RunConfig c = g.config_path.empty() ? RunConfig{} : pipeline::load_config(g.config_path);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw pipeline::ConfigError("--set expects key=value, got " + kv);
    pipeline::set_value(c, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) c.seed = *g.seed;
  if (g.class_known) c.class_known = true;
  if (g.centers_k) c.centers_k = *g.centers_k;
  if (g.samples) c.samples = *g.samples;
  return c;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

pipeline::Split parse_split_arg(const std::string& s) { return pipeline::parse_split(s); }

void report_evaluation(const pipeline::Evaluation& e, const std::string& predictions,
                       const std::string& metrics) {
  std::cout << pipeline::format_table(e.table);
  std::cout << "decoded molecules: " << e.decoded << ", dropped as invalid: " << e.invalid << "\n";
  if (!predictions.empty()) write_text(predictions, pipeline::prediction_jsonl(e.records));
  if (!metrics.empty()) write_text(metrics, pipeline::table_jsonl(e.table));
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("retrograph"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"retrograph: template-free retrosynthesis"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "run seed (overrides the config)");
  app.add_flag("--class-known", g.class_known, "condition both models on the reaction class");
  app.add_option("--centers-k", g.centers_k, "center hypotheses per product");
  app.add_option("--samples", g.samples, "latent draws per synthon");
  app.add_option("--set", g.overrides, "extra config entry key=value (repeatable)");
  app.add_flag("-q,--quiet", g.quiet, "only warnings and errors on stderr");

  std::string data_path, dataset_path, out_path, resume_path, center_path, translate_path;
  std::string split_name = "test", predictions_path, metrics_path, product, input_path;
  int reaction_class = 0;

  auto* ingest = app.add_subcommand("ingest", "parse a reaction file into a split dataset manifest");
  ingest->add_option("data", data_path, "reaction file")->required()->check(CLI::ExistingFile);
  ingest->add_option("-o,--out", out_path, "dataset manifest to write")->required();

  auto* train_center = app.add_subcommand("train-center", "train the reaction center model");
  auto* train_translate = app.add_subcommand("train-translate", "train the synthon translation model");
  for (auto* sub : {train_center, train_translate}) {
    sub->add_option("--dataset", dataset_path, "dataset manifest")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_path, "checkpoint to write")->required();
    sub->add_option("--resume", resume_path, "continue from this checkpoint")->check(CLI::ExistingFile);
  }

  auto* predict = app.add_subcommand("predict", "rank reactant sets for products");
  predict->add_option("--center", center_path, "center checkpoint")->required()->check(CLI::ExistingFile);
  predict->add_option("--translate", translate_path, "translation checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  auto* product_opt = predict->add_option("--product", product, "product SMILES");
  auto* input_opt = predict->add_option("--input", input_path, "file of products, one per line, optional TAB class")
                        ->check(CLI::ExistingFile);
  product_opt->excludes(input_opt);
  predict->add_option("--class", reaction_class, "reaction class 1..10 for --product")
      ->check(CLI::Range(0, molgraph::kReactionClasses));
  predict->add_option("-o,--out", predictions_path, "prediction records (default stdout)");

  auto* eval = app.add_subcommand("eval", "end-to-end top-k exact match");
  auto* eval_center = app.add_subcommand("eval-center", "center top-k accuracy");
  auto* eval_translate = app.add_subcommand("eval-translate", "translation top-k from true centers");
  for (auto* sub : {eval, eval_center, eval_translate}) {
    sub->add_option("--dataset", dataset_path, "dataset manifest")->required()->check(CLI::ExistingFile);
    sub->add_option("--split", split_name, "train, val or test")
        ->check(CLI::IsMember({"train", "val", "test"}));
    sub->add_option("--metrics", metrics_path, "metric records to write");
  }
  for (auto* sub : {eval, eval_center}) {
    sub->add_option("--center", center_path, "center checkpoint")->required()->check(CLI::ExistingFile);
  }
  for (auto* sub : {eval, eval_translate}) {
    sub->add_option("--translate", translate_path, "translation checkpoint")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--predictions", predictions_path, "prediction records to write");
  }

  auto* inspect = app.add_subcommand("inspect-checkpoint", "print checkpoint metadata and tensors");
  inspect->add_option("checkpoint", center_path, "checkpoint file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);
  if (g.quiet) spdlog::set_level(spdlog::level::warn);

  try {
    const RunConfig config = resolve(g);

    if (*ingest) {
      const auto ds = pipeline::ingest(data_path, config.seed);
      pipeline::save_dataset(out_path, ds);
      spdlog::info("{} reactions ({} train, {} val, {} test), {} skipped", ds.entries.size(),
                   ds.split(pipeline::Split::kTrain).size(), ds.split(pipeline::Split::kVal).size(),
                   ds.split(pipeline::Split::kTest).size(), ds.skipped.size());
      spdlog::info("elements {} | new-atom types {}", ds.elements.to_string(), ds.atoms.to_string());
    } else if (*train_center) {
      const auto ds = pipeline::load_dataset(dataset_path);
      auto stage = resume_path.empty() ? pipeline::make_center_stage(ds.elements, config)
                                       : pipeline::load_center(resume_path, config);
      pipeline::check_vocabulary(stage, ds);
      pipeline::train_center_stage(stage, ds, config, [](const center::CenterEpoch& e) {
        spdlog::info("epoch {:4d}  loss {:.6f}  val top-1 {:.3f}", e.epoch + 1, e.loss, e.topk[0]);
      });
      pipeline::save_checkpoint(out_path, stage, config);
    } else if (*train_translate) {
      const auto ds = pipeline::load_dataset(dataset_path);
      auto stage = resume_path.empty()
                       ? pipeline::make_translate_stage(ds.elements, ds.atoms, config)
                       : pipeline::load_translate(resume_path, config);
      pipeline::check_vocabulary(stage, ds);
      pipeline::train_translate_stage(stage, ds, config, [](const translate::TranslateEpoch& e) {
        spdlog::info("epoch {:4d}  loss {:.6f}", e.epoch + 1, e.loss);
      });
      pipeline::save_checkpoint(out_path, stage, config);
    } else if (*predict) {
      if (product.empty() && input_path.empty()) throw CLI::ValidationError("give --product or --input");
      const auto center = pipeline::load_center(center_path, config);
      const auto translate = pipeline::load_translate(translate_path, config);
      std::vector<std::pair<std::string, int>> queries;
      if (!product.empty()) {
        queries.emplace_back(product, reaction_class);
      } else {
        std::ifstream in(input_path);
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty() || line[0] == '#') continue;
          const auto tab = line.find('\t');
          queries.emplace_back(line.substr(0, tab),
                               tab == std::string::npos ? 0 : std::stoi(line.substr(tab + 1)));
        }
      }
      std::vector<pipeline::PredictionRecord> records;
      for (std::size_t i = 0; i < queries.size(); ++i) {
        pipeline::PredictionRecord r;
        r.id = i;
        r.product = queries[i].first;
        try {
          const auto mol = molgraph::parse_smiles(queries[i].first);
          r.product = molgraph::write_canonical(mol);
          const std::optional<int> cls =
              config.class_known && queries[i].second > 0 ? std::optional<int>(queries[i].second)
                                                           : std::nullopt;
          r.prediction = pipeline::predict(center, translate, mol, cls, config, i);
        } catch (const std::invalid_argument& e) {
          r.prediction.diagnostic = e.what();
          spdlog::warn("product {}: {}", i, e.what());
        }
        records.push_back(std::move(r));
      }
      write_text(predictions_path, pipeline::prediction_jsonl(records));
    } else if (*eval || *eval_translate) {
      const auto ds = pipeline::load_dataset(dataset_path);
      const auto translate = pipeline::load_translate(translate_path, config);
      pipeline::check_vocabulary(translate, ds);
      const pipeline::Split split = parse_split_arg(split_name);
      if (*eval) {
        const auto center = pipeline::load_center(center_path, config);
        pipeline::check_vocabulary(center, ds);
        report_evaluation(pipeline::evaluate_topk(center, translate, ds, split, config),
                          predictions_path, metrics_path);
      } else {
        report_evaluation(pipeline::evaluate_translation_topk(translate, ds, split, config),
                          predictions_path, metrics_path);
      }
    } else if (*eval_center) {
      const auto ds = pipeline::load_dataset(dataset_path);
      const auto center = pipeline::load_center(center_path, config);
      pipeline::check_vocabulary(center, ds);
      const auto table = pipeline::evaluate_center_topk(center, ds, parse_split_arg(split_name), config);
      std::cout << pipeline::format_table(table);
      if (!metrics_path.empty()) write_text(metrics_path, pipeline::table_jsonl(table));
    } else if (*inspect) {
      const auto c = numcore::load_container(center_path);
      for (const auto& [key, value] : c.metadata) {
        if (key == "config") {
          std::cout << "config:\n";
          std::string line;
          std::istringstream lines(value);
          while (std::getline(lines, line)) std::cout << "  " << line << "\n";
        } else {
          std::cout << key << ": " << value << "\n";
        }
      }
      std::size_t scalars = 0;
      for (const auto& [name, t] : c.tensors) {
        std::printf("  %-40s %5zu x %-5zu\n", name.c_str(), t.rows(), t.cols());
        scalars += t.size();
      }
      std::cout << c.tensors.size() << " tensors, " << scalars << " scalars\n";
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
