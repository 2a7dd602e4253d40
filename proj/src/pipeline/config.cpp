//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/pipeline/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "retrograph/numcore/container.hpp"

namespace retrograph::pipeline {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ConfigError("bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("bad value '" + std::string(text) + "' for " + std::string(key) + " (want true or false)");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
  bool shapes_model;
};

template <typename T>
Field count_field(T RunConfig::*member, bool shapes_model, bool positive = true) {
  return {[member, positive](RunConfig& c, std::string_view v) {
            const T value = parse_number<T>("value", v);
            if (positive && value == 0) throw ConfigError("value must be positive");
            c.*member = value;
          },
          [member](const RunConfig& c) { return std::to_string(c.*member); }, shapes_model};
}

Field real_field(double RunConfig::*member, bool shapes_model) {
  return {[member](RunConfig& c, std::string_view v) { c.*member = parse_number<double>("value", v); },
          [member](const RunConfig& c) { return format_double(c.*member); }, shapes_model};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = {
      {"layers", count_field(&RunConfig::layers, true)},
      {"width", count_field(&RunConfig::width, true)},
      {"latent", count_field(&RunConfig::latent, true)},
      {"class_width", count_field(&RunConfig::class_width, true)},
      {"lambda", real_field(&RunConfig::lambda, false)},
      {"learning_rate", real_field(&RunConfig::learning_rate, false)},
      {"batch_size", count_field(&RunConfig::batch_size, false)},
      {"epochs", count_field(&RunConfig::epochs, false, false)},
      {"beam", count_field(&RunConfig::beam, false)},
      {"max_steps", count_field(&RunConfig::max_steps, false)},
      {"threshold", real_field(&RunConfig::threshold, false)},
      {"centers_k", count_field(&RunConfig::centers_k, false)},
      {"samples", count_field(&RunConfig::samples, false)},
      {"mc_traces", count_field(&RunConfig::mc_traces, false)},
      {"trace_cap", count_field(&RunConfig::trace_cap, false)},
      {"class_known",
       {[](RunConfig& c, std::string_view v) { c.class_known = parse_bool("class_known", v); },
        [](const RunConfig& c) { return std::string(c.class_known ? "true" : "false"); }, true}},
      {"seed", count_field(&RunConfig::seed, false, false)},
  };
  return table;
}

void validate(const RunConfig& c) {
  if (c.lambda < 1.0) throw ConfigError("lambda must be at least 1");
  if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw ConfigError("threshold must lie in (0, 1)");
}

}  // namespace

void set_value(RunConfig& config, std::string_view key, std::string_view value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown config key '" + std::string(key) + "'");
  try {
    it->second.set(config, trim(value));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": repeated key '" + std::string(key) + "'");
    }
    try {
      set_value(base, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  validate(base);
  return base;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_text(const RunConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(config) + "\n";
  return out;
}

std::string model_hash(const RunConfig& config) {
  std::string shaped;
  for (const auto& [key, field] : fields()) {
    if (field.shapes_model) shaped += key + "=" + field.get(config) + ";";
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(numcore::fnv1a64(shaped)));
  return buf;
}

center::CenterConfig center_config(const RunConfig& config) {
  center::CenterConfig c;
  c.encoder = {config.layers, config.width};
  c.class_conditioned = config.class_known;
  c.class_width = config.class_width;
  c.lambda = config.lambda;
  c.threshold = config.threshold;
  return c;
}

translate::TranslateConfig translate_config(const RunConfig& config) {
  translate::TranslateConfig c;
  c.encoder = {config.layers, config.width};
  c.latent = config.latent;
  c.class_conditioned = config.class_known;
  c.class_width = config.class_width;
  c.mc_traces = config.mc_traces;
  return c;
}

}  // namespace retrograph::pipeline
