#include "tgs/train/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tgs/error.hpp"

namespace tgs {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos == value.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + value + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  if (!value.empty() && std::all_of(value.begin(), value.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    try {
      return std::stoull(value);
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
}

Index parse_index(const std::string& key, const std::string& value) { return parse_u64(key, value); }

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::string format_double(double v) { return fmt::format("{}", v); }

void TrainConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (weight_decay < 0.0) throw ConfigError("weight_decay must be >= 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (hidden < 1) throw ConfigError("hidden must be >= 1");
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must lie in [0, 1)");
  if (negatives_per_endpoint < 1) throw ConfigError("negatives_per_endpoint must be >= 1");
  if (!(bn_momentum > 0.0 && bn_momentum <= 1.0)) throw ConfigError("bn_momentum must lie in (0, 1]");
  if (!(bn_epsilon > 0.0)) throw ConfigError("bn_epsilon must be > 0");
}

bool TrainConfig::set(const std::string& key, const std::string& value) {
  if (key == "lr") lr = parse_double(key, value);
  else if (key == "weight_decay") weight_decay = parse_double(key, value);
  else if (key == "epochs") epochs = parse_index(key, value);
  else if (key == "layers") layers = parse_index(key, value);
  else if (key == "hidden") hidden = parse_index(key, value);
  else if (key == "batch") batch = parse_index(key, value);
  else if (key == "alpha") alpha = parse_double(key, value);
  else if (key == "dropout") dropout = parse_double(key, value);
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "no_negatives") no_negatives = parse_bool(key, value);
  else if (key == "no_mixup_augment") no_mixup_augment = parse_bool(key, value);
  else if (key == "no_label_sd") no_label_sd = parse_bool(key, value);
  else if (key == "negative_dist") {
    if (value == "uniform") negative_dist = NegativeKind::Uniform;
    else if (value == "degree") negative_dist = NegativeKind::Degree;
    else throw ConfigError("negative_dist: expected uniform or degree, got '" + value + "'");
  } else if (key == "negatives_per_endpoint") negatives_per_endpoint = parse_index(key, value);
  else if (key == "filter_negative_collisions") filter_negative_collisions = parse_bool(key, value);
  else if (key == "decoupled_weight_decay") decoupled_weight_decay = parse_bool(key, value);
  else if (key == "normalize_positive_term") normalize_positive_term = parse_bool(key, value);
  else if (key == "normalize_features") normalize_features = parse_bool(key, value);
  else if (key == "bn_momentum") bn_momentum = parse_double(key, value);
  else if (key == "bn_epsilon") bn_epsilon = parse_double(key, value);
  else if (key == "probe_interval") probe_interval = parse_index(key, value);
  else return false;
  return true;
}

ConfigEntries TrainConfig::entries() const {
  return {
      {"lr", format_double(lr)},
      {"weight_decay", format_double(weight_decay)},
      {"epochs", std::to_string(epochs)},
      {"layers", std::to_string(layers)},
      {"hidden", std::to_string(hidden)},
      {"batch", std::to_string(batch)},
      {"alpha", format_double(alpha)},
      {"dropout", format_double(dropout)},
      {"seed", std::to_string(seed)},
      {"no_negatives", bool_text(no_negatives)},
      {"no_mixup_augment", bool_text(no_mixup_augment)},
      {"no_label_sd", bool_text(no_label_sd)},
      {"negative_dist", negative_dist == NegativeKind::Uniform ? "uniform" : "degree"},
      {"negatives_per_endpoint", std::to_string(negatives_per_endpoint)},
      {"filter_negative_collisions", bool_text(filter_negative_collisions)},
      {"decoupled_weight_decay", bool_text(decoupled_weight_decay)},
      {"normalize_positive_term", bool_text(normalize_positive_term)},
      {"normalize_features", bool_text(normalize_features)},
      {"bn_momentum", format_double(bn_momentum)},
      {"bn_epsilon", format_double(bn_epsilon)},
      {"probe_interval", std::to_string(probe_interval)},
  };
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, trim(line.substr(eq + 1))).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    }
  }
  return out;
}

std::map<std::string, std::string> read_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

std::string render_entries(const ConfigEntries& entries) {
  std::string out;
  for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
  return out;
}

}  // namespace tgs
