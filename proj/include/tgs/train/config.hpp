#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tgs/sampler/sampler.hpp"

namespace tgs {

/// Ordered `key = value` pairs, as echoed in reports and effective-config blocks.
using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

struct TrainConfig {
  double lr = 0.01;
  double weight_decay = 5e-4;
  Index epochs = 200;
  Index layers = 2;
  Index hidden = 256;
  Index batch = 256;
  double alpha = 0.8;
  double dropout = 0.5;
  std::uint64_t seed = 0;

  // ablations
  bool no_negatives = false;
  bool no_mixup_augment = false;
  bool no_label_sd = false;
  NegativeKind negative_dist = NegativeKind::Uniform;

  Index negatives_per_endpoint = 1;
  bool filter_negative_collisions = false;
  bool decoupled_weight_decay = false;
  bool normalize_positive_term = false;
  bool normalize_features = true;
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;
  /// Cosine probe every this many epochs; 0 records only the initial and final probes.
  Index probe_interval = 0;

  /// α = 0 with label self-distillation off: plain cross-entropy MLP training.
  bool vanilla_mlp() const { return alpha == 0.0 && no_label_sd; }

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Applies one `key = value`; returns false for keys it does not own and
  /// throws ConfigError for unparsable values.
  bool set(const std::string& key, const std::string& value);
  ConfigEntries entries() const;
};

/// Parses `key = value` lines ('#' starts a comment, blank lines ignored).
/// Throws ConfigError on a line without '=' or a repeated key.
std::map<std::string, std::string> parse_key_values(const std::string& text);
/// parse_key_values on a file's contents; throws ConfigError if unreadable.
std::map<std::string, std::string> read_key_value_file(const std::string& path);

/// Renders entries as `key = value` lines.
std::string render_entries(const ConfigEntries& entries);

// Value parsers shared by the config structs; all throw ConfigError naming `key`.
double parse_double(const std::string& key, const std::string& value);
Index parse_index(const std::string& key, const std::string& value);
std::uint64_t parse_u64(const std::string& key, const std::string& value);
bool parse_bool(const std::string& key, const std::string& value);
std::string format_double(double v);

}  // namespace tgs
