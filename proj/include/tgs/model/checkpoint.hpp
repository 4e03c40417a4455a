#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tgs/model/params.hpp"

namespace tgs {

/// Missing, truncated or otherwise unreadable checkpoint file.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Byte layout (all integers little-endian):
///
///   8 bytes   magic "TGSCKPT\0"
///   u32       format version (1)
///   u32 + n   model kind ("tgs" or "gcn")
///   u32       metadata entry count, then per entry: u32+n key, u32+n value
///   u32       blob count, then per blob:
///               u32+n name, u64 rows, u64 cols, rows·cols f64 (row-major)
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  std::string kind;
  std::map<std::string, std::string> metadata;
  std::vector<std::pair<std::string, Matrix>> blobs;

  /// Throws CheckpointError when absent.
  const Matrix& blob(const std::string& name) const;
  const std::string& meta(const std::string& key) const;

  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Trainable parameters and batch-norm buffers under their TgsParams names,
/// plus shape and batch-norm settings as metadata.
Checkpoint to_checkpoint(const TgsParams& params);
/// Throws CheckpointError on a kind or shape mismatch.
TgsParams tgs_params_from(const Checkpoint& ckpt);

}  // namespace tgs
