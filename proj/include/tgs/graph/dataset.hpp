#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "tgs/graph/graph_store.hpp"

namespace tgs {

enum class DatasetErrorKind {
  MissingFile,
  MalformedHeader,
  MalformedLine,
  LabelOutOfRange,
  FeatureRowMismatch,
  DanglingEdge,
  InvalidSplit,
};

const char* to_string(DatasetErrorKind kind);

class DatasetError : public std::runtime_error {
 public:
  DatasetError(DatasetErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  DatasetErrorKind kind() const { return kind_; }

 private:
  DatasetErrorKind kind_;
};

enum class FeatureFormat { Binary, Csv };

/// Loads a dataset directory (layout documented in docs/dataset_format.md):
///   header.txt                      `nodes N`, `features d`, `classes C`
///   features.bin | features.csv     N×d reals (f64 little-endian, or CSV rows)
///   edges.txt                       one `u v` pair per line
///   labels.txt                      N class ids, -1 for unknown
///   train.txt val.txt test.txt      optional node-id lists (all or none)
GraphStore load_dataset(const std::filesystem::path& dir, BuildStats* stats = nullptr);

/// Writes `g` in the layout above; split files only when g has a split.
void save_dataset(const GraphStore& g, const std::filesystem::path& dir, FeatureFormat format = FeatureFormat::Binary);

}  // namespace tgs
