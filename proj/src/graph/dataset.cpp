#include "tgs/graph/dataset.hpp"

#include <spdlog/spdlog.h>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace tgs {

const char* to_string(DatasetErrorKind kind) {
  switch (kind) {
    case DatasetErrorKind::MissingFile: return "missing file";
    case DatasetErrorKind::MalformedHeader: return "malformed header";
    case DatasetErrorKind::MalformedLine: return "malformed line";
    case DatasetErrorKind::LabelOutOfRange: return "label out of range";
    case DatasetErrorKind::FeatureRowMismatch: return "feature row mismatch";
    case DatasetErrorKind::DanglingEdge: return "dangling edge";
    case DatasetErrorKind::InvalidSplit: return "invalid split";
  }
  return "dataset error";
}

namespace {

namespace fs = std::filesystem;

std::ifstream open_text(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DatasetError(DatasetErrorKind::MissingFile, p.string());
  return in;
}

// Splits on whitespace; '#' starts a comment.
std::vector<std::string_view> tokens(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<std::string_view> out;
  Index i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    Index j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

struct Header {
  Index nodes = 0;
  Index features = 0;
  Index classes = 0;
};

Header read_header(const fs::path& dir) {
  auto in = open_text(dir / "header.txt");
  std::map<std::string, Index, std::less<>> kv;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    Index value = 0;
    if (tok.size() != 2 || !parse_number(tok[1], value)) {
      throw DatasetError(DatasetErrorKind::MalformedHeader, "header.txt line " + std::to_string(line_no));
    }
    kv[std::string(tok[0])] = value;
  }
  Header h;
  for (auto [key, slot] : {std::pair{"nodes", &h.nodes}, {"features", &h.features}, {"classes", &h.classes}}) {
    auto it = kv.find(key);
    if (it == kv.end()) throw DatasetError(DatasetErrorKind::MalformedHeader, std::string("missing key '") + key + "'");
    *slot = it->second;
  }
  if (h.nodes == 0 || h.features == 0 || h.classes == 0) {
    throw DatasetError(DatasetErrorKind::MalformedHeader, "nodes, features and classes must be positive");
  }
  return h;
}

double load_le_double(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  return std::bit_cast<double>(bits);
}

void store_le_double(double v, unsigned char* p) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) {
    p[b] = static_cast<unsigned char>(bits & 0xff);
    bits >>= 8;
  }
}

Matrix read_features_binary(const fs::path& p, const Header& h) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DatasetError(DatasetErrorKind::MissingFile, p.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<Index>(in.tellg());
  in.seekg(0);
  const Index row_bytes = h.features * 8;
  if (bytes % row_bytes != 0 || bytes / row_bytes != h.nodes) {
    throw DatasetError(DatasetErrorKind::FeatureRowMismatch,
                       p.filename().string() + " holds " + std::to_string(bytes) + " bytes; expected " +
                           std::to_string(h.nodes) + " rows of " + std::to_string(h.features) + " f64 values");
  }
  std::vector<unsigned char> raw(bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
  Matrix m(h.nodes, h.features);
  auto vals = m.values();
  for (Index k = 0; k < vals.size(); ++k) vals[k] = load_le_double(raw.data() + 8 * k);
  return m;
}

Matrix read_features_csv(const fs::path& p, const Header& h) {
  auto in = open_text(p);
  Matrix m(h.nodes, h.features);
  std::string line;
  Index row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (row >= h.nodes) {
      throw DatasetError(DatasetErrorKind::FeatureRowMismatch, "features.csv has more than " + std::to_string(h.nodes) + " rows");
    }
    Index col = 0;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      std::string_view cell = rest.substr(0, comma);
      while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) cell.remove_prefix(1);
      while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.remove_suffix(1);
      double v = 0.0;
      if (col >= h.features || !parse_number(cell, v)) {
        throw DatasetError(DatasetErrorKind::FeatureRowMismatch, "features.csv row " + std::to_string(row) +
                                                                     " does not hold " + std::to_string(h.features) +
                                                                     " numeric columns");
      }
      m(row, col++) = v;
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (col != h.features) {
      throw DatasetError(DatasetErrorKind::FeatureRowMismatch,
                         "features.csv row " + std::to_string(row) + " has " + std::to_string(col) + " columns");
    }
    ++row;
  }
  if (row != h.nodes) {
    throw DatasetError(DatasetErrorKind::FeatureRowMismatch,
                       "features.csv has " + std::to_string(row) + " rows, header says " + std::to_string(h.nodes));
  }
  return m;
}

std::vector<Edge> read_edges(const fs::path& p, Index nodes) {
  auto in = open_text(p);
  std::vector<Edge> edges;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    std::uint64_t u = 0, v = 0;
    if (tok.size() != 2 || !parse_number(tok[0], u) || !parse_number(tok[1], v)) {
      throw DatasetError(DatasetErrorKind::MalformedLine, "edges.txt line " + std::to_string(line_no));
    }
    if (u >= nodes || v >= nodes) {
      throw DatasetError(DatasetErrorKind::DanglingEdge, "edges.txt line " + std::to_string(line_no) + ": (" +
                                                             std::to_string(u) + "," + std::to_string(v) +
                                                             ") with " + std::to_string(nodes) + " nodes");
    }
    edges.push_back({static_cast<NodeId>(u), static_cast<NodeId>(v)});
  }
  return edges;
}

std::vector<Label> read_labels(const fs::path& p, const Header& h) {
  auto in = open_text(p);
  std::vector<Label> labels;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    Label y = 0;
    if (tok.size() != 1 || !parse_number(tok[0], y)) {
      throw DatasetError(DatasetErrorKind::MalformedLine, "labels.txt line " + std::to_string(line_no));
    }
    if (y < kUnlabeled || y >= static_cast<Label>(h.classes)) {
      throw DatasetError(DatasetErrorKind::LabelOutOfRange, "labels.txt line " + std::to_string(line_no) + ": " +
                                                                std::to_string(y) + " outside [0," +
                                                                std::to_string(h.classes) + ")");
    }
    labels.push_back(y);
  }
  if (labels.size() != h.nodes) {
    throw DatasetError(DatasetErrorKind::MalformedLine,
                       "labels.txt has " + std::to_string(labels.size()) + " entries, header says " + std::to_string(h.nodes));
  }
  return labels;
}

Mask read_mask(const fs::path& p, Index nodes) {
  auto in = open_text(p);
  Mask m(nodes, 0);
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tok = tokens(line);
    if (tok.empty()) continue;
    std::uint64_t v = 0;
    if (tok.size() != 1 || !parse_number(tok[0], v) || v >= nodes) {
      throw DatasetError(DatasetErrorKind::InvalidSplit, p.filename().string() + " line " + std::to_string(line_no));
    }
    m[v] = 1;
  }
  return m;
}

}  // namespace

GraphStore load_dataset(const std::filesystem::path& dir, BuildStats* stats) {
  if (!fs::is_directory(dir)) throw DatasetError(DatasetErrorKind::MissingFile, "dataset directory " + dir.string());
  const Header h = read_header(dir);

  const bool has_bin = fs::exists(dir / "features.bin");
  const bool has_csv = fs::exists(dir / "features.csv");
  if (!has_bin && !has_csv) throw DatasetError(DatasetErrorKind::MissingFile, (dir / "features.{bin,csv}").string());
  Matrix features = has_bin ? read_features_binary(dir / "features.bin", h) : read_features_csv(dir / "features.csv", h);

  const auto edges = read_edges(dir / "edges.txt", h.nodes);
  auto labels = read_labels(dir / "labels.txt", h);

  std::optional<SplitMasks> split;
  const int split_files =
      fs::exists(dir / "train.txt") + fs::exists(dir / "val.txt") + fs::exists(dir / "test.txt");
  if (split_files == 3) {
    split = SplitMasks{read_mask(dir / "train.txt", h.nodes), read_mask(dir / "val.txt", h.nodes),
                       read_mask(dir / "test.txt", h.nodes)};
  } else if (split_files != 0) {
    throw DatasetError(DatasetErrorKind::InvalidSplit, "split needs all of train.txt, val.txt and test.txt");
  }

  BuildStats local;
  GraphStore g = GraphStore::build(std::move(features), edges, std::move(labels), h.classes, std::move(split), &local);
  if (local.self_loops_dropped > 0) {
    spdlog::warn("{}: dropped {} self-loop edge(s)", dir.string(), local.self_loops_dropped);
  }
  if (stats != nullptr) *stats = local;
  return g;
}

void save_dataset(const GraphStore& g, const std::filesystem::path& dir, FeatureFormat format) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "header.txt");
    out << "# tgs graph dataset\n"
        << "nodes " << g.num_nodes() << "\nfeatures " << g.feature_dim() << "\nclasses " << g.num_classes() << "\n";
  }
  fs::remove(dir / "features.bin");
  fs::remove(dir / "features.csv");
  if (format == FeatureFormat::Binary) {
    std::ofstream out(dir / "features.bin", std::ios::binary);
    const auto vals = g.features().values();
    std::vector<unsigned char> raw(vals.size() * 8);
    for (Index k = 0; k < vals.size(); ++k) store_le_double(vals[k], raw.data() + 8 * k);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  } else {
    std::ofstream out(dir / "features.csv");
    char buf[32];
    for (Index i = 0; i < g.num_nodes(); ++i) {
      const auto r = g.features().row(i);
      for (Index j = 0; j < r.size(); ++j) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, r[j]);  // shortest round-trip form
        if (j > 0) out << ',';
        out.write(buf, end - buf);
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "edges.txt");
    for (const Edge& e : g.edge_list()) out << e.u << ' ' << e.v << '\n';
  }
  {
    std::ofstream out(dir / "labels.txt");
    for (Label y : g.labels()) out << y << '\n';
  }
  for (const char* name : {"train.txt", "val.txt", "test.txt"}) fs::remove(dir / name);
  if (g.has_split()) {
    const auto& s = g.split();
    for (auto [name, mask] : {std::pair{"train.txt", &s.train}, {"val.txt", &s.val}, {"test.txt", &s.test}}) {
      std::ofstream out(dir / name);
      for (NodeId v : mask_nodes(*mask)) out << v << '\n';
    }
  }
}

}  // namespace tgs
