#include "tgs/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace tgs {

namespace {

constexpr char kMagic[8] = {'T', 'G', 'S', 'C', 'K', 'P', 'T', '\0'};

class Writer {
 public:
  explicit Writer(std::ofstream& out) : out_(out) {}
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }

 private:
  void le(std::uint64_t v, int bytes) {
    char buf[8];
    for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out_.write(buf, bytes);
  }
  std::ofstream& out_;
};

class Reader {
 public:
  Reader(std::ifstream& in, std::string source) : in_(in), source_(std::move(source)) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string str() {
    const std::uint32_t n = u32();
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  void read(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw CheckpointError(source_ + ": truncated checkpoint");
  }

 private:
  std::uint64_t le(int bytes) {
    unsigned char buf[8];
    read(reinterpret_cast<char*>(buf), static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
  }
  std::ifstream& in_;
  std::string source_;
};

}  // namespace

const Matrix& Checkpoint::blob(const std::string& name) const {
  for (const auto& [n, m] : blobs)
    if (n == name) return m;
  throw CheckpointError("checkpoint has no blob '" + name + "'");
}

const std::string& Checkpoint::meta(const std::string& key) const {
  const auto it = metadata.find(key);
  if (it == metadata.end()) throw CheckpointError("checkpoint has no metadata '" + key + "'");
  return it->second;
}

void write_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot open " + path.string() + " for writing");
  out.write(kMagic, sizeof kMagic);
  Writer w(out);
  w.u32(Checkpoint::kVersion);
  w.str(ckpt.kind);
  w.u32(static_cast<std::uint32_t>(ckpt.metadata.size()));
  for (const auto& [k, v] : ckpt.metadata) {
    w.str(k);
    w.str(v);
  }
  w.u32(static_cast<std::uint32_t>(ckpt.blobs.size()));
  for (const auto& [name, m] : ckpt.blobs) {
    w.str(name);
    w.u64(m.rows());
    w.u64(m.cols());
    for (double v : m.values()) w.f64(v);
  }
  if (!out) throw CheckpointError("write failed: " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint not found: " + path.string());
  Reader r(in, path.string());
  char magic[8];
  r.read(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw CheckpointError(path.string() + ": bad magic");
  const std::uint32_t version = r.u32();
  if (version != Checkpoint::kVersion) {
    throw CheckpointError(path.string() + ": unsupported version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.kind = r.str();
  const std::uint32_t entries = r.u32();
  for (std::uint32_t i = 0; i < entries; ++i) {
    std::string k = r.str();
    ckpt.metadata[k] = r.str();
  }
  const std::uint32_t blobs = r.u32();
  for (std::uint32_t i = 0; i < blobs; ++i) {
    std::string name = r.str();
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    if (cols != 0 && rows > (std::uint64_t{1} << 40) / cols) throw CheckpointError(path.string() + ": blob too large");
    Matrix m(rows, cols);
    for (double& v : m.values()) v = r.f64();
    ckpt.blobs.emplace_back(std::move(name), std::move(m));
  }
  return ckpt;
}

Checkpoint to_checkpoint(const TgsParams& params) {
  Checkpoint c;
  c.kind = "tgs";
  c.metadata["input_dim"] = std::to_string(params.shape.input_dim);
  c.metadata["hidden_dim"] = std::to_string(params.shape.hidden_dim);
  c.metadata["num_classes"] = std::to_string(params.shape.num_classes);
  c.metadata["num_layers"] = std::to_string(params.shape.num_layers);
  if (!params.norms.empty()) {
    c.metadata["bn_momentum"] = std::to_string(std::bit_cast<std::uint64_t>(params.norms[0].momentum));
    c.metadata["bn_epsilon"] = std::to_string(std::bit_cast<std::uint64_t>(params.norms[0].epsilon));
  }
  for (const auto& ref : params.trainable()) c.blobs.emplace_back(ref.name, *ref.value);
  for (const auto& ref : params.buffers()) c.blobs.emplace_back(ref.name, *ref.value);
  return c;
}

TgsParams tgs_params_from(const Checkpoint& ckpt) {
  if (ckpt.kind != "tgs") throw CheckpointError("expected a tgs checkpoint, got '" + ckpt.kind + "'");
  const auto num = [&](const char* key) { return static_cast<Index>(std::stoull(ckpt.meta(key))); };
  ModelShape shape{num("input_dim"), num("hidden_dim"), num("num_classes"), num("num_layers")};
  const double momentum = std::bit_cast<double>(static_cast<std::uint64_t>(std::stoull(ckpt.meta("bn_momentum"))));
  const double epsilon = std::bit_cast<double>(static_cast<std::uint64_t>(std::stoull(ckpt.meta("bn_epsilon"))));
  Rng unused(0);
  TgsParams p = TgsParams::init(shape, unused, momentum, epsilon);
  auto load = [&](std::vector<ParamRef> refs) {
    for (auto& ref : refs) {
      const Matrix& m = ckpt.blob(ref.name);
      if (!m.same_shape(*ref.value)) throw CheckpointError("blob '" + ref.name + "' has the wrong shape");
      *ref.value = m;
    }
  };
  load(p.trainable());
  load(p.buffers());
  return p;
}

}  // namespace tgs
