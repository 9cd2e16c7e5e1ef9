#include "penet/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <string>

#include "penet/idx.hpp"

namespace penet {
namespace {

constexpr char kMagic[6] = {'P', 'E', 'N', 'E', 'T', '1'};

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  std::uint32_t u32(const std::string& field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{b_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string str(const std::string& field) {
    const std::uint32_t n = u32(field + " length");
    need(n, field);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  float f32(const std::string& field) { return std::bit_cast<float>(u32(field)); }
  std::span<const std::uint8_t> take(std::size_t n, const std::string& field) {
    need(n, field);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == b_.size(); }
  std::size_t offset() const { return pos_; }

 private:
  void need(std::size_t n, const std::string& field) const {
    if (b_.size() - pos_ < n) {
      throw FormatError("checkpoint truncated while reading " + field + " at byte offset " + std::to_string(pos_));
    }
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

std::string join(const std::vector<std::string>& names) {
  std::string s;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) s += ',';
    s += names[i];
  }
  return s;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = s.find(',', pos);
    out.push_back(s.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

std::uint64_t parse_u64(const std::map<std::string, std::string>& meta, const std::string& key) {
  auto it = meta.find(key);
  if (it == meta.end()) throw FormatError("checkpoint metadata missing field '" + key + "'");
  std::uint64_t v = 0;
  const auto& s = it->second;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw FormatError("checkpoint metadata field '" + key + "' is not an integer: '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const PeNet<float>& model) {
  const ModelConfig& cfg = model.config();
  Writer w;
  w.raw(kMagic, sizeof(kMagic));
  w.u32(kCheckpointVersion);

  const std::vector<std::pair<std::string, std::string>> meta = {
      {"task", std::string(to_string(cfg.task))},
      {"din", std::to_string(cfg.din)},
      {"k", std::to_string(cfg.k)},
      {"g", std::to_string(cfg.grid())},
      {"encoder_depth", std::to_string(cfg.encoder_depth)},
      {"num_classes", std::to_string(cfg.num_classes)},
      {"num_parts", std::to_string(cfg.num_parts)},
      {"train_points", std::to_string(cfg.train_points)},
      {"class_names", join(cfg.class_names)},
  };
  w.u32(static_cast<std::uint32_t>(meta.size()));
  for (const auto& [k, v] : meta) {
    w.str(k);
    w.str(v);
  }

  const auto params = model.params();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const Param<float>* p : params) {
    w.str(p->name);
    w.u32(static_cast<std::uint32_t>(p->value.rank()));
    for (std::size_t d : p->value.shape()) w.u32(static_cast<std::uint32_t>(d));
    for (float v : p->value.data()) w.f32(v);
  }
  return w.take();
}

PeNet<float> deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto magic = r.take(sizeof(kMagic), "magic");
  if (!std::equal(magic.begin(), magic.end(), kMagic)) throw FormatError("checkpoint has bad magic (expected PENET1)");
  const std::uint32_t version = r.u32("version");
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                      std::to_string(kCheckpointVersion) + ")");
  }

  std::map<std::string, std::string> meta;
  const std::uint32_t n_meta = r.u32("metadata count");
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string key = r.str("metadata key");
    std::string value = r.str("metadata value for '" + key + "'");
    if (!meta.emplace(key, std::move(value)).second) throw FormatError("checkpoint metadata repeats '" + key + "'");
  }

  ModelConfig cfg;
  auto task = meta.find("task");
  if (task == meta.end()) throw FormatError("checkpoint metadata missing field 'task'");
  try {
    cfg.task = parse_task(task->second);
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint metadata field 'task': ") + e.what());
  }
  cfg.din = parse_u64(meta, "din");
  cfg.k = parse_u64(meta, "k");
  cfg.encoder_depth = static_cast<int>(parse_u64(meta, "encoder_depth"));
  cfg.num_classes = parse_u64(meta, "num_classes");
  cfg.num_parts = parse_u64(meta, "num_parts");
  cfg.train_points = parse_u64(meta, "train_points");
  if (auto it = meta.find("class_names"); it != meta.end()) cfg.class_names = split_names(it->second);

  std::optional<PeNet<float>> model;
  try {
    model.emplace(cfg);
  } catch (const Error& e) {
    throw FormatError(std::string("checkpoint metadata describes an invalid model: ") + e.what());
  }
  if (parse_u64(meta, "g") != cfg.grid()) throw FormatError("checkpoint metadata field 'g' disagrees with k");

  std::map<std::string, Param<float>*> by_name;
  for (Param<float>* p : model->params()) by_name.emplace(p->name, p);

  std::set<std::string> seen;
  const std::uint32_t n_arrays = r.u32("array count");
  for (std::uint32_t i = 0; i < n_arrays; ++i) {
    const std::string name = r.str("array name");
    auto it = by_name.find(name);
    if (it == by_name.end()) throw FormatError("checkpoint array '" + name + "' is not part of the architecture");
    if (!seen.insert(name).second) throw FormatError("checkpoint array '" + name + "' appears twice");
    const std::uint32_t rank = r.u32("rank of '" + name + "'");
    Shape shape;
    for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(r.u32("dims of '" + name + "'"));
    Param<float>& p = *it->second;
    if (shape != p.value.shape()) {
      throw FormatError("checkpoint array '" + name + "' has shape " + to_string(shape) + ", architecture expects " +
                        to_string(p.value.shape()));
    }
    auto payload = r.take(p.value.size() * 4, "payload of '" + name + "'");
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= std::uint32_t{payload[j * 4 + b]} << (8 * b);
      p.value[j] = std::bit_cast<float>(bits);
    }
  }
  for (const auto& [name, p] : by_name) {
    if (!seen.count(name)) throw FormatError("checkpoint is missing required array '" + name + "'");
  }
  if (!r.done()) throw FormatError("checkpoint has trailing bytes at offset " + std::to_string(r.offset()));
  return std::move(*model);
}

void save_checkpoint(const PeNet<float>& model, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for checkpoint '" + path.string() + "'");
}

PeNet<float> load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_binary_file(path));
}

}  // namespace penet
