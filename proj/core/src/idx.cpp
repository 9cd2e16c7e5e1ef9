#include "penet/idx.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <string>

#include "penet/rng.hpp"

namespace penet {
namespace {

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> bytes, const char* what) : bytes_(bytes), what_(what) {}

  std::uint32_t u32be(const char* field) {
    need(4, field);
    const std::uint32_t v = (std::uint32_t{bytes_[pos_]} << 24) | (std::uint32_t{bytes_[pos_ + 1]} << 16) |
                            (std::uint32_t{bytes_[pos_ + 2]} << 8) | std::uint32_t{bytes_[pos_ + 3]};
    pos_ += 4;
    return v;
  }

  std::span<const std::uint8_t> take(std::size_t n, const char* field) {
    need(n, field);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t offset() const { return pos_; }

 private:
  void need(std::size_t n, const char* field) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(std::string(what_) + ": truncated reading " + field + " at byte offset " +
                        std::to_string(pos_) + " (file has " + std::to_string(bytes_.size()) + " bytes)");
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  const char* what_;
};

std::string hex32(std::uint32_t v) {
  char buf[11];
  std::snprintf(buf, sizeof(buf), "0x%08x", v);
  return buf;
}

void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

std::vector<IdxImage> parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels) {
  ByteReader img(images, "IDX images");
  const std::uint32_t magic = img.u32be("magic");
  if (magic != kIdxImageMagic) {
    throw FormatError("IDX images: bad magic " + hex32(magic) + " at byte offset 0 (expected 0x00000803)");
  }
  const std::uint32_t count = img.u32be("image count");
  const std::uint32_t rows = img.u32be("row count");
  const std::uint32_t cols = img.u32be("column count");
  if (rows == 0 || cols == 0) throw FormatError("IDX images: zero image dimension at byte offset 8");

  ByteReader lab(labels, "IDX labels");
  const std::uint32_t lmagic = lab.u32be("magic");
  if (lmagic != kIdxLabelMagic) {
    throw FormatError("IDX labels: bad magic " + hex32(lmagic) + " at byte offset 0 (expected 0x00000801)");
  }
  const std::uint32_t lcount = lab.u32be("label count");
  if (lcount != count) {
    throw FormatError("IDX: " + std::to_string(count) + " images but " + std::to_string(lcount) +
                      " labels (label count at byte offset 4)");
  }

  std::vector<IdxImage> out(count);
  const std::size_t pixels = std::size_t{rows} * cols;
  for (std::uint32_t i = 0; i < count; ++i) {
    auto px = img.take(pixels, "pixels");
    out[i].rows = rows;
    out[i].cols = cols;
    out[i].pixels.assign(px.begin(), px.end());
    out[i].label = lab.take(1, "label")[0];
  }
  return out;
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<IdxImage> load_idx_images(const std::filesystem::path& images_path,
                                      const std::filesystem::path& labels_path) {
  return parse_idx(read_binary_file(images_path), read_binary_file(labels_path));
}

std::vector<std::uint8_t> encode_idx_images(std::span<const IdxImage> images) {
  std::vector<std::uint8_t> out;
  put_u32be(out, kIdxImageMagic);
  put_u32be(out, static_cast<std::uint32_t>(images.size()));
  put_u32be(out, static_cast<std::uint32_t>(images.empty() ? 0 : images[0].rows));
  put_u32be(out, static_cast<std::uint32_t>(images.empty() ? 0 : images[0].cols));
  for (const auto& im : images) out.insert(out.end(), im.pixels.begin(), im.pixels.end());
  return out;
}

std::vector<std::uint8_t> encode_idx_labels(std::span<const IdxImage> images) {
  std::vector<std::uint8_t> out;
  put_u32be(out, kIdxLabelMagic);
  put_u32be(out, static_cast<std::uint32_t>(images.size()));
  for (const auto& im : images) out.push_back(static_cast<std::uint8_t>(im.label));
  return out;
}

PointCloud mnist_to_pointcloud(const IdxImage& image, std::size_t n_points, std::uint64_t seed) {
  std::vector<std::size_t> lit;
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    if (image.pixels[i] != 0) lit.push_back(i);
  }
  if (lit.empty()) throw EmptyCloudError("MNIST image has no non-zero pixels");
  if (n_points == 0) throw SamplingError("mnist_to_pointcloud: n_points must be positive");

  const double cx = (static_cast<double>(image.cols) - 1.0) / 2.0;
  const double cy = (static_cast<double>(image.rows) - 1.0) / 2.0;
  Rng rng(seed);
  PointCloud cloud;
  cloud.class_label = image.label;
  cloud.points.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const std::size_t px = lit[rng.below(lit.size())];
    const double r = static_cast<double>(px / image.cols);
    const double c = static_cast<double>(px % image.cols);
    float z;
    do {
      z = static_cast<float>(rng.uniform_open(-kMnistDepthNoise, kMnistDepthNoise));
    } while (z <= -kMnistDepthNoise || z >= kMnistDepthNoise);
    cloud.points.push_back({static_cast<float>((c - cx) / cx), static_cast<float>((cy - r) / cy), z});
  }
  return cloud;
}

}  // namespace penet
