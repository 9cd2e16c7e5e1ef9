#include "penet/point_cloud.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace penet {

void PointCloud::validate() const {
  if (points.empty()) throw EmptyCloudError("cloud '" + name + "' has no points");
  if (!normals.empty()) {
    if (normals.size() != points.size()) {
      throw DataError("cloud '" + name + "': " + std::to_string(normals.size()) + " normals for " +
                      std::to_string(points.size()) + " points");
    }
    for (std::size_t i = 0; i < normals.size(); ++i) {
      const Vec3& n = normals[i];
      const double len = std::sqrt(double(n.x) * n.x + double(n.y) * n.y + double(n.z) * n.z);
      if (std::abs(len - 1.0) > 1e-3) {
        throw DataError("cloud '" + name + "': normal " + std::to_string(i) + " has length " + std::to_string(len));
      }
    }
  }
  if (!part_labels.empty() && part_labels.size() != points.size()) {
    throw DataError("cloud '" + name + "': " + std::to_string(part_labels.size()) + " part labels for " +
                    std::to_string(points.size()) + " points");
  }
}

PointCloud PointCloud::subset(std::span<const std::size_t> indices) const {
  PointCloud out;
  out.class_label = class_label;
  out.name = name;
  out.points.reserve(indices.size());
  for (std::size_t i : indices) out.points.push_back(points.at(i));
  if (has_normals()) {
    out.normals.reserve(indices.size());
    for (std::size_t i : indices) out.normals.push_back(normals[i]);
  }
  if (has_part_labels()) {
    out.part_labels.reserve(indices.size());
    for (std::size_t i : indices) out.part_labels.push_back(part_labels[i]);
  }
  return out;
}

Tensor<float> PointCloud::features() const {
  if (points.empty()) throw EmptyCloudError("cloud '" + name + "' has no points");
  const std::size_t d = din();
  Tensor<float> out({points.size(), d});
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto r = out.row(i);
    r[0] = points[i].x;
    r[1] = points[i].y;
    r[2] = points[i].z;
    if (d == 6) {
      r[3] = normals[i].x;
      r[4] = normals[i].y;
      r[5] = normals[i].z;
    }
  }
  return out;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <typename F>
void for_each_line(std::string_view text, F&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    fn(text.substr(pos, end - pos), line_no);
    pos = end + 1;
  }
}

float parse_float(std::string_view tok, const std::string& source, std::size_t line_no) {
  float v = 0.f;
  const char* first = tok.data();
  if (!tok.empty() && tok.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError(source + ":" + std::to_string(line_no) + ": invalid number '" + std::string(tok) + "'");
  }
  return v;
}

}  // namespace

PointCloud parse_cloud_text(std::string_view text, const std::string& source) {
  PointCloud cloud;
  cloud.name = source;
  std::size_t columns = 0;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto tokens = split_ws(line);
    if (tokens.empty()) return;
    if (tokens.size() != 3 && tokens.size() != 6) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected 3 or 6 columns, got " +
                       std::to_string(tokens.size()));
    }
    if (columns == 0) columns = tokens.size();
    if (tokens.size() != columns) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": ragged row with " + std::to_string(tokens.size()) +
                       " columns (previous rows have " + std::to_string(columns) + ")");
    }
    float v[6];
    for (std::size_t c = 0; c < tokens.size(); ++c) v[c] = parse_float(tokens[c], source, line_no);
    cloud.points.push_back({v[0], v[1], v[2]});
    if (columns == 6) cloud.normals.push_back({v[3], v[4], v[5]});
  });
  if (cloud.points.empty()) throw EmptyCloudError(source + ": cloud has no points");
  return cloud;
}

std::vector<int> parse_seg_text(std::string_view text, const std::string& source) {
  std::vector<int> labels;
  for_each_line(text, [&](std::string_view line, std::size_t line_no) {
    const auto tokens = split_ws(line);
    if (tokens.empty()) return;
    int v = 0;
    auto [ptr, ec] = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), v);
    if (tokens.size() != 1 || ec != std::errc() || ptr != tokens[0].data() + tokens[0].size() || v < 0) {
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected one non-negative integer label");
    }
    labels.push_back(v);
  });
  return labels;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

PointCloud load_cloud_text(const std::filesystem::path& path, const std::optional<std::filesystem::path>& seg_path) {
  PointCloud cloud = parse_cloud_text(read_text_file(path), path.string());
  std::filesystem::path seg = seg_path ? *seg_path : std::filesystem::path(path).replace_extension(".seg");
  if (seg_path || std::filesystem::exists(seg)) {
    cloud.part_labels = parse_seg_text(read_text_file(seg), seg.string());
    if (cloud.part_labels.size() != cloud.points.size()) {
      throw DataError(seg.string() + ": " + std::to_string(cloud.part_labels.size()) + " labels for " +
                      std::to_string(cloud.points.size()) + " points in " + path.string());
    }
  }
  cloud.validate();
  return cloud;
}

namespace {

void append_float(std::string& out, float v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

std::string format_cloud_text(const PointCloud& cloud) {
  std::string out;
  out.reserve(cloud.size() * (cloud.has_normals() ? 72 : 36));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    append_float(out, p.x);
    out += ' ';
    append_float(out, p.y);
    out += ' ';
    append_float(out, p.z);
    if (cloud.has_normals()) {
      const Vec3& n = cloud.normals[i];
      out += ' ';
      append_float(out, n.x);
      out += ' ';
      append_float(out, n.y);
      out += ' ';
      append_float(out, n.z);
    }
    out += '\n';
  }
  return out;
}

std::string format_seg_text(std::span<const int> labels) {
  std::string out;
  for (int l : labels) {
    out += std::to_string(l);
    out += '\n';
  }
  return out;
}

}  // namespace penet
