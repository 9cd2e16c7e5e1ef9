#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "penet/tensor.hpp"

namespace penet {

struct Vec3 {
  float x = 0.f;
  float y = 0.f;
  float z = 0.f;
  bool operator==(const Vec3&) const = default;
};

/// Unordered set of 3D points with optional normals and labels.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;    // empty, or one per point
  std::vector<int> part_labels; // empty, or one per point
  std::optional<int> class_label;
  std::string name;             // provenance for error messages

  std::size_t size() const noexcept { return points.size(); }
  bool has_normals() const noexcept { return !normals.empty(); }
  bool has_part_labels() const noexcept { return !part_labels.empty(); }
  /// Feature width: 6 with normals, 3 without.
  std::size_t din() const noexcept { return has_normals() ? 6 : 3; }

  /// Throws DataError on violated invariants.
  void validate() const;

  /// Points (and their normals/labels) at the given indices, in that order.
  PointCloud subset(std::span<const std::size_t> indices) const;

  /// [N×din] rows of x y z [nx ny nz].
  Tensor<float> features() const;

  bool operator==(const PointCloud&) const = default;
};

/// Parses "x y z" or "x y z nx ny nz" lines. `source` names the input in
/// error messages.
PointCloud parse_cloud_text(std::string_view text, const std::string& source = "<text>");

/// One integer part label per line.
std::vector<int> parse_seg_text(std::string_view text, const std::string& source = "<text>");

/// Loads a text cloud. Part labels come from `seg_path` when given, else
/// from a sibling file with the ".seg" extension when it exists.
PointCloud load_cloud_text(const std::filesystem::path& path,
                           const std::optional<std::filesystem::path>& seg_path = std::nullopt);

std::string format_cloud_text(const PointCloud& cloud);
std::string format_seg_text(std::span<const int> labels);

void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace penet
