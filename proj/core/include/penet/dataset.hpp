#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "penet/point_cloud.hpp"

namespace penet {

struct ManifestEntry {
  std::filesystem::path cloud;               // relative to the manifest root
  int class_id = 0;
  std::optional<std::filesystem::path> seg;  // relative part-label sidecar
};

/// A dataset split listed in "<root>/<split>.txt":
///
///     #classes: name0,name1,...
///     #parts: 0,1;2,3,4;...          (optional; part ids per class)
///     <relative cloud path>\t<class id>[\t<seg path>]
struct DatasetManifest {
  std::filesystem::path root;
  std::string split = "train";
  std::vector<ManifestEntry> entries;
  std::vector<std::string> class_names;
  /// Part ids per class; empty when the manifest has no #parts header.
  std::vector<std::vector<int>> category_parts;

  static std::filesystem::path manifest_path(const std::filesystem::path& root, std::string_view split);
  static bool exists(const std::filesystem::path& root, std::string_view split);

  /// Reads and validates "<root>/<split>.txt"; every referenced file must exist.
  static DatasetManifest load(const std::filesystem::path& root, std::string_view split);
  static DatasetManifest parse(std::string_view text, const std::filesystem::path& root, std::string_view split);

  std::string format() const;
  void save() const;
};

/// A split loaded into memory.
struct Dataset {
  std::vector<PointCloud> clouds;
  std::vector<std::string> class_names;
  std::vector<std::vector<int>> category_parts;

  std::size_t num_classes() const { return class_names.size(); }
  /// 1 + largest part id referenced by category_parts or any cloud.
  std::size_t num_parts() const;
  bool has_part_labels() const;

  /// Part ids of a category, from the manifest header or else inferred from
  /// the ground truth of that category's shapes.
  std::vector<int> parts_of(int category) const;
};

Dataset load_dataset(const DatasetManifest& manifest);

}  // namespace penet
