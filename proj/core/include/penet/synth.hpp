#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "penet/dataset.hpp"
#include "penet/rng.hpp"

namespace penet {

/// Synthetic shape classes, each with analytic normals and part labels.
enum class SynthShape { kSphere = 0, kCube = 1, kCylinder = 2, kDisc = 3 };

inline constexpr std::size_t kSynthClasses = 4;

std::vector<std::string> synth_class_names();

/// Part ids per class: sphere {0 upper, 1 lower}, cube {2 x-faces, 3 y-faces,
/// 4 z-faces}, cylinder {5 side, 6 caps}, disc {7 inner, 8 outer ring}.
std::vector<std::vector<int>> synth_category_parts();

/// Area-uniform surface samples of a unit shape (radius 1 or half-extent 1,
/// centred at the origin, no rotation).
PointCloud synth_cloud(SynthShape shape, std::size_t n_points, Rng& rng);

/// Writes `per_class` clouds of every class into "<root>/<split>/" in the
/// text format (with .seg sidecars) plus "<root>/<split>.txt", and returns
/// the manifest. Output bytes depend only on (split, per_class, n_points,
/// seed).
DatasetManifest synth_shapes(const std::filesystem::path& root, const std::string& split, std::size_t per_class,
                             std::size_t n_points, std::uint64_t seed);

/// Same clouds as synth_shapes, in memory.
Dataset synth_dataset(const std::string& split, std::size_t per_class, std::size_t n_points, std::uint64_t seed);

}  // namespace penet
