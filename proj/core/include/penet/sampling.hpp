#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "penet/point_cloud.hpp"

namespace penet {

/// Greedy farthest point sampling. Starts from `start`, then repeatedly
/// selects the unselected point with the largest squared distance to its
/// nearest selected point (lowest index on ties). Returns indices in
/// selection order.
std::vector<std::size_t> farthest_point_indices(std::span<const Vec3> points, std::size_t n, std::size_t start = 0);

/// FPS subset carrying normals and labels of the selected points.
PointCloud farthest_point_sample(const PointCloud& cloud, std::size_t n, std::size_t start = 0);

/// Subtracts the centroid and scales so the farthest point lies on the unit
/// sphere. A zero-radius cloud collapses to the origin. Normals untouched.
PointCloud zero_mean_normalize(const PointCloud& cloud);

struct AugmentConfig {
  double jitter_sigma = 0.01;
  double jitter_clip = 0.05;
  double shift_range = 0.1;
  double scale_low = 0.8;
  double scale_high = 1.25;
  std::uint64_t seed = 0;

  void validate() const;
};

/// p' = s·p + t + clip(σ·ε, ±clip) with one scale s ~ U(scale range), one
/// shift t ~ U(±shift_range)³ and per-coordinate jitter ε ~ N(0, 1).
/// Normals and labels are untouched; no rotation.
PointCloud augment(const PointCloud& cloud, const AugmentConfig& cfg);

}  // namespace penet
