#include "penet/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "penet/rng.hpp"

namespace penet {
namespace {

double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = double(a.x) - b.x, dy = double(a.y) - b.y, dz = double(a.z) - b.z;
  return dx * dx + dy * dy + dz * dz;
}

}  // namespace

std::vector<std::size_t> farthest_point_indices(std::span<const Vec3> points, std::size_t n, std::size_t start) {
  const std::size_t total = points.size();
  if (n == 0 || n > total) {
    throw SamplingError("farthest point sampling: requested " + std::to_string(n) + " of " + std::to_string(total) +
                        " points");
  }
  if (start >= total) throw SamplingError("farthest point sampling: start index out of range");

  std::vector<std::size_t> picked;
  picked.reserve(n);
  // Picked points are pinned at -inf so they never win again, even among duplicates.
  std::vector<double> nearest(total, std::numeric_limits<double>::infinity());
  std::size_t current = start;
  for (std::size_t s = 0; s < n; ++s) {
    picked.push_back(current);
    nearest[current] = -std::numeric_limits<double>::infinity();
    if (s + 1 == n) break;
    const Vec3 c = points[current];
    std::size_t best = total;
    double best_d = -1.0;
    for (std::size_t j = 0; j < total; ++j) {
      nearest[j] = std::min(nearest[j], squared_distance(points[j], c));
      if (nearest[j] > best_d) {
        best_d = nearest[j];
        best = j;
      }
    }
    current = best;
  }
  return picked;
}

PointCloud farthest_point_sample(const PointCloud& cloud, std::size_t n, std::size_t start) {
  if (n > cloud.size()) {
    throw SamplingError("cloud '" + cloud.name + "' has " + std::to_string(cloud.size()) + " points, " +
                        std::to_string(n) + " requested");
  }
  const auto idx = farthest_point_indices(cloud.points, n, start);
  return cloud.subset(idx);
}

PointCloud zero_mean_normalize(const PointCloud& cloud) {
  PointCloud out = cloud;
  if (out.points.empty()) return out;
  double cx = 0, cy = 0, cz = 0;
  for (const Vec3& p : out.points) {
    cx += p.x;
    cy += p.y;
    cz += p.z;
  }
  const double inv = 1.0 / static_cast<double>(out.points.size());
  cx *= inv;
  cy *= inv;
  cz *= inv;
  double radius = 0;
  for (const Vec3& p : out.points) {
    const double dx = p.x - cx, dy = p.y - cy, dz = p.z - cz;
    radius = std::max(radius, dx * dx + dy * dy + dz * dz);
  }
  radius = std::sqrt(radius);
  const double scale = radius > 0 ? 1.0 / radius : 0.0;
  for (Vec3& p : out.points) {
    p = {static_cast<float>((p.x - cx) * scale), static_cast<float>((p.y - cy) * scale),
         static_cast<float>((p.z - cz) * scale)};
  }
  return out;
}

void AugmentConfig::validate() const {
  if (!(jitter_sigma >= 0)) throw ConfigError("augment.jitter_sigma must be >= 0");
  if (!(jitter_clip >= jitter_sigma)) throw ConfigError("augment.jitter_clip must be >= augment.jitter_sigma");
  if (!(shift_range >= 0)) throw ConfigError("augment.shift_range must be >= 0");
  if (!(scale_low > 0) || !(scale_high >= scale_low)) {
    throw ConfigError("augment scale range must satisfy 0 < scale_low <= scale_high");
  }
}

PointCloud augment(const PointCloud& cloud, const AugmentConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const double scale = cfg.scale_high > cfg.scale_low ? rng.uniform(cfg.scale_low, cfg.scale_high) : cfg.scale_low;
  double shift[3];
  for (double& t : shift) t = cfg.shift_range > 0 ? rng.uniform(-cfg.shift_range, cfg.shift_range) : 0.0;
  PointCloud out = cloud;
  const double clip = cfg.jitter_clip;
  auto jitter = [&] {
    if (cfg.jitter_sigma == 0) return 0.0;
    return std::clamp(cfg.jitter_sigma * rng.normal(), -clip, clip);
  };
  for (Vec3& p : out.points) {
    const double jx = jitter(), jy = jitter(), jz = jitter();
    p = {static_cast<float>(scale * p.x + shift[0] + jx), static_cast<float>(scale * p.y + shift[1] + jy),
         static_cast<float>(scale * p.z + shift[2] + jz)};
  }
  return out;
}

}  // namespace penet
