#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "penet/point_cloud.hpp"

namespace penet {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// One greyscale image from an IDX file, row-major bytes.
struct IdxImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;
  int label = 0;

  std::uint8_t at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
};

/// Parses an IDX image/label pair already in memory.
std::vector<IdxImage> parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels);

std::vector<IdxImage> load_idx_images(const std::filesystem::path& images_path,
                                      const std::filesystem::path& labels_path);

/// Serializes images back to IDX (used for fixtures and tooling).
std::vector<std::uint8_t> encode_idx_images(std::span<const IdxImage> images);
std::vector<std::uint8_t> encode_idx_labels(std::span<const IdxImage> images);

inline constexpr std::size_t kMnistPoints = 5000;
inline constexpr float kMnistDepthNoise = 0.05f;

/// Samples `n_points` non-zero pixels uniformly with replacement and maps
/// pixel (r, c) to x = (c − cx)/cx, y = (cy − r)/cy with a small random
/// depth z ~ U(−0.05, 0.05). No normals.
PointCloud mnist_to_pointcloud(const IdxImage& image, std::size_t n_points = kMnistPoints, std::uint64_t seed = 0);

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);

}  // namespace penet
