#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "penet/model.hpp"

namespace penet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout (all integers u32 little-endian, strings length-prefixed UTF-8):
//
//   "PENET1"  version
//   metadata: count, then count × (key, value)
//   arrays:   count, then count × (name, rank, dims[rank], f32 LE payload)

std::vector<std::uint8_t> serialize_checkpoint(const PeNet<float>& model);

/// Rebuilds the architecture from metadata and fills every parameter. Throws
/// FormatError naming the offending field on any inconsistency.
PeNet<float> deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const PeNet<float>& model, const std::filesystem::path& path);
PeNet<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace penet
