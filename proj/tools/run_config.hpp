#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "penet/train.hpp"

namespace penet::cli {

/// Training configuration assembled from defaults, a flat key=value file and
/// command-line overrides (in that order of precedence, lowest first).
struct RunConfig {
  TrainConfig train;

  /// Every addressable key, e.g. "epochs" or "augment.jitter_sigma".
  static const std::vector<std::string>& keys();

  /// Throws ConfigError for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);

  /// Applies "key=value" lines; blank lines and '#' comments are skipped.
  void apply_text(std::string_view text, const std::string& source);

  /// Applies one "key=value" override.
  void apply_override(std::string_view assignment);

  static RunConfig build(const std::optional<std::filesystem::path>& file, std::span<const std::string> overrides);
};

/// --threads value, else PENET_THREADS, else 1.
std::size_t resolve_threads(std::optional<std::size_t> flag);

}  // namespace penet::cli
