#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "penet/layers.hpp"

namespace penet::cli {

struct TrainArgs {
  std::optional<std::filesystem::path> config;
  std::filesystem::path data;
  std::filesystem::path out;
  /// Defaults to "<out>.log.csv".
  std::optional<std::filesystem::path> log;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> overrides;
  std::optional<std::size_t> threads;
};

struct EvalArgs {
  std::filesystem::path ckpt;
  std::filesystem::path data;
  std::string split = "test";
  std::size_t points = 0;
  std::optional<std::size_t> threads;
};

struct SweepArgs {
  std::filesystem::path ckpt;
  std::filesystem::path data;
  std::string split = "test";
  std::vector<std::size_t> points;
  std::filesystem::path out;
  std::optional<std::size_t> threads;
};

struct EmbedArgs {
  std::filesystem::path ckpt;
  std::filesystem::path cloud;
};

struct GradcheckArgs {
  int depth = 3;
  std::size_t k = 1024;
  std::uint64_t seed = 7;
  /// Test hook applied to analytic gradients before comparison.
  std::function<void(ParamRefs<double>&)> after_backward;
};

struct SynthArgs {
  std::filesystem::path out;
  std::size_t per_class = 50;
  std::size_t points = 1024;
  std::uint64_t seed = 1;
  std::vector<std::string> splits{"train", "test"};
};

struct MnistArgs {
  std::filesystem::path images;
  std::filesystem::path labels;
  std::filesystem::path out;
  std::string split = "train";
  std::size_t count = 0;
  std::size_t points = 5000;
  std::uint64_t seed = 1;
};

// Each command writes results to `out`, diagnostics to `err`, and returns the
// process exit code. Library errors propagate as exceptions.
int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);
int cmd_embed(const EmbedArgs& args, std::ostream& out, std::ostream& err);
int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
int cmd_mnist(const MnistArgs& args, std::ostream& out, std::ostream& err);

/// Parses "64,256,1024". Throws ConfigError on empty lists or bad entries.
std::vector<std::size_t> parse_count_list(const std::string& text);

}  // namespace penet::cli
