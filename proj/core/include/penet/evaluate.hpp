#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "penet/dataset.hpp"
#include "penet/metrics.hpp"
#include "penet/model.hpp"

namespace penet {

struct EvalOptions {
  /// Points per cloud at inference; 0 uses the model's training count.
  std::size_t points = 0;
  std::size_t batch_size = 16;
  /// Test-set shards evaluated concurrently; results are merged in order.
  std::size_t threads = 1;
};

/// FPS down to `n` points, then zero-mean/unit-sphere normalization.
PointCloud prepare_cloud(const PointCloud& cloud, std::size_t n);

/// Stacks the features of equally sized clouds into one [bs·N × din] tensor.
Tensor<float> stack_features(std::span<const PointCloud* const> clouds);

/// Throws ConfigError when the dataset cannot be scored by `model`.
void check_compatible(const PeNet<float>& model, const Dataset& data);

MetricsReport evaluate_classification(const PeNet<float>& model, const Dataset& data, const EvalOptions& options = {});
MetricsReport evaluate_segmentation(const PeNet<float>& model, const Dataset& data, const EvalOptions& options = {});

struct SweepRow {
  std::size_t n_points = 0;
  double instance_acc = 0.0;
  double class_acc = 0.0;
};

std::vector<SweepRow> sweep_point_count(const PeNet<float>& model, const Dataset& data,
                                        std::span<const std::size_t> counts, const EvalOptions& options = {});

/// CSV with header "n_points,instance_acc,class_acc".
std::string format_sweep_csv(std::span<const SweepRow> rows);

}  // namespace penet
