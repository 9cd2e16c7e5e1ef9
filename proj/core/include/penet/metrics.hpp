#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace penet {

struct MetricsReport {
  std::size_t samples = 0;
  /// correct / total.
  double instance_accuracy = 0.0;
  /// Mean of per-class accuracies over classes with at least one sample.
  double class_accuracy = 0.0;
  std::vector<std::size_t> per_class_correct;
  std::vector<std::size_t> per_class_total;

  bool has_miou = false;
  /// Mean shape mIoU per category (NaN for categories without shapes).
  std::vector<double> per_category_miou;
  std::vector<std::size_t> per_category_shapes;
  /// Shape-count-weighted mean over all shapes.
  double mean_miou = 0.0;

  double seconds = 0.0;

  /// "METRICS instance=<f> class=<f> [miou=<f>]"
  std::string metrics_line() const;
  std::string to_text(const std::vector<std::string>& class_names) const;
};

/// Accuracy metrics from parallel truth/prediction vectors.
MetricsReport classification_metrics(std::span<const int> truth, std::span<const int> predicted,
                                     std::size_t num_classes);

/// IoU of every part in `parts`: |pred∩gt| / |pred∪gt|, 1 when the union is empty.
std::vector<double> part_ious(std::span<const int> truth, std::span<const int> predicted, std::span<const int> parts);

/// Mean of part_ious over the category's parts. Throws DataError when a
/// ground-truth label is not one of `parts`.
double shape_miou(std::span<const int> truth, std::span<const int> predicted, std::span<const int> parts);

/// Accumulates per-shape mIoU into per-category and overall means.
class SegmentationMetrics {
 public:
  explicit SegmentationMetrics(std::size_t num_categories);

  /// Returns the shape's mIoU.
  double add_shape(int category, std::span<const int> truth, std::span<const int> predicted,
                   std::span<const int> parts);

  /// Fills the mIoU fields of `report`.
  void finalize(MetricsReport& report) const;

 private:
  std::vector<double> sum_;
  std::vector<std::size_t> count_;
};

}  // namespace penet
