#include "penet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "penet/errors.hpp"

namespace penet {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

std::string MetricsReport::metrics_line() const {
  std::string line = "METRICS instance=" + fmt(instance_accuracy) + " class=" + fmt(class_accuracy);
  if (has_miou) line += " miou=" + fmt(mean_miou);
  return line;
}

std::string MetricsReport::to_text(const std::vector<std::string>& class_names) const {
  std::string out;
  out += "samples:           " + std::to_string(samples) + "\n";
  out += "instance accuracy: " + fmt(instance_accuracy) + "\n";
  out += "class accuracy:    " + fmt(class_accuracy) + "\n";
  for (std::size_t c = 0; c < per_class_total.size(); ++c) {
    if (per_class_total[c] == 0) continue;
    const std::string name = c < class_names.size() ? class_names[c] : std::to_string(c);
    out += "  " + name + ": " + std::to_string(per_class_correct[c]) + "/" + std::to_string(per_class_total[c]) + "\n";
  }
  if (has_miou) {
    out += "mean mIoU:         " + fmt(mean_miou) + "\n";
    for (std::size_t c = 0; c < per_category_miou.size(); ++c) {
      if (per_category_shapes[c] == 0) continue;
      const std::string name = c < class_names.size() ? class_names[c] : std::to_string(c);
      out += "  " + name + ": " + fmt(per_category_miou[c]) + " (" + std::to_string(per_category_shapes[c]) +
             " shapes)\n";
    }
  }
  out += "seconds:           " + fmt(seconds) + "\n";
  return out;
}

MetricsReport classification_metrics(std::span<const int> truth, std::span<const int> predicted,
                                     std::size_t num_classes) {
  if (truth.size() != predicted.size()) throw DimensionError("classification_metrics: length mismatch");
  MetricsReport r;
  r.samples = truth.size();
  r.per_class_correct.assign(num_classes, 0);
  r.per_class_total.assign(num_classes, 0);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    if (t < 0 || static_cast<std::size_t>(t) >= num_classes) {
      throw LabelError("class label " + std::to_string(t) + " outside [0, " + std::to_string(num_classes) + ")");
    }
    ++r.per_class_total[static_cast<std::size_t>(t)];
    if (predicted[i] == t) {
      ++correct;
      ++r.per_class_correct[static_cast<std::size_t>(t)];
    }
  }
  r.instance_accuracy = truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size());
  double acc_sum = 0.0;
  std::size_t present = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (r.per_class_total[c] == 0) continue;
    acc_sum += static_cast<double>(r.per_class_correct[c]) / static_cast<double>(r.per_class_total[c]);
    ++present;
  }
  r.class_accuracy = present ? acc_sum / static_cast<double>(present) : 0.0;
  return r;
}

std::vector<double> part_ious(std::span<const int> truth, std::span<const int> predicted, std::span<const int> parts) {
  if (truth.size() != predicted.size()) throw DimensionError("part_ious: length mismatch");
  std::vector<double> ious;
  ious.reserve(parts.size());
  for (int part : parts) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const bool g = truth[i] == part, p = predicted[i] == part;
      inter += g && p;
      uni += g || p;
    }
    ious.push_back(uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni));
  }
  return ious;
}

double shape_miou(std::span<const int> truth, std::span<const int> predicted, std::span<const int> parts) {
  if (parts.empty()) throw DataError("shape_miou: category has no parts");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (std::find(parts.begin(), parts.end(), truth[i]) == parts.end()) {
      throw DataError("ground-truth part label " + std::to_string(truth[i]) + " at point " + std::to_string(i) +
                      " is not a part of the shape's category");
    }
  }
  const auto ious = part_ious(truth, predicted, parts);
  double s = 0.0;
  for (double v : ious) s += v;
  return s / static_cast<double>(ious.size());
}

SegmentationMetrics::SegmentationMetrics(std::size_t num_categories)
    : sum_(num_categories, 0.0), count_(num_categories, 0) {}

double SegmentationMetrics::add_shape(int category, std::span<const int> truth, std::span<const int> predicted,
                                      std::span<const int> parts) {
  if (category < 0 || static_cast<std::size_t>(category) >= sum_.size()) {
    throw LabelError("segmentation category " + std::to_string(category) + " out of range");
  }
  const double v = shape_miou(truth, predicted, parts);
  sum_[static_cast<std::size_t>(category)] += v;
  ++count_[static_cast<std::size_t>(category)];
  return v;
}

void SegmentationMetrics::finalize(MetricsReport& report) const {
  report.has_miou = true;
  report.per_category_miou.assign(sum_.size(), std::numeric_limits<double>::quiet_NaN());
  report.per_category_shapes = count_;
  double total = 0.0;
  std::size_t shapes = 0;
  for (std::size_t c = 0; c < sum_.size(); ++c) {
    if (count_[c] == 0) continue;
    report.per_category_miou[c] = sum_[c] / static_cast<double>(count_[c]);
    total += sum_[c];
    shapes += count_[c];
  }
  report.mean_miou = shapes ? total / static_cast<double>(shapes) : 0.0;
}

}  // namespace penet
