#include "penet/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <thread>

#include "penet/sampling.hpp"

namespace penet {

PointCloud prepare_cloud(const PointCloud& cloud, std::size_t n) {
  return zero_mean_normalize(farthest_point_sample(cloud, n));
}

Tensor<float> stack_features(std::span<const PointCloud* const> clouds) {
  if (clouds.empty()) throw EmptyCloudError("stack_features: empty batch");
  const std::size_t n = clouds.front()->size(), din = clouds.front()->din();
  Tensor<float> out({clouds.size() * n, din});
  float* dst = out.raw();
  for (const PointCloud* c : clouds) {
    if (c->size() != n || c->din() != din) throw LayoutError("stack_features: clouds differ in size or feature width");
    Tensor<float> f = c->features();
    dst = std::copy(f.data().begin(), f.data().end(), dst);
  }
  return out;
}

void check_compatible(const PeNet<float>& model, const Dataset& data) {
  const ModelConfig& cfg = model.config();
  if (data.clouds.empty()) throw ConfigError("dataset is empty");
  for (const auto& c : data.clouds) {
    if (c.din() != cfg.din) {
      throw ConfigError("cloud '" + c.name + "' has " + std::to_string(c.din()) + " features per point, model expects " +
                        std::to_string(cfg.din));
    }
  }
  if (cfg.task == Task::kClassify) {
    if (data.num_classes() != cfg.num_classes) {
      throw ConfigError("classification model has " + std::to_string(cfg.num_classes) + " classes, dataset declares " +
                        std::to_string(data.num_classes()));
    }
  } else {
    if (!data.has_part_labels()) throw ConfigError("segmentation model needs a dataset with per-point part labels");
    if (data.num_parts() > cfg.num_parts) {
      throw ConfigError("dataset uses " + std::to_string(data.num_parts()) + " part ids, model predicts " +
                        std::to_string(cfg.num_parts));
    }
  }
}

namespace {

/// Runs `fn(begin, end)` over contiguous shards of [0, n).
template <typename Fn>
void for_shards(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t b = std::min(n, t * chunk), e = std::min(n, b + chunk);
    pool.emplace_back([&, t, b, e] {
      try {
        fn(b, e);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
}

std::size_t effective_points(const PeNet<float>& model, const EvalOptions& options) {
  return options.points ? options.points : model.config().train_points;
}

std::vector<PointCloud> prepare_all(const Dataset& data, std::size_t n, std::size_t threads) {
  for (const auto& c : data.clouds) {
    if (c.size() < n) {
      throw SamplingError("cloud '" + c.name + "' has " + std::to_string(c.size()) + " points, " + std::to_string(n) +
                          " requested");
    }
  }
  std::vector<PointCloud> prepared(data.clouds.size());
  for_shards(data.clouds.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) prepared[i] = prepare_cloud(data.clouds[i], n);
  });
  return prepared;
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

MetricsReport evaluate_classification(const PeNet<float>& model, const Dataset& data, const EvalOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (model.config().task != Task::kClassify) throw ConfigError("checkpoint task is not classify");
  check_compatible(model, data);
  const std::size_t n = effective_points(model, options);
  const auto prepared = prepare_all(data, n, options.threads);
  const std::size_t bs = std::max<std::size_t>(options.batch_size, 1);

  std::vector<int> predicted(prepared.size());
  for_shards(prepared.size(), options.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; i += bs) {
      const std::size_t end = std::min(e, i + bs);
      std::vector<const PointCloud*> batch;
      for (std::size_t j = i; j < end; ++j) batch.push_back(&prepared[j]);
      const auto logits = model.forward(stack_features(batch), {batch.size(), n});
      const auto labels = predict(logits);
      std::copy(labels.begin(), labels.end(), predicted.begin() + static_cast<std::ptrdiff_t>(i));
    }
  });

  std::vector<int> truth;
  truth.reserve(data.clouds.size());
  for (const auto& c : data.clouds) {
    if (!c.class_label) throw DataError("cloud '" + c.name + "' has no class label");
    truth.push_back(*c.class_label);
  }
  MetricsReport report = classification_metrics(truth, predicted, model.config().num_classes);
  report.seconds = elapsed(start);
  return report;
}

MetricsReport evaluate_segmentation(const PeNet<float>& model, const Dataset& data, const EvalOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (model.config().task != Task::kSegment) throw ConfigError("checkpoint task is not segment");
  check_compatible(model, data);
  const std::size_t n = effective_points(model, options);
  const auto prepared = prepare_all(data, n, options.threads);

  std::vector<std::vector<int>> predicted(prepared.size());
  for_shards(prepared.size(), options.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const PointCloud* one[] = {&prepared[i]};
      predicted[i] = predict(model.forward(stack_features(one), {1, n}));
    }
  });

  std::vector<int> truth_points, pred_points;
  const std::size_t categories = std::max(data.num_classes(), std::size_t{1});
  SegmentationMetrics seg(categories);
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const PointCloud& c = prepared[i];
    const int category = c.class_label.value_or(0);
    const auto parts = data.parts_of(category);
    seg.add_shape(category, c.part_labels, predicted[i], parts);
    truth_points.insert(truth_points.end(), c.part_labels.begin(), c.part_labels.end());
    pred_points.insert(pred_points.end(), predicted[i].begin(), predicted[i].end());
  }
  // Accuracy fields report per-point part accuracy for segmentation.
  MetricsReport report = classification_metrics(truth_points, pred_points, model.config().num_parts);
  report.samples = prepared.size();
  seg.finalize(report);
  report.seconds = elapsed(start);
  return report;
}

std::vector<SweepRow> sweep_point_count(const PeNet<float>& model, const Dataset& data,
                                        std::span<const std::size_t> counts, const EvalOptions& options) {
  std::vector<SweepRow> rows;
  for (std::size_t n : counts) {
    EvalOptions o = options;
    o.points = n;
    const MetricsReport r = evaluate_classification(model, data, o);
    rows.push_back({n, r.instance_accuracy, r.class_accuracy});
  }
  return rows;
}

std::string format_sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "n_points,instance_acc,class_acc\n";
  char buf[96];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", r.n_points, r.instance_acc, r.class_acc);
    out += buf;
  }
  return out;
}

}  // namespace penet
