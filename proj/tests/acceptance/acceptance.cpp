// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Wall-clock budgets are part of each criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "penet/aggregate.hpp"
#include "penet/checkpoint.hpp"
#include "penet/evaluate.hpp"
#include "penet/gradcheck.hpp"
#include "penet/idx.hpp"
#include "penet/kernels.hpp"
#include "penet/metrics.hpp"
#include "penet/model_gradcheck.hpp"
#include "penet/sampling.hpp"
#include "penet/synth.hpp"
#include "penet/train.hpp"
#include "scratch_dir.hpp"

namespace penet {
namespace {

using oracle::random_tensor;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string printf_string(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

double max_abs_diff(std::span<const float> a, std::span<const float> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<std::size_t> random_perm(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

double spread(std::span<const SweepRow> rows) {
  const auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                            [](const SweepRow& a, const SweepRow& b) { return a.instance_acc < b.instance_acc; });
  return hi->instance_acc - lo->instance_acc;
}

// --- criteria -------------------------------------------------------------

Outcome end_to_end_text_datasets() {
  test::ScratchDir dir;
  synth_shapes(dir.path(), "train", 16, 300, 31);
  synth_shapes(dir.path(), "test", 4, 300, 32);
  const Dataset train_set = load_dataset(DatasetManifest::load(dir.path(), "train"));
  const Dataset test_set = load_dataset(DatasetManifest::load(dir.path(), "test"));
  if (train_set.clouds.size() < 64) return {false, "training subset smaller than 64 clouds"};

  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.points = 256;
  const auto cls = train(train_set, &test_set, cfg);
  const auto cls_report = evaluate_classification(cls.model, test_set);

  cfg.task = Task::kSegment;
  const auto seg = train(train_set, &test_set, cfg);
  const auto seg_report = evaluate_segmentation(seg.model, test_set);

  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  const bool ok = cls_report.samples == test_set.clouds.size() && in_unit(cls_report.instance_accuracy) &&
                  in_unit(cls_report.class_accuracy) && seg_report.has_miou && in_unit(seg_report.mean_miou) &&
                  cls.model.config().din == 6;
  return {ok, printf_string("%zu train clouds (xyz+normals); classify instance=%.3f class=%.3f; segment miou=%.3f",
                            train_set.clouds.size(), cls_report.instance_accuracy, cls_report.class_accuracy,
                            seg_report.mean_miou)};
}

Outcome permutation_invariance() {
  ModelConfig mc;
  mc.task = Task::kClassify;
  mc.num_classes = 10;
  PeNet<float> model(mc);
  model.init(101);
  Rng rng(102);
  const BatchLayout layout{100, 128};
  const auto x = random_tensor<float>({layout.rows(), 3}, rng);
  Tensor<float> permuted(x.shape());
  for (std::size_t c = 0; c < layout.bs; ++c) {
    const auto perm = random_perm(layout.points, rng);
    for (std::size_t i = 0; i < layout.points; ++i) {
      std::copy_n(x.row(c * layout.points + perm[i]).begin(), 3, permuted.row(c * layout.points + i).begin());
    }
  }
  const auto a = model.forward(x, layout);
  const auto b = model.forward(permuted, layout);
  const auto la = argmax_rows(a), lb = argmax_rows(b);
  std::size_t same = 0;
  for (std::size_t c = 0; c < layout.bs; ++c) same += la[c] == lb[c];
  const double diff = max_abs_diff(a.data(), b.data());
  return {same == layout.bs && diff <= 1e-4, printf_string("argmax identical %zu/100, max logit diff %.2e", same, diff)};
}

Outcome additivity() {
  Encoder<double> enc(3, 1024, 3);
  Rng rng(201);
  enc.init(rng);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t na = 1 + rng.below(64), nb = 1 + rng.below(64);
    const auto a = random_tensor<double>({na, 3}, rng);
    const auto b = random_tensor<double>({nb, 3}, rng);
    Tensor<double> both({na + nb, 3});
    std::copy(a.data().begin(), a.data().end(), both.data().begin());
    std::copy(b.data().begin(), b.data().end(), both.data().begin() + static_cast<std::ptrdiff_t>(a.size()));
    const auto whole = sum_pool(enc.embed_batch(both, {1, na + nb}));
    auto parts = sum_pool(enc.embed_batch(a, {1, na}));
    const auto pb = sum_pool(enc.embed_batch(b, {1, nb}));
    for (std::size_t j = 0; j < parts.size(); ++j) parts[j] += pb[j];
    worst = std::max(worst, max_abs_diff(whole.data(), parts.data()));
  }
  return {worst <= 1e-6, printf_string("100 pairs, max |sum(A u B) - sum(A) - sum(B)| = %.2e", worst)};
}

Outcome sum_mean_reconciliation() {
  Rng rng(301);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    const auto e = random_tensor<double>({1 + rng.below(300), 1024}, rng, -3.0, 3.0);
    const auto from_mean = min_max_normalize(mean_pool(e));
    const auto from_sum = min_max_normalize(sum_pool(e));
    worst = std::max(worst, max_abs_diff(from_mean.data(), from_sum.data()));
  }
  return {worst <= 1e-6, printf_string("100 embedding sets, max diff %.2e", worst)};
}

Outcome batching_equivalence() {
  double worst = 0;
  std::size_t cases = 0;
  for (std::size_t din : {3u, 6u}) {
    Encoder<float> enc(din, 1024, 3);
    Rng rng(400 + din);
    enc.init(rng);
    for (std::size_t bs : {1u, 2u, 8u}) {
      for (std::size_t n : {1u, 16u, 512u}) {
        const BatchLayout layout{bs, n};
        const auto x = random_tensor<float>({layout.rows(), din}, rng);
        const auto fused = enc.embed_batch(x, layout);
        for (std::size_t i = 0; i < layout.rows(); ++i) {
          const auto single = enc.embed_point(x.row(i));
          worst = std::max(worst, max_abs_diff(fused.row(i), single.data()));
        }
        ++cases;
      }
    }
  }
  return {worst <= 1e-6, printf_string("%zu (din, bs, N) cases, max |fused - per-point| = %.2e", cases, worst)};
}

double dot(const Tensor<double>& a, const Tensor<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Param<double> param(const char* name, Tensor<double> value) {
  Param<double> p(name, value.shape());
  p.value = std::move(value);
  return p;
}

/// Returns the worst relative error over a few seeded instances of every layer.
std::optional<double> layer_gradients(std::string& failed) {
  const GradCheckOptions opts{1e-5, 1e-5};
  Rng rng(501);
  double worst = 0;
  auto note = [&](const char* layer, const GradCheckReport& r) {
    worst = std::max(worst, r.max_rel_error);
    if (!r.passed && failed.empty()) failed = layer;
  };
  for (int t = 0; t < 5; ++t) {
    auto x = param("x", random_tensor<double>({5, 6}, rng));
    auto w = param("w", random_tensor<double>({6, 7}, rng));
    auto b = param("b", random_tensor<double>({7}, rng));
    const auto r = random_tensor<double>({5, 7}, rng);
    note("linear", grad_check({&x, &w, &b}, [&] { return dot(linear_forward(x.value, w.value, b.value), r); },
                              [&] {
                                auto g = linear_backward(x.value, w.value, r);
                                x.grad = g.dx, w.grad = g.dw, b.grad = g.db;
                              },
                              opts));

    auto xr = param("x", random_tensor<double>({4, 9}, rng));
    const auto rr = random_tensor<double>({4, 9}, rng);
    note("relu", grad_check({&xr}, [&] { return dot(relu_forward(xr.value), rr); },
                            [&] { xr.grad = relu_backward(xr.value, rr); }, opts));

    auto xc = param("x", random_tensor<double>({2, 3, 6, 6}, rng));
    auto k = param("k", random_tensor<double>({4, 3, 3, 3}, rng));
    auto bc = param("b", random_tensor<double>({4}, rng));
    const auto rc = random_tensor<double>({2, 4, 6, 6}, rng);
    note("conv2d", grad_check({&xc, &k, &bc}, [&] { return dot(conv2d_forward(xc.value, k.value, bc.value, 1, 1), rc); },
                              [&] {
                                auto g = conv2d_backward(xc.value, k.value, rc, 1, 1);
                                xc.grad = g.dx, k.grad = g.dkernels, bc.grad = g.db;
                              },
                              opts));

    auto xm = param("x", random_tensor<double>({2, 2, 6, 6}, rng));
    const auto rm = random_tensor<double>({2, 2, 3, 3}, rng);
    note("maxpool2d", grad_check({&xm}, [&] { return dot(maxpool2d_forward(xm.value, 2, 2).out, rm); },
                                 [&] { xm.grad = maxpool2d_backward(maxpool2d_forward(xm.value, 2, 2), rm); }, opts));

    auto logits = param("logits", random_tensor<double>({3, 5}, rng, -2.0, 2.0));
    const std::vector<int> labels{0, 4, 2};
    note("softmax_cross_entropy",
         grad_check({&logits}, [&] { return softmax_cross_entropy(logits.value, labels).loss; },
                    [&] { logits.grad = softmax_cross_entropy(logits.value, labels).grad; }, opts));

    const BatchLayout layout{2, 5};
    Param<double> e("E", {layout.rows(), 16});
    for (;;) {
      e.value = random_tensor<double>({layout.rows(), 16}, rng);
      AggregateTrace<double> probe;
      aggregate_forward(e.value, layout, &probe);
      bool tied = false;
      for (std::size_t c = 0; c < layout.bs; ++c) tied |= has_extremum_tie<double>(probe.pooled.row(c), 1e-3);
      if (!tied) break;
    }
    const auto ra = random_tensor<double>({2, 16}, rng);
    note("global_feature", grad_check({&e}, [&] { return dot(aggregate_forward<double>(e.value, layout, nullptr), ra); },
                                      [&] {
                                        AggregateTrace<double> trace;
                                        aggregate_forward(e.value, layout, &trace);
                                        e.grad = aggregate_backward(trace, ra);
                                      },
                                      opts));
  }
  return worst;
}

Outcome gradient_checks() {
  std::string failed;
  const double layer_worst = *layer_gradients(failed);
  std::string detail = printf_string("layers max rel %.1e", layer_worst);
  bool ok = failed.empty();
  if (!ok) detail += " (" + failed + " failed)";
  for (Task task : {Task::kClassify, Task::kSegment}) {
    for (int depth = 1; depth <= 5; ++depth) {
      if (task == Task::kSegment && depth < 2) continue;
      ModelConfig mc;
      mc.task = task;
      mc.encoder_depth = depth;
      if (task == Task::kClassify) mc.num_classes = 4;
      else mc.num_parts = 3;
      const auto r = check_model_gradients(mc);
      ok &= r.passed && r.max_rel_error < 1e-5;
      detail += printf_string("; %s d%d %.1e (%zu/%zu skipped)", task == Task::kClassify ? "cls" : "seg", depth,
                              r.max_rel_error, r.skipped, r.checked + r.skipped);
    }
  }
  return {ok, detail};
}

/// Shared synthetic classification run, reused by the determinism check.
struct SyntheticRun {
  std::vector<std::uint8_t> checkpoint;
  std::vector<EpochLog> log;
  double accuracy = 0;
};
std::optional<SyntheticRun> g_synthetic;

TrainConfig synthetic_config() {
  TrainConfig cfg;
  cfg.points = 256;
  return cfg;
}

SyntheticRun run_synthetic(const Dataset& train_set, const Dataset& test_set) {
  auto result = train(train_set, nullptr, synthetic_config());
  SyntheticRun run{serialize_checkpoint(result.model), result.log, 0};
  run.accuracy = evaluate_classification(result.model, test_set).instance_accuracy;
  return run;
}

Outcome synthetic_classification() {
  const Dataset train_set = synth_dataset("train", 50, 256, 601);
  const Dataset test_set = synth_dataset("test", 20, 256, 602);
  const double baseline = oracle::nearest_centroid_accuracy(train_set.clouds, test_set.clouds, kSynthClasses);
  if (baseline < 0.90) return {false, printf_string("nearest-centroid baseline only %.3f", baseline)};
  g_synthetic = run_synthetic(train_set, test_set);
  return {g_synthetic->accuracy >= 0.95,
          printf_string("nearest-centroid %.3f; %zu epochs, test instance accuracy %.3f", baseline,
                        synthetic_config().epochs, g_synthetic->accuracy)};
}

Outcome determinism() {
  if (!g_synthetic) return {false, "synthetic run did not complete"};
  const Dataset train_set = synth_dataset("train", 50, 256, 601);
  const Dataset test_set = synth_dataset("test", 20, 256, 602);
  const auto again = run_synthetic(train_set, test_set);
  const bool same_ckpt = again.checkpoint == g_synthetic->checkpoint;
  bool same_log = again.log.size() == g_synthetic->log.size();
  for (std::size_t e = 0; same_log && e < again.log.size(); ++e) {
    // Wall-clock seconds are excluded; every other column must match exactly.
    auto a = again.log[e], b = g_synthetic->log[e];
    a.seconds = b.seconds = 0;
    same_log = format_train_log(std::span(&a, 1)) == format_train_log(std::span(&b, 1)) &&
               std::memcmp(&a.loss, &b.loss, sizeof(double)) == 0;
  }
  return {same_ckpt && same_log, printf_string("checkpoint %s (%zu bytes), log %s", same_ckpt ? "identical" : "differs",
                                               again.checkpoint.size(), same_log ? "identical" : "differs")};
}

Outcome point_count_robustness() {
  const Dataset train_set = synth_dataset("train", 50, 1024, 701);
  const Dataset test_set = synth_dataset("test", 20, 1024, 702);
  TrainConfig cfg;
  cfg.points = 512;
  const auto result = train(train_set, nullptr, cfg);
  const std::vector<std::size_t> counts{256, 512, 1024};
  const auto rows = sweep_point_count(result.model, test_set, counts);
  const double band = spread(rows);
  return {band < 0.03, printf_string("accuracy at N=256/512/1024: %.3f/%.3f/%.3f, spread %.1f pp", rows[0].instance_acc,
                                     rows[1].instance_acc, rows[2].instance_acc, band * 100.0)};
}

constexpr std::size_t kMnistEpochs = 40;

Outcome mnist_desk_scale() {
  const auto images = load_idx_images(PENET_DATA_DIR "/mnist/digits-images-idx3-ubyte",
                                      PENET_DATA_DIR "/mnist/digits-labels-idx1-ubyte");
  if (images.size() < 6000) return {false, "need at least 6000 digits"};
  Dataset train_set, test_set;
  for (int d = 0; d < 10; ++d) train_set.class_names.push_back(std::to_string(d));
  test_set.class_names = train_set.class_names;
  for (std::size_t i = 0; i < 6000; ++i) {
    PointCloud c = mnist_to_pointcloud(images[i], kMnistPoints, hash_seed({0x6d6e, i}));
    c.name = "digit_" + std::to_string(i);
    (i < 5000 ? train_set : test_set).clouds.push_back(std::move(c));
  }
  TrainConfig cfg;
  cfg.points = 256;
  cfg.epochs = kMnistEpochs;
  cfg.lr_schedule = LrSchedule::kStep;
  cfg.lr_step = 20;
  cfg.lr_gamma = 0.3;
  const auto result = train(train_set, nullptr, cfg);
  const double acc = evaluate_classification(result.model, test_set).instance_accuracy;
  return {acc >= 0.90, printf_string("5000 train / 1000 test digits, %zu epochs, test instance accuracy %.3f",
                                     cfg.epochs, acc)};
}

Outcome fps_oracle() {
  Rng rng(801);
  std::size_t matched = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n_points = 1 + rng.below(32);
    PointCloud cloud = oracle::random_cloud(n_points, rng);
    // Snap a few points onto shared coordinates so distance ties occur.
    if (t % 4 == 0 && n_points > 2) cloud.points[1] = cloud.points[0];
    const std::size_t n = 1 + rng.below(n_points);
    const std::size_t start = rng.below(n_points);
    matched += farthest_point_indices(cloud.points, n, start) == oracle::fps(cloud.points, n, start);
  }
  return {matched == 200, printf_string("%zu/200 seeded clouds match the recompute oracle", matched)};
}

Outcome miou_oracle() {
  const std::vector<int> gt{0, 0, 1, 1}, pred{0, 1, 1, 1}, parts{0, 1};
  const double hand = shape_miou(gt, pred, parts);
  // 1/2 + 2/3 rounds one ulp away from the literal 7.0 / 12.0.
  bool ok = hand == oracle::shape_miou(gt, pred, parts) && std::abs(hand - 7.0 / 12.0) < 1e-12;
  Rng rng(901);
  std::size_t matched = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + rng.below(10);
    const std::size_t np = 1 + rng.below(4);
    std::vector<int> cat_parts(np);
    std::iota(cat_parts.begin(), cat_parts.end(), static_cast<int>(rng.below(3)));
    std::vector<int> truth(n), predicted(n);
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = cat_parts[rng.below(np)];
      predicted[i] = static_cast<int>(rng.below(7));
    }
    matched += shape_miou(truth, predicted, cat_parts) == oracle::shape_miou(truth, predicted, cat_parts);
  }
  ok &= matched == 100;
  return {ok, printf_string("hand example %.17g (7/12 = %.17g); %zu/100 random cases exact", hand, 7.0 / 12.0, matched)};
}

Outcome checkpoint_roundtrip() {
  test::ScratchDir dir;
  ModelConfig mc;
  mc.task = Task::kClassify;
  mc.num_classes = 4;
  mc.class_names = synth_class_names();
  PeNet<float> model(mc);
  model.init(1001);
  save_checkpoint(model, dir / "a.ckpt");
  const auto loaded = load_checkpoint(dir / "a.ckpt");
  save_checkpoint(loaded, dir / "b.ckpt");
  const bool bytes_same = read_binary_file(dir / "a.ckpt") == read_binary_file(dir / "b.ckpt");
  Rng rng(1002);
  const BatchLayout layout{4, 256};
  const auto x = random_tensor<float>({layout.rows(), 3}, rng);
  const auto before = model.forward(x, layout);
  const auto after = loaded.forward(x, layout);
  const bool preds_same = std::memcmp(before.raw(), after.raw(), before.size() * sizeof(float)) == 0;
  return {bytes_same && preds_same, printf_string("save-load-save bytes %s; logits %s", bytes_same ? "identical" : "differ",
                                                  preds_same ? "bit-identical" : "differ")};
}

struct Criterion {
  const char* name;
  double budget_seconds;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace penet

int main() {
  using namespace penet;
  const std::vector<Criterion> criteria{
      {"end-to-end pipeline on text datasets", 0, end_to_end_text_datasets},
      {"permutation invariance", 30, permutation_invariance},
      {"additivity of sum pooling", 0, additivity},
      {"sum/mean reconciliation", 0, sum_mean_reconciliation},
      {"batching equivalence", 0, batching_equivalence},
      {"gradient checks", 120, gradient_checks},
      {"synthetic classification", 300, synthetic_classification},
      {"point-count robustness", 120, point_count_robustness},
      {"MNIST desk-scale", 1200, mnist_desk_scale},
      {"FPS oracle equivalence", 0, fps_oracle},
      {"mIoU oracle", 0, miou_oracle},
      {"checkpoint roundtrip", 0, checkpoint_roundtrip},
      {"determinism", 0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      o.passed = false;
      o.detail += printf_string("; over the %.0f s budget", c.budget_seconds);
    }
    std::printf("%s %s: %s [%.1f s]\n", o.passed ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.passed;
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
