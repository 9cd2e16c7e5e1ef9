#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "penet/aggregate.hpp"
#include "penet/checkpoint.hpp"
#include "penet/dataset.hpp"
#include "penet/evaluate.hpp"
#include "penet/idx.hpp"
#include "penet/model_gradcheck.hpp"
#include "penet/sampling.hpp"
#include "penet/synth.hpp"
#include "penet/train.hpp"
#include "run_config.hpp"

namespace penet::cli {
namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

Dataset load_split(const fs::path& root, std::string_view split) {
  return load_dataset(DatasetManifest::load(root, split));
}

std::optional<Dataset> load_validation(const fs::path& root) {
  for (std::string_view split : {"val", "test"}) {
    if (DatasetManifest::exists(root, split)) return load_split(root, split);
  }
  return std::nullopt;
}

MetricsReport run_eval(const PeNet<float>& model, const Dataset& data, const EvalOptions& opt) {
  check_compatible(model, data);
  return model.config().task == Task::kClassify ? evaluate_classification(model, data, opt)
                                                 : evaluate_segmentation(model, data, opt);
}

}  // namespace

std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view tok(text.data() + pos, end - pos);
    pos = end + 1;
    if (tok.empty()) continue;
    std::size_t n = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), n);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || n == 0) {
      throw ConfigError("invalid point count '" + std::string(tok) + "'");
    }
    out.push_back(n);
  }
  if (out.empty()) throw ConfigError("point-count list is empty");
  return out;
}

int cmd_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> overrides = args.overrides;
  if (args.seed) overrides.push_back("seed=" + std::to_string(*args.seed));
  RunConfig rc = RunConfig::build(args.config, overrides);
  rc.train.threads = resolve_threads(args.threads);

  const Dataset train_set = load_split(args.data, "train");
  const std::optional<Dataset> val_set = load_validation(args.data);

  TrainResult result = train(train_set, val_set ? &*val_set : nullptr, rc.train, [&](const EpochLog& e) {
    err << "epoch " << e.epoch << "/" << rc.train.epochs << " loss=" << fixed(e.loss)
        << " train_acc=" << fixed(e.train_acc, 4);
    if (!std::isnan(e.val_acc)) err << " val_acc=" << fixed(e.val_acc, 4);
    err << " (" << fixed(e.seconds, 1) << "s)\n";
  });

  save_checkpoint(result.model, args.out);
  const fs::path log_path = args.log ? *args.log : fs::path(args.out.string() + ".log.csv");
  write_text_file(log_path, format_train_log(result.log));
  out << "checkpoint " << args.out.string() << "\nlog " << log_path.string() << "\n";
  return 0;
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream&) {
  const PeNet<float> model = load_checkpoint(args.ckpt);
  const Dataset data = load_split(args.data, args.split);
  EvalOptions opt;
  opt.points = args.points;
  opt.threads = resolve_threads(args.threads);
  const MetricsReport report = run_eval(model, data, opt);
  out << report.to_text(model.config().class_names) << report.metrics_line() << "\n";
  return 0;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream&) {
  if (args.points.empty()) throw ConfigError("point-count list is empty");
  const PeNet<float> model = load_checkpoint(args.ckpt);
  const Dataset data = load_split(args.data, args.split);
  check_compatible(model, data);
  EvalOptions opt;
  opt.threads = resolve_threads(args.threads);
  const auto rows = sweep_point_count(model, data, args.points, opt);
  const std::string csv = format_sweep_csv(rows);
  write_text_file(args.out, csv);
  out << csv;
  return 0;
}

int cmd_embed(const EmbedArgs& args, std::ostream& out, std::ostream&) {
  const PeNet<float> model = load_checkpoint(args.ckpt);
  const PointCloud cloud = load_cloud_text(args.cloud);
  const std::size_t din = model.config().din;
  if (cloud.din() != din) {
    throw ConfigError("cloud has " + std::to_string(cloud.din()) + " features per point, checkpoint expects " +
                      std::to_string(din));
  }
  const PointCloud prepared = zero_mean_normalize(cloud);
  const Tensor<float> features = prepared.features();
  const Tensor<float> embedded = model.encoder.embed_batch(features, BatchLayout{1, prepared.size()});

  // Sorted-order pooling keeps the line identical for permuted input files.
  Tensor<float> pooled = canonical_sum_pool(embedded);
  for (float& v : pooled.data()) v /= static_cast<float>(prepared.size());
  const Tensor<float> feature = min_max_normalize(pooled);

  std::string line;
  for (std::size_t i = 0; i < feature.size(); ++i) {
    if (i) line += ' ';
    line += fixed(feature[i], 8);
  }
  out << line << "\n";
  return 0;
}

int cmd_gradcheck(const GradcheckArgs& args, std::ostream& out, std::ostream& err) {
  ModelGradCheckOptions opt;
  opt.seed = args.seed;
  opt.after_backward = args.after_backward;

  bool all_passed = true;
  for (Task task : {Task::kClassify, Task::kSegment}) {
    ModelConfig cfg;
    cfg.task = task;
    cfg.k = args.k;
    cfg.encoder_depth = args.depth;
    if (task == Task::kClassify) {
      cfg.num_classes = 4;
    } else {
      cfg.num_parts = 3;
      if (args.depth < 2) {
        out << "segment depth=" << args.depth << " skipped (encoder has no 128-wide layer)\n";
        continue;
      }
    }

    const GradCheckReport r = check_model_gradients(cfg, opt);
    out << to_string(task) << " depth=" << args.depth << " k=" << args.k << " entries=" << r.checked << " skipped=" << r.skipped
        << " max_rel_error=" << r.max_rel_error << (r.passed ? " PASS" : " FAIL") << "\n";
    if (!r.passed) {
      all_passed = false;
      err << to_string(task) << ": worst " << r.worst.param << "[" << r.worst.index << "] analytic=" << r.worst.analytic
          << " numeric=" << r.worst.numeric << " rel_error=" << r.worst.rel_error << "\n";
    }
  }
  return all_passed ? 0 : 1;
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream&) {
  for (const std::string& split : args.splits) {
    const DatasetManifest m = synth_shapes(args.out, split, args.per_class, args.points, args.seed);
    out << split << ": " << m.entries.size() << " clouds -> "
        << DatasetManifest::manifest_path(args.out, split).string() << "\n";
  }
  return 0;
}

int cmd_mnist(const MnistArgs& args, std::ostream& out, std::ostream&) {
  const std::vector<IdxImage> images = load_idx_images(args.images, args.labels);
  const std::size_t n = args.count ? std::min(args.count, images.size()) : images.size();

  DatasetManifest m;
  m.root = args.out;
  m.split = args.split;
  for (int d = 0; d < 10; ++d) m.class_names.push_back(std::to_string(d));

  fs::create_directories(args.out / args.split);
  for (std::size_t i = 0; i < n; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%05zu.txt", i);
    const fs::path rel = fs::path(args.split) / name;
    const PointCloud cloud = mnist_to_pointcloud(images[i], args.points, hash_seed({args.seed, i}));
    write_text_file(args.out / rel, format_cloud_text(cloud));
    m.entries.push_back({rel, images[i].label, std::nullopt});
  }
  m.save();
  out << args.split << ": " << n << " clouds -> " << DatasetManifest::manifest_path(args.out, args.split).string()
      << "\n";
  return 0;
}

}  // namespace penet::cli
