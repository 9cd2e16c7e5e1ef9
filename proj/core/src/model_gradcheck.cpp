#include "penet/model_gradcheck.hpp"

#include <algorithm>
#include <utility>

#include "penet/rng.hpp"

namespace penet {
namespace {

struct PatternHash {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL;
  void add(std::uint64_t v) { h = mix64(h ^ v); }
  void signs(const Tensor<double>& t) {
    std::uint64_t word = 0;
    std::size_t bits = 0;
    for (double v : t.data()) {
      word = (word << 1) | (v > 0.0 ? 1u : 0u);
      if (++bits == 64) add(std::exchange(word, 0)), bits = 0;
    }
    add(word);
  }
  void indices(const std::vector<std::size_t>& idx) {
    for (std::size_t i : idx) add(i);
  }
};

/// Fingerprint of every branch taken by a forward pass: ReLU signs, max-pool
/// winners and the min/max positions used by normalization.
std::uint64_t branch_pattern(const ForwardTrace<double>& t) {
  PatternHash h;
  for (std::size_t l = 1; l < t.encoder.activations.size(); ++l) h.signs(t.encoder.activations[l]);
  h.indices(t.aggregate.argmin);
  h.indices(t.aggregate.argmax);
  if (t.cls.valid) {
    h.signs(t.cls.act1);
    h.indices(t.cls.pool1.argmax);
    h.signs(t.cls.act2);
    h.indices(t.cls.pool2.argmax);
    h.signs(t.cls.hidden);
  }
  if (t.seg.valid) {
    h.signs(t.seg.hidden1);
    h.signs(t.seg.hidden2);
  }
  return h.h;
}

}  // namespace

GradCheckReport check_model_gradients(const ModelConfig& config, const ModelGradCheckOptions& options) {
  PeNet<double> model(config);
  model.init(options.seed);
  const BatchLayout layout{options.clouds, options.points};
  const std::size_t m = layout.rows();

  // Redraw inputs until every cloud's pooled feature is away from a min/max tie.
  Rng rng(hash_seed({options.seed, 0x696e70}));
  Tensor<double> x({m, config.din});
  for (int attempt = 0;; ++attempt) {
    for (double& v : x.data()) v = rng.uniform(-1.0, 1.0);
    ForwardTrace<double> probe;
    model.forward(x, layout, &probe);
    bool tied = false;
    for (std::size_t c = 0; c < layout.bs && !tied; ++c) {
      auto pooled = probe.aggregate.pooled.row(c);
      const auto [lo, hi] = std::minmax_element(pooled.begin(), pooled.end());
      tied = has_extremum_tie<double>(pooled, (*hi - *lo) * options.tie_fraction);
    }
    if (!tied) break;
    if (attempt == 100) throw StateError("gradient check could not draw inputs free of min/max ties");
  }

  std::vector<int> labels;
  const std::size_t classes = config.task == Task::kClassify ? config.num_classes : config.num_parts;
  const std::size_t rows = config.task == Task::kClassify ? layout.bs : m;
  for (std::size_t i = 0; i < rows; ++i) labels.push_back(static_cast<int>(rng.below(classes)));

  Param<double> input("input", x.shape());
  input.value = x;

  ParamRefs<double> params = model.params();
  ParamRefs<double> probed = params;
  if (options.check_inputs) probed.push_back(&input);

  std::uint64_t last_pattern = 0;
  auto loss = [&] {
    ForwardTrace<double> trace;
    const double l = softmax_cross_entropy(model.forward(input.value, layout, &trace), labels).loss;
    last_pattern = branch_pattern(trace);
    return l;
  };
  auto grads = [&] {
    zero_grads(params);
    ForwardTrace<double> trace;
    const auto logits = model.forward(input.value, layout, &trace);
    const auto l = softmax_cross_entropy(logits, labels);
    input.grad = model.backward(trace, l.grad, true);
    if (options.after_backward) options.after_backward(params);
  };
  return grad_check(probed, loss, grads, options.check, [&] { return last_pattern; });
}

}  // namespace penet
