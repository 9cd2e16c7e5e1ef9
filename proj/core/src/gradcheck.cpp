#include "penet/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "penet/rng.hpp"

namespace penet {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

namespace {

/// All indices, shuffled when only a sample will be probed.
std::vector<std::size_t> probe_order(std::size_t size, bool shuffle, Rng& rng) {
  std::vector<std::size_t> idx(size);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (!shuffle) return idx;
  for (std::size_t i = 0; i + 1 < size; ++i) std::swap(idx[i], idx[i + rng.below(size - i)]);
  return idx;
}

}  // namespace

GradCheckReport grad_check(const ParamRefs<double>& params, const std::function<double()>& loss,
                           const std::function<void()>& compute_grads, const GradCheckOptions& options,
                           const std::function<std::uint64_t()>& pattern) {
  compute_grads();
  std::vector<Tensor<double>> analytic;
  analytic.reserve(params.size());
  for (const Param<double>* p : params) analytic.push_back(p->grad);

  std::uint64_t base_pattern = 0;
  if (pattern) {
    loss();
    base_pattern = pattern();
  }

  GradCheckReport report;
  Rng rng(options.seed);
  const std::size_t limit = options.max_entries_per_param;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param<double>& p = *params[k];
    const bool sample = limit != 0 && limit < p.value.size();
    std::size_t taken = 0;
    for (std::size_t i : probe_order(p.value.size(), sample, rng)) {
      if (sample && taken == limit) break;
      const double saved = p.value[i];
      p.value[i] = saved + options.step;
      const double up = loss();
      const bool up_same = !pattern || pattern() == base_pattern;
      p.value[i] = saved - options.step;
      const double down = loss();
      const bool down_same = !pattern || pattern() == base_pattern;
      p.value[i] = saved;
      if (!up_same || !down_same) {
        ++report.skipped;
        continue;
      }
      ++taken;

      const double numeric = (up - down) / (2.0 * options.step);
      const double a = analytic[k][i];
      double err = relative_error(a, numeric, options.denominator_floor);
      if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
      ++report.checked;
      if (report.checked == 1 || err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst = {p.name, i, a, numeric, err};
      }
    }
  }
  const double probed = static_cast<double>(report.checked + report.skipped);
  report.passed = report.checked > 0 && report.max_rel_error < options.tolerance &&
                  static_cast<double>(report.skipped) <= options.max_skipped_fraction * probed;
  return report;
}

}  // namespace penet
