#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "penet/layers.hpp"

namespace penet {

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-6;
  /// Entries checked per parameter tensor; 0 checks every entry.
  std::size_t max_entries_per_param = 0;
  /// Relative error is |a - n| / max(|a|, |n|, floor).
  double denominator_floor = 1e-6;
  std::uint64_t seed = 0;
  /// With a pattern callback: the check fails when more than this fraction
  /// of probed entries straddle a kink.
  double max_skipped_fraction = 0.25;
};

struct GradCheckEntry {
  std::string param;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel_error = 0.0;
};

struct GradCheckReport {
  bool passed = true;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  /// Probes whose ±step evaluations changed the activation pattern.
  std::size_t skipped = 0;
  GradCheckEntry worst;
};

/// Compares analytic gradients against central finite differences.
///
/// `loss` evaluates the scalar objective from the current parameter values.
/// `compute_grads` must leave d(loss)/d(param) in every `Param::grad`
/// (zeroing first is its responsibility). Values are restored after each
/// probe.
///
/// For piecewise-smooth objectives, `pattern` returns a fingerprint of the
/// branch taken by the most recent `loss` call (ReLU signs, max indices). An
/// entry whose +step and -step evaluations land on a different branch than
/// the unperturbed point is skipped and the next sampled entry is used.
GradCheckReport grad_check(const ParamRefs<double>& params, const std::function<double()>& loss,
                           const std::function<void()>& compute_grads, const GradCheckOptions& options = {},
                           const std::function<std::uint64_t()>& pattern = {});

double relative_error(double analytic, double numeric, double floor);

}  // namespace penet
