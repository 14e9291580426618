// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cepre/objective.hpp"

namespace cepre {

using GradientFn = std::function<Gradient(const SmoothedObjective&, const DecisionPoint&)>;

struct SelfCheckOptions {
  bool quick = false;
  std::uint64_t seed = 2024;
  // Replaces the analytic gradient under test; empty means the real one.
  GradientFn gradient;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Fast invariant suite: gradient vs finite differences, projection vs
// angular grid search, log-sum-exp sandwich, SER bound vs Monte Carlo,
// PG descent.
std::vector<CheckResult> run_self_checks(const SelfCheckOptions& options);

// Largest coordinate-wise relative error of `grad` against central finite
// differences of obj.smooth with step h. Coordinates are compared relative
// to max(|analytic|, |numeric|, 1e-3 * max_k |analytic_k|).
double gradient_fd_error(const SmoothedObjective& obj, const DecisionPoint& z, const Gradient& grad,
                         double h = 1e-6);

}  // namespace cepre
