// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include "cepre/channel.hpp"

namespace cepre {

// Decision variables z = (d, x̄_1, ..., x̄_T). Xbar is 2N x T and need not be
// CE-feasible; d may be any real (feasibility is enforced by the solver).
struct DecisionPoint {
  double d = 0.0;
  Eigen::MatrixXd Xbar;
};

struct ObjectiveValues {
  double smooth = 0.0;
  double exact = 0.0;
};

struct Gradient {
  double d = 0.0;
  Eigen::MatrixXd X;
};

// Worst-case margin objective over a block and its log-sum-exp smoothing.
//
// With residuals r_{i,t} = h̄_i^T x̄_t - d s̄_{i,t} (i over the 2K real rows),
//   exact(z)  = max_{i,t} |r_{i,t}| - d
//   smooth(z) = sigma * log sum_{i,t} [exp((r_{i,t} - d)/sigma) + exp((-r_{i,t} - d)/sigma)]
// so exact <= smooth <= exact + sigma * log(4KT).
//
// All exponentials are shifted by the largest exponent before evaluation;
// the shift cancels in the gradient ratios.
class SmoothedObjective {
 public:
  // Throws ConfigError if sigma <= 0 and DomainError on a shape mismatch.
  SmoothedObjective(RealChannel channel, Eigen::MatrixXd Sbar, double sigma);

  double exact(const DecisionPoint& z) const;
  double smooth(const DecisionPoint& z) const;
  // Both objectives from a single residual evaluation.
  ObjectiveValues evaluate(const DecisionPoint& z) const;
  Gradient gradient(const DecisionPoint& z) const;
  // smooth(z) and gradient(z) sharing one residual evaluation.
  double value_and_gradient(const DecisionPoint& z, Gradient& grad) const;

  // 2K x T matrix of r_{i,t}.
  Eigen::MatrixXd residuals(const DecisionPoint& z) const;

  // Number of exponential terms, 4KT.
  Eigen::Index term_count() const { return 2 * Sbar_.size(); }
  double sandwich_gap() const;

  const Eigen::MatrixXd& Hbar() const { return Hbar_; }
  const Eigen::MatrixXd& Sbar() const { return Sbar_; }
  double sigma() const { return sigma_; }
  Eigen::Index antennas() const { return Hbar_.cols() / 2; }
  Eigen::Index slots() const { return Sbar_.cols(); }

 private:
  void check_shape(const DecisionPoint& z) const;

  Eigen::MatrixXd Hbar_;
  Eigen::MatrixXd Sbar_;
  double sigma_;
};

// Exact objective with a separate receiver gain per slot (gains.size() == T),
// max_{i,t} |h̄_i^T x̄_t - g_t s̄_{i,t}| - g_t. Used to score ZF, whose gain is per slot.
double exact_objective_per_slot(const Eigen::MatrixXd& Hbar, const Eigen::MatrixXd& Sbar,
                                const Eigen::MatrixXd& Xbar, const Eigen::VectorXd& gains);

}  // namespace cepre
