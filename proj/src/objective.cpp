// SPDX-License-Identifier: Apache-2.0
#include "cepre/objective.hpp"

#include <cmath>
#include <string>

#include "cepre/errors.hpp"

namespace cepre {

SmoothedObjective::SmoothedObjective(RealChannel channel, Eigen::MatrixXd Sbar, double sigma)
    : Hbar_(std::move(channel.Hbar)), Sbar_(std::move(Sbar)), sigma_(sigma) {
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_))
    throw ConfigError("smoothing parameter sigma must be positive, got " + std::to_string(sigma));
  if (Hbar_.rows() != Sbar_.rows())
    throw DomainError("channel has " + std::to_string(Hbar_.rows()) + " real rows, symbols have " +
                      std::to_string(Sbar_.rows()));
}

void SmoothedObjective::check_shape(const DecisionPoint& z) const {
  if (z.Xbar.rows() != Hbar_.cols() || z.Xbar.cols() != Sbar_.cols())
    throw DomainError("decision point has shape " + std::to_string(z.Xbar.rows()) + "x" +
                      std::to_string(z.Xbar.cols()) + ", expected " +
                      std::to_string(Hbar_.cols()) + "x" + std::to_string(Sbar_.cols()));
}

Eigen::MatrixXd SmoothedObjective::residuals(const DecisionPoint& z) const {
  check_shape(z);
  return Hbar_ * z.Xbar - z.d * Sbar_;
}

double SmoothedObjective::exact(const DecisionPoint& z) const {
  return residuals(z).cwiseAbs().maxCoeff() - z.d;
}

double SmoothedObjective::sandwich_gap() const {
  return sigma_ * std::log(static_cast<double>(term_count()));
}

ObjectiveValues SmoothedObjective::evaluate(const DecisionPoint& z) const {
  const Eigen::ArrayXXd r = residuals(z).array();
  // Largest exponent is (max|r| - d)/sigma; subtracting it bounds every term by 1.
  const double peak = r.abs().maxCoeff();
  const double inv = 1.0 / sigma_;
  const double sum = ((r - peak) * inv).exp().sum() + ((-r - peak) * inv).exp().sum();
  return {peak - z.d + sigma_ * std::log(sum), peak - z.d};
}

double SmoothedObjective::smooth(const DecisionPoint& z) const { return evaluate(z).smooth; }

double SmoothedObjective::value_and_gradient(const DecisionPoint& z, Gradient& grad) const {
  const Eigen::ArrayXXd r = residuals(z).array();
  const double peak = r.abs().maxCoeff();
  const double inv = 1.0 / sigma_;
  // Shifted weights W^P, W^N; the common factor exp(-(peak - d)/sigma) cancels.
  const Eigen::ArrayXXd wp = ((r - peak) * inv).exp();
  const Eigen::ArrayXXd wn = ((-r - peak) * inv).exp();
  const double total = wp.sum() + wn.sum();
  const Eigen::ArrayXXd& s = Sbar_.array();

  grad.X.noalias() = Hbar_.transpose() * ((wp - wn).matrix() / total);
  grad.d = (-(wp * (s + 1.0)) + wn * (s - 1.0)).sum() / total;
  return peak - z.d + sigma_ * std::log(total);
}

Gradient SmoothedObjective::gradient(const DecisionPoint& z) const {
  Gradient g;
  value_and_gradient(z, g);
  return g;
}

double exact_objective_per_slot(const Eigen::MatrixXd& Hbar, const Eigen::MatrixXd& Sbar,
                                const Eigen::MatrixXd& Xbar, const Eigen::VectorXd& gains) {
  if (gains.size() != Sbar.cols() || Xbar.cols() != Sbar.cols() || Hbar.cols() != Xbar.rows())
    throw DomainError("exact_objective_per_slot: shape mismatch");
  const Eigen::MatrixXd HX = Hbar * Xbar;
  double worst = -std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < Sbar.cols(); ++t) {
    const double dist = (HX.col(t) - gains(t) * Sbar.col(t)).cwiseAbs().maxCoeff();
    worst = std::max(worst, dist - gains(t));
  }
  return worst;
}

}  // namespace cepre
