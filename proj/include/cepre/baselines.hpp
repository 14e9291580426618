// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "cepre/channel.hpp"
#include "cepre/solver.hpp"

namespace cepre {

enum class Method { Zf, CeZf, MuiMin, Pg, Fpg };

std::string to_string(Method m);
// Accepts zf, ce-zf, mui-min, pg, fpg. Throws ConfigError otherwise.
Method parse_method(const std::string& text);

// Output of any precoder. X is the complex N x T transmit block; gains(t) is
// the receiver gain users apply in slot t. CE designs share one gain over
// the block; ZF uses its per-slot normalization.
struct PrecodeResult {
  Method method = Method::Zf;
  Eigen::MatrixXcd X;
  Eigen::VectorXd gains;
  bool constant_envelope = false;
  int iterations = 0;
  double seconds = 0.0;
  // Per-iteration objective (smoothed f for PG/FPG, MUI power for MUImin).
  std::vector<double> trace;

  Eigen::MatrixXd Xbar() const { return stack_real(X); }
  double shared_gain() const { return gains.size() ? gains(0) : 0.0; }
};

// Zero-forcing without envelope constraint: x_t = c_t H^H (H H^H)^{-1} s_t
// with ||x_t||^2 = P, gain c_t. Throws LinearAlgebraError when H H^H is
// singular and ConfigError when N < K.
PrecodeResult zf_precode(const Channel& channel, const SymbolBlock& symbols, double power);

// ZF with every antenna sample rescaled to magnitude sqrt(P/N), then one
// least-squares gain for the block.
PrecodeResult ce_zf_precode(const Channel& channel, const SymbolBlock& symbols, double power);

struct MuiMinConfig {
  double tol = 1e-4;
  int max_iters = 5000;
  LineSearchConfig line_search;
  InitKind init = InitKind::CeZfWarmStart;
  // Phase stream for the random-phase start.
  std::uint64_t seed = 0;
  // Refit d by least squares after every step; otherwise d keeps its
  // least-squares value at the starting point.
  bool refit_gain = false;
};

// Total MUI power g(Xbar, d) = sum_{i,t} (h̄_i^T x̄_t - d s̄_{i,t})^2 and its Xbar-gradient.
double mui_power(const Eigen::MatrixXd& Hbar, const Eigen::MatrixXd& Sbar, const Eigen::MatrixXd& Xbar,
                 double d);
Eigen::MatrixXd mui_gradient(const Eigen::MatrixXd& Hbar, const Eigen::MatrixXd& Sbar,
                             const Eigen::MatrixXd& Xbar, double d);

// CE precoder minimizing total MUI power. Starts from CE-ZF (or random
// phases, per cfg.init) with the least-squares gain d, then takes
// backtracked projected-gradient steps on g over the CE set with d held,
// refitting d after each step when cfg.refit_gain is set. Stops when g
// improves by less than cfg.tol or after cfg.max_iters rounds. Does not
// require N >= K.
PrecodeResult mui_min_precode(const Channel& channel, const SymbolBlock& symbols, double power,
                              const MuiMinConfig& cfg = {});

// Wraps a PG/FPG solver report as a PrecodeResult.
PrecodeResult from_solver(const SolverReport& report, Method method);

}  // namespace cepre
