// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cepre/channel.hpp"
#include "cepre/objective.hpp"

namespace cepre {

enum class InitKind { RandomPhase, CeZfWarmStart };
enum class StopReason { Tolerance, MaxIters };

std::string to_string(InitKind kind);
std::string to_string(StopReason reason);
InitKind parse_init_kind(const std::string& text);

struct LineSearchConfig {
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 30;
};

struct SolverConfig {
  double sigma = 0.05;
  double tol = 1e-4;
  int max_iters = 5000;
  // Stop once the improvement stays below tol for this many consecutive iterations.
  int patience = 5;
  LineSearchConfig line_search;
  bool accelerate = false;
  bool restart_on_increase = false;
  InitKind init = InitKind::RandomPhase;
  std::uint64_t seed = 0;
  // Keep every trace_stride-th iteration in the report (0 disables the trace).
  int trace_stride = 1;

  // Throws ConfigError on an invalid combination.
  void validate() const;
};

struct TraceEntry {
  int iter = 0;
  double f_smooth = 0.0;
  double f_exact = 0.0;
  double gamma = 0.0;
  int backtracks = 0;
};

struct SolverReport {
  DecisionPoint z;
  int iterations = 0;
  StopReason stop = StopReason::MaxIters;
  double seconds = 0.0;
  int backtracks = 0;
  int failed_line_searches = 0;
  int restarts = 0;
  double initial_smooth = 0.0;
  double initial_exact = 0.0;
  double final_smooth = 0.0;
  double final_exact = 0.0;
  std::vector<TraceEntry> trace;
};

// Squared distance and inner product on (d, Xbar) pairs.
double distance_squared(const DecisionPoint& a, const DecisionPoint& b);

// Euclidean projection onto {d >= 0} x CE^T. Each antenna pair
// (x_j, x_{j+N}) is rescaled to norm sqrt(P/N); a zero pair maps to
// (sqrt(P/N), 0).
DecisionPoint project(double d, const Eigen::MatrixXd& Xbar, double power);
inline DecisionPoint project(const DecisionPoint& z, double power) {
  return project(z.d, z.Xbar, power);
}
// CE part only, in place.
void project_ce(Eigen::MatrixXd& Xbar, double power);

// project(z - gamma * grad f(z)).
DecisionPoint pg_step(const DecisionPoint& z, double gamma, const SmoothedObjective& obj, double power);

// Least-squares shared gain max{0, <Sbar, Hbar Xbar> / ||Sbar||^2}.
double ls_gain(const Eigen::MatrixXd& Hbar, const Eigen::MatrixXd& Sbar, const Eigen::MatrixXd& Xbar);

struct LineSearchStep {
  DecisionPoint point;
  double value = 0.0;
  double gamma = 0.0;
  int backtracks = 0;
  bool accepted = false;
};

// Backtracking on gamma = gamma_init * shrink^k, k = 0..max_backtracks.
// The accepted gamma, doubled, becomes the next call's gamma_init.
class BacktrackingLineSearch {
 public:
  explicit BacktrackingLineSearch(LineSearchConfig cfg);

  // From a feasible z: accepts the first trial point zt = project(z - gamma g)
  // with f(zt) <= f(z) - (c / gamma) ||zt - z||^2. On failure the smallest
  // trial is returned with accepted = false.
  LineSearchStep descend(const DecisionPoint& z, double fz, const Gradient& gz,
                         const SmoothedObjective& obj, double power);

  // From a possibly infeasible extrapolated point w: accepts zt once f(zt) is
  // below the quadratic model f(w) + <g, zt - w> + ||zt - w||^2 / (2 gamma).
  LineSearchStep descend_from_extrapolated(const DecisionPoint& w, double fw, const Gradient& gw,
                                           const SmoothedObjective& obj, double power);

  double next_gamma() const { return gamma_; }

 private:
  LineSearchConfig cfg_;
  double gamma_;
};

// Starting point per cfg.init. Random phase draws every antenna phase
// uniformly on [0, 2pi) from a generator seeded with cfg.seed.
DecisionPoint initial_point(const Channel& channel, const SymbolBlock& symbols, double power,
                            const SolverConfig& cfg);

// Core iteration from a given starting point. Runs the accelerated variant
// when cfg.accelerate is set.
SolverReport run_solver(const SmoothedObjective& obj, const DecisionPoint& start, double power,
                        const SolverConfig& cfg);

SolverReport solve_pg(const Channel& channel, const SymbolBlock& symbols, double power,
                      SolverConfig cfg);
SolverReport solve_fpg(const Channel& channel, const SymbolBlock& symbols, double power,
                       SolverConfig cfg);

// Momentum parameter recursion beta_{l+1} = (1 + sqrt(1 + 4 beta_l^2)) / 2.
double next_beta(double beta);

// CSV columns: iter,f_smooth,f_exact,gamma,backtracks
void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace);

}  // namespace cepre
