// SPDX-License-Identifier: Apache-2.0
#include "cepre/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "cepre/baselines.hpp"
#include "cepre/errors.hpp"

namespace cepre {

std::string to_string(InitKind kind) {
  return kind == InitKind::RandomPhase ? "random-phase" : "ce-zf-warm-start";
}

std::string to_string(StopReason reason) {
  return reason == StopReason::Tolerance ? "tolerance" : "max-iters";
}

InitKind parse_init_kind(const std::string& text) {
  if (text == "random-phase" || text == "random") return InitKind::RandomPhase;
  if (text == "ce-zf" || text == "ce-zf-warm-start" || text == "warm") return InitKind::CeZfWarmStart;
  throw ConfigError("unknown init '" + text + "' (expected random-phase or ce-zf-warm-start)");
}

void SolverConfig::validate() const {
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (!(line_search.shrink > 0.0 && line_search.shrink < 1.0))
    throw ConfigError("line-search shrink factor must lie in (0, 1)");
  if (!(line_search.initial_step > 0.0)) throw ConfigError("initial step must be positive");
  if (line_search.sufficient_decrease < 0.0)
    throw ConfigError("sufficient-decrease constant must be non-negative");
  if (line_search.max_backtracks < 0) throw ConfigError("max_backtracks must be non-negative");
  if (trace_stride < 0) throw ConfigError("trace stride must be non-negative");
}

double distance_squared(const DecisionPoint& a, const DecisionPoint& b) {
  const double dd = a.d - b.d;
  return dd * dd + (a.Xbar - b.Xbar).squaredNorm();
}

namespace {

double inner(const Gradient& g, const DecisionPoint& a, const DecisionPoint& b) {
  return g.d * (a.d - b.d) + (g.X.array() * (a.Xbar - b.Xbar).array()).sum();
}

DecisionPoint gradient_step(const DecisionPoint& z, const Gradient& g, double gamma, double power) {
  return project(z.d - gamma * g.d, z.Xbar - gamma * g.X, power);
}

}  // namespace

void project_ce(Eigen::MatrixXd& Xbar, double power) {
  const Eigen::Index N = Xbar.rows() / 2;
  const double amplitude = std::sqrt(power / static_cast<double>(N));
  for (Eigen::Index t = 0; t < Xbar.cols(); ++t) {
    for (Eigen::Index j = 0; j < N; ++j) {
      double& re = Xbar(j, t);
      double& im = Xbar(j + N, t);
      const double r = std::hypot(re, im);
      if (std::abs(r - amplitude) <= 4.0 * std::numeric_limits<double>::epsilon() * amplitude) {
        // Already on the circle up to rounding.
      } else if (r > 0.0) {
        re = amplitude * (re / r);
        im = amplitude * (im / r);
      } else {
        re = amplitude;
        im = 0.0;
      }
    }
  }
}

DecisionPoint project(double d, const Eigen::MatrixXd& Xbar, double power) {
  if (Xbar.rows() % 2 != 0) throw DomainError("project: Xbar must have 2N rows");
  DecisionPoint out{std::max(0.0, d), Xbar};
  project_ce(out.Xbar, power);
  return out;
}

DecisionPoint pg_step(const DecisionPoint& z, double gamma, const SmoothedObjective& obj, double power) {
  return gradient_step(z, obj.gradient(z), gamma, power);
}

double ls_gain(const Eigen::MatrixXd& Hbar, const Eigen::MatrixXd& Sbar, const Eigen::MatrixXd& Xbar) {
  const double energy = Sbar.squaredNorm();
  if (energy == 0.0) return 0.0;
  const double corr = (Sbar.array() * (Hbar * Xbar).array()).sum();
  return std::max(0.0, corr / energy);
}

BacktrackingLineSearch::BacktrackingLineSearch(LineSearchConfig cfg)
    : cfg_(cfg), gamma_(cfg.initial_step) {}

LineSearchStep BacktrackingLineSearch::descend(const DecisionPoint& z, double fz, const Gradient& gz,
                                               const SmoothedObjective& obj, double power) {
  LineSearchStep step;
  double gamma = gamma_;
  for (int k = 0; k <= cfg_.max_backtracks; ++k, gamma *= cfg_.shrink) {
    step.point = gradient_step(z, gz, gamma, power);
    step.value = obj.smooth(step.point);
    step.gamma = gamma;
    step.backtracks = k;
    const double decrease = cfg_.sufficient_decrease / gamma * distance_squared(step.point, z);
    if (step.value <= fz - decrease) {
      step.accepted = true;
      gamma_ = 2.0 * gamma;
      return step;
    }
  }
  return step;
}

LineSearchStep BacktrackingLineSearch::descend_from_extrapolated(const DecisionPoint& w, double fw,
                                                                 const Gradient& gw,
                                                                 const SmoothedObjective& obj,
                                                                 double power) {
  LineSearchStep step;
  double gamma = gamma_;
  for (int k = 0; k <= cfg_.max_backtracks; ++k, gamma *= cfg_.shrink) {
    step.point = gradient_step(w, gw, gamma, power);
    step.value = obj.smooth(step.point);
    step.gamma = gamma;
    step.backtracks = k;
    const double model = fw + inner(gw, step.point, w) + distance_squared(step.point, w) / (2.0 * gamma);
    if (step.value <= model) {
      step.accepted = true;
      gamma_ = 2.0 * gamma;
      return step;
    }
  }
  return step;
}

double next_beta(double beta) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * beta * beta)); }

DecisionPoint initial_point(const Channel& channel, const SymbolBlock& symbols, double power,
                            const SolverConfig& cfg) {
  const RealChannel real = lift(channel);
  DecisionPoint z;
  if (cfg.init == InitKind::CeZfWarmStart) {
    const PrecodeResult warm = ce_zf_precode(channel, symbols, power);
    z.Xbar = warm.Xbar();
  } else {
    const Eigen::Index N = channel.antennas();
    const Eigen::Index T = symbols.slots();
    const double amplitude = std::sqrt(power / static_cast<double>(N));
    Rng rng(cfg.seed);
    z.Xbar.resize(2 * N, T);
    for (Eigen::Index t = 0; t < T; ++t)
      for (Eigen::Index j = 0; j < N; ++j) {
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        z.Xbar(j, t) = amplitude * std::cos(phase);
        z.Xbar(j + N, t) = amplitude * std::sin(phase);
      }
  }
  z.d = ls_gain(real.Hbar, symbols.Sbar, z.Xbar);
  return z;
}

SolverReport run_solver(const SmoothedObjective& obj, const DecisionPoint& start, double power,
                        const SolverConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  SolverReport rep;
  DecisionPoint z = project(start, power);
  ObjectiveValues fz = obj.evaluate(z);
  rep.initial_smooth = fz.smooth;
  rep.initial_exact = fz.exact;
  if (cfg.trace_stride > 0) rep.trace.push_back({0, fz.smooth, fz.exact, 0.0, 0});

  BacktrackingLineSearch search(cfg.line_search);
  DecisionPoint z_prev = z;
  double beta = 1.0;
  Gradient g;

  rep.stop = StopReason::MaxIters;
  int iter = 0;
  int quiet = 0;
  while (iter < cfg.max_iters) {
    ++iter;
    LineSearchStep step;
    if (!cfg.accelerate) {
      obj.value_and_gradient(z, g);
      step = search.descend(z, fz.smooth, g, obj, power);
    } else {
      const double beta_next = next_beta(beta);
      const double momentum = (beta - 1.0) / beta_next;
      DecisionPoint w{z.d + momentum * (z.d - z_prev.d), z.Xbar + momentum * (z.Xbar - z_prev.Xbar)};
      const double fw = obj.value_and_gradient(w, g);
      step = search.descend_from_extrapolated(w, fw, g, obj, power);
      beta = beta_next;
      if (cfg.restart_on_increase && (!step.accepted || step.value > fz.smooth)) {
        // Drop the momentum and retake the step from z itself.
        ++rep.restarts;
        rep.backtracks += step.backtracks;
        beta = 1.0;
        const double f0 = obj.value_and_gradient(z, g);
        step = search.descend_from_extrapolated(z, f0, g, obj, power);
        if (step.value > fz.smooth) step.accepted = false;
      }
    }
    rep.backtracks += step.backtracks;

    double improvement = 0.0;
    if (step.accepted) {
      z_prev = std::move(z);
      z = std::move(step.point);
      const ObjectiveValues f_new = obj.evaluate(z);
      improvement = std::abs(fz.smooth - f_new.smooth);
      fz = f_new;
    } else {
      ++rep.failed_line_searches;
      z_prev = z;
    }
    if (cfg.trace_stride > 0 && iter % cfg.trace_stride == 0)
      rep.trace.push_back({iter, fz.smooth, fz.exact, step.gamma, step.backtracks});
    quiet = improvement < cfg.tol ? quiet + 1 : 0;
    if (quiet >= cfg.patience) {
      rep.stop = StopReason::Tolerance;
      break;
    }
  }

  rep.iterations = iter;
  rep.final_smooth = fz.smooth;
  rep.final_exact = fz.exact;
  rep.z = std::move(z);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

namespace {

SolverReport solve(const Channel& channel, const SymbolBlock& symbols, double power,
                   const SolverConfig& cfg) {
  cfg.validate();
  if (!(power > 0.0)) throw ConfigError("transmit power P must be positive");
  if (symbols.users() != channel.users())
    throw DomainError("symbol block has " + std::to_string(symbols.users()) +
                      " users, channel has " + std::to_string(channel.users()));
  const auto t0 = std::chrono::steady_clock::now();
  const SmoothedObjective obj(lift(channel), symbols.Sbar, cfg.sigma);
  SolverReport rep = run_solver(obj, initial_point(channel, symbols, power, cfg), power, cfg);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace

SolverReport solve_pg(const Channel& channel, const SymbolBlock& symbols, double power, SolverConfig cfg) {
  cfg.accelerate = false;
  return solve(channel, symbols, power, cfg);
}

SolverReport solve_fpg(const Channel& channel, const SymbolBlock& symbols, double power, SolverConfig cfg) {
  cfg.accelerate = true;
  return solve(channel, symbols, power, cfg);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEntry>& trace) {
  out << "iter,f_smooth,f_exact,gamma,backtracks\n";
  char buf[160];
  for (const TraceEntry& e : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.12g,%.12g,%.8g,%d\n", e.iter, e.f_smooth, e.f_exact,
                  e.gamma, e.backtracks);
    out << buf;
  }
}

}  // namespace cepre
