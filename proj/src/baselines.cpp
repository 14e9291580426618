// SPDX-License-Identifier: Apache-2.0
#include "cepre/baselines.hpp"

#include <chrono>
#include <cmath>

#include "cepre/errors.hpp"

namespace cepre {

std::string to_string(Method m) {
  switch (m) {
    case Method::Zf: return "zf";
    case Method::CeZf: return "ce-zf";
    case Method::MuiMin: return "mui-min";
    case Method::Pg: return "pg";
    case Method::Fpg: return "fpg";
  }
  return "?";
}

Method parse_method(const std::string& text) {
  if (text == "zf") return Method::Zf;
  if (text == "ce-zf" || text == "cezf") return Method::CeZf;
  if (text == "mui-min" || text == "muimin") return Method::MuiMin;
  if (text == "pg") return Method::Pg;
  if (text == "fpg") return Method::Fpg;
  throw ConfigError("unknown method '" + text + "' (expected zf, ce-zf, mui-min, pg, fpg)");
}

namespace {

Eigen::MatrixXcd zf_directions(const Channel& channel, const SymbolBlock& symbols) {
  if (channel.antennas() < channel.users())
    throw ConfigError("zero-forcing needs N >= K (N=" + std::to_string(channel.antennas()) +
                      ", K=" + std::to_string(channel.users()) + ")");
  if (symbols.users() != channel.users()) throw DomainError("symbol block does not match channel users");
  const Eigen::MatrixXcd gram = channel.H * channel.H.adjoint();
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible())
    throw LinearAlgebraError("zero-forcing: channel is rank deficient (rank " +
                             std::to_string(lu.rank()) + " < K=" + std::to_string(channel.users()) + ")");
  return channel.H.adjoint() * lu.solve(symbols.S);
}

}  // namespace

PrecodeResult zf_precode(const Channel& channel, const SymbolBlock& symbols, double power) {
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXcd X = zf_directions(channel, symbols);
  Eigen::VectorXd gains(X.cols());
  for (Eigen::Index t = 0; t < X.cols(); ++t) {
    const double norm = X.col(t).norm();
    gains(t) = norm > 0.0 ? std::sqrt(power) / norm : 0.0;
    X.col(t) *= gains(t);
  }
  PrecodeResult out{Method::Zf, std::move(X), std::move(gains), false, 0, 0.0, {}};
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

PrecodeResult ce_zf_precode(const Channel& channel, const SymbolBlock& symbols, double power) {
  const auto t0 = std::chrono::steady_clock::now();
  Eigen::MatrixXd Xbar = stack_real(zf_directions(channel, symbols));
  project_ce(Xbar, power);
  const double d = ls_gain(lift(channel).Hbar, symbols.Sbar, Xbar);
  PrecodeResult out{Method::CeZf, unstack_real(Xbar), Eigen::VectorXd::Constant(symbols.slots(), d),
                    true, 0, 0.0, {}};
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

double mui_power(const Eigen::MatrixXd& Hbar, const Eigen::MatrixXd& Sbar, const Eigen::MatrixXd& Xbar,
                 double d) {
  return (Hbar * Xbar - d * Sbar).squaredNorm();
}

Eigen::MatrixXd mui_gradient(const Eigen::MatrixXd& Hbar, const Eigen::MatrixXd& Sbar,
                             const Eigen::MatrixXd& Xbar, double d) {
  return 2.0 * Hbar.transpose() * (Hbar * Xbar - d * Sbar);
}

PrecodeResult mui_min_precode(const Channel& channel, const SymbolBlock& symbols, double power,
                              const MuiMinConfig& cfg) {
  if (!(cfg.tol > 0.0) || cfg.max_iters < 1) throw ConfigError("mui-min: invalid stopping rule");
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::MatrixXd Hbar = lift(channel).Hbar;
  const Eigen::MatrixXd& Sbar = symbols.Sbar;

  Eigen::MatrixXd X;
  if (cfg.init == InitKind::RandomPhase) {
    SolverConfig start;
    start.seed = cfg.seed;
    X = initial_point(channel, symbols, power, start).Xbar;
  } else if (channel.antennas() >= channel.users()) {
    try {
      X = ce_zf_precode(channel, symbols, power).Xbar();
    } catch (const LinearAlgebraError&) {
      X.resize(0, 0);
    }
  }
  if (X.size() == 0) {
    // Matched-filter start when ZF is unavailable.
    X = stack_real(channel.H.adjoint() * symbols.S);
    project_ce(X, power);
  }
  double d = ls_gain(Hbar, Sbar, X);
  double g = mui_power(Hbar, Sbar, X, d);

  PrecodeResult out;
  out.method = Method::MuiMin;
  out.constant_envelope = true;
  out.trace.push_back(g);

  double gamma = cfg.line_search.initial_step;
  int iter = 0;
  while (iter < cfg.max_iters) {
    ++iter;
    const Eigen::MatrixXd grad = mui_gradient(Hbar, Sbar, X, d);
    Eigen::MatrixXd trial;
    double g_trial = g;
    bool accepted = false;
    double step = gamma;
    for (int k = 0; k <= cfg.line_search.max_backtracks; ++k, step *= cfg.line_search.shrink) {
      trial = X - step * grad;
      project_ce(trial, power);
      g_trial = mui_power(Hbar, Sbar, trial, d);
      if (g_trial <= g - cfg.line_search.sufficient_decrease / step * (trial - X).squaredNorm()) {
        accepted = true;
        gamma = 2.0 * step;
        break;
      }
    }
    double g_new = g;
    if (accepted) {
      X = std::move(trial);
      if (cfg.refit_gain) d = ls_gain(Hbar, Sbar, X);
      g_new = mui_power(Hbar, Sbar, X, d);
    }
    out.trace.push_back(g_new);
    const double improvement = g - g_new;
    g = g_new;
    if (improvement < cfg.tol) break;
  }

  out.X = unstack_real(X);
  out.gains = Eigen::VectorXd::Constant(symbols.slots(), d);
  out.iterations = iter;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

PrecodeResult from_solver(const SolverReport& report, Method method) {
  PrecodeResult out;
  out.method = method;
  out.X = unstack_real(report.z.Xbar);
  out.gains = Eigen::VectorXd::Constant(report.z.Xbar.cols(), report.z.d);
  out.constant_envelope = true;
  out.iterations = report.iterations;
  out.seconds = report.seconds;
  out.trace.reserve(report.trace.size());
  for (const TraceEntry& e : report.trace) out.trace.push_back(e.f_smooth);
  return out;
}

}  // namespace cepre
