// SPDX-License-Identifier: Apache-2.0
#include "cepre/selfcheck.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "cepre/baselines.hpp"
#include "cepre/metrics.hpp"
#include "cepre/solver.hpp"

namespace cepre {

namespace {

std::string format(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

struct Instance {
  Channel channel;
  SymbolBlock symbols;
  SmoothedObjective obj;
  DecisionPoint z;
};

Instance random_instance(Rng& rng, int N, int K, int T, double sigma) {
  const QamConstellation c(2);
  Channel ch = rayleigh_channel(K, N, rng);
  SymbolBlock sym = random_symbols(c, K, T, rng);
  SmoothedObjective obj(lift(ch), sym.Sbar, sigma);
  DecisionPoint z;
  z.d = 0.5 * rng.uniform();
  z.Xbar.resize(2 * N, T);
  for (Eigen::Index k = 0; k < z.Xbar.size(); ++k) z.Xbar(k) = rng.normal() / std::sqrt(2.0 * N);
  return {std::move(ch), std::move(sym), std::move(obj), std::move(z)};
}

CheckResult check_gradient(const SelfCheckOptions& o) {
  Rng rng(derive_seed(o.seed, 1));
  const int count = o.quick ? 4 : 12;
  double worst = 0.0;
  for (int n = 0; n < count; ++n) {
    Instance in = random_instance(rng, n % 2 ? 16 : 8, n % 2 ? 4 : 2, n % 3 ? 3 : 1, 0.05);
    const Gradient g = o.gradient ? o.gradient(in.obj, in.z) : in.obj.gradient(in.z);
    worst = std::max(worst, gradient_fd_error(in.obj, in.z, g));
  }
  return {"gradient-finite-difference", worst < 1e-5, format("max relative error %.3g (limit 1e-5)", worst)};
}

CheckResult check_projection(const SelfCheckOptions& o) {
  Rng rng(derive_seed(o.seed, 2));
  const int pairs = o.quick ? 50 : 200;
  const int grid = 10000;
  const double step = 2.0 * std::numbers::pi / grid;
  const double amp = std::sqrt(0.5);
  double worst_gap = 0.0;
  for (int p = 0; p < pairs; ++p) {
    Eigen::MatrixXd X(2, 1);
    X << rng.normal(), rng.normal();
    const DecisionPoint z = project(0.0, X, 0.5);
    const double closed = std::hypot(z.Xbar(0) - X(0), z.Xbar(1) - X(1));
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < grid; ++k)
      best = std::min(best, std::hypot(amp * std::cos(k * step) - X(0), amp * std::sin(k * step) - X(1)));
    // Grid optimum can beat the closed form only by rounding; it may trail by O(step^2).
    worst_gap = std::max(worst_gap, closed - best);
  }
  return {"projection-grid-search", worst_gap <= 1e-12, format("closed form minus grid optimum %.3g", worst_gap)};
}

CheckResult check_sandwich(const SelfCheckOptions& o) {
  Rng rng(derive_seed(o.seed, 3));
  const int count = o.quick ? 100 : 400;
  int violations = 0;
  for (int n = 0; n < count; ++n) {
    Instance in = random_instance(rng, 8, 2, 1 + n % 4, n % 2 ? 0.05 : 0.5);
    const ObjectiveValues v = in.obj.evaluate(in.z);
    if (v.smooth < v.exact - 1e-12 || v.smooth > v.exact + in.obj.sandwich_gap() + 1e-12) ++violations;
  }
  return {"log-sum-exp-sandwich", violations == 0, format("%.0f violations over %.0f points", violations, count)};
}

CheckResult check_ser_bound(const SelfCheckOptions& o) {
  Rng rng(derive_seed(o.seed, 4));
  const QamConstellation c(2);
  const Channel ch = rayleigh_channel(2, 16, rng);
  const SymbolBlock sym = random_symbols(c, 2, 4, rng);
  SolverConfig sc;
  sc.seed = 7;
  sc.trace_stride = 0;
  const SolverReport rep = solve_fpg(ch, sym, 1.0, sc);
  const Eigen::MatrixXcd X = unstack_real(rep.z.Xbar);
  const double sigma_n = std::max(1e-3, rep.z.d / 1.5);
  const SerBound bound = ser_upper_bound(ch, X, rep.z.d, sym, sigma_n);
  const std::int64_t draws = o.quick ? 20000 : 100000;
  const SlotErrorRates emp = slot_error_rates(ch, X, rep.z.d, sym, c, sigma_n, rng, draws);
  double worst = -1.0;
  for (Eigen::Index t = 0; t < sym.slots(); ++t)
    for (Eigen::Index i = 0; i < sym.users(); ++i) {
      if (!c.is_interior(sym.S(i, t))) continue;
      const double p = emp.ser(i, t);
      const double se = std::sqrt(std::max(p * (1 - p), 1.0 / draws) / draws);
      worst = std::max(worst, p - bound.combined(i, t) - 3.0 * se);
    }
  return {"ser-bound-monte-carlo", worst <= 0.0, format("max excess over bound + 3 SE: %.3g", worst)};
}

CheckResult check_descent(const SelfCheckOptions& o) {
  Rng rng(derive_seed(o.seed, 5));
  const QamConstellation c(2);
  const int N = o.quick ? 16 : 32;
  const Channel ch = rayleigh_channel(4, N, rng);
  const SymbolBlock sym = random_symbols(c, 4, 5, rng);
  SolverConfig sc;
  sc.seed = 3;
  const SolverReport rep = solve_pg(ch, sym, 1.0, sc);
  int violations = 0;
  for (std::size_t k = 1; k < rep.trace.size(); ++k)
    if (rep.trace[k].f_smooth > rep.trace[k - 1].f_smooth) ++violations;
  const bool ok = violations == 0 && ce_violation(rep.z.Xbar, 1.0) < 1e-12 && rep.z.d >= 0.0;
  return {"pg-monotone-descent", ok, format("%.0f increases over %.0f iterations", violations, rep.iterations)};
}

}  // namespace

double gradient_fd_error(const SmoothedObjective& obj, const DecisionPoint& z, const Gradient& grad, double h) {
  const Eigen::Index n = z.Xbar.size();
  Eigen::VectorXd analytic(n + 1), numeric(n + 1);
  analytic(0) = grad.d;
  DecisionPoint probe = z;
  probe.d = z.d + h;
  const double fp = obj.smooth(probe);
  probe.d = z.d - h;
  const double fm = obj.smooth(probe);
  numeric(0) = (fp - fm) / (2 * h);
  probe.d = z.d;
  for (Eigen::Index k = 0; k < n; ++k) {
    analytic(k + 1) = grad.X(k);
    const double orig = probe.Xbar(k);
    probe.Xbar(k) = orig + h;
    const double up = obj.smooth(probe);
    probe.Xbar(k) = orig - h;
    const double down = obj.smooth(probe);
    probe.Xbar(k) = orig;
    numeric(k + 1) = (up - down) / (2 * h);
  }
  const double floor = 1e-3 * analytic.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (Eigen::Index k = 0; k <= n; ++k) {
    const double denom = std::max({std::abs(analytic(k)), std::abs(numeric(k)), floor});
    if (denom > 0.0) worst = std::max(worst, std::abs(analytic(k) - numeric(k)) / denom);
  }
  return worst;
}

std::vector<CheckResult> run_self_checks(const SelfCheckOptions& options) {
  return {check_gradient(options), check_projection(options), check_sandwich(options),
          check_ser_bound(options), check_descent(options)};
}

}  // namespace cepre
