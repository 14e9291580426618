// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cepre/errors.hpp"
#include "cepre/solver.hpp"
#include "doctest.h"

using namespace cepre;
using Eigen::MatrixXd;

namespace {

struct Problem {
  Channel channel;
  SymbolBlock symbols;
};

Problem make_problem(int N, int K, int T, std::uint64_t seed, int L = 2) {
  Rng rng(seed);
  Problem p;
  p.channel = rayleigh_channel(K, N, rng);
  p.symbols = random_symbols(QamConstellation(L), K, T, rng);
  return p;
}

DecisionPoint random_feasible(int N, int T, double P, Rng& rng) {
  DecisionPoint z{0.1 + rng.uniform(), MatrixXd(2 * N, T)};
  for (Eigen::Index k = 0; k < z.Xbar.size(); ++k) z.Xbar(k) = rng.normal();
  project_ce(z.Xbar, P);
  return z;
}

// Dense matrix A with f(z) = sigma * logsumexp(A [d; vec Xbar] / sigma).
MatrixXd exponent_map(const SmoothedObjective& obj) {
  const MatrixXd& H = obj.Hbar();
  const MatrixXd& S = obj.Sbar();
  const Eigen::Index rows = S.rows(), T = S.cols(), n2 = H.cols();
  MatrixXd A = MatrixXd::Zero(2 * rows * T, 1 + n2 * T);
  Eigen::Index r = 0;
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index i = 0; i < rows; ++i)
      for (double sign : {1.0, -1.0}) {
        A(r, 0) = -sign * S(i, t) - 1.0;
        A.block(r, 1 + t * n2, 1, n2) = sign * H.row(i);
        ++r;
      }
  return A;
}

}  // namespace

TEST_CASE("projection examples") {
  MatrixXd X(4, 1);
  X << 3.0, 1.0, 4.0, 0.0;
  const DecisionPoint z = project(-0.3, X, 1.0);
  CHECK(z.d == 0.0);
  CHECK(z.Xbar(0, 0) == doctest::Approx(0.42426).epsilon(1e-5));
  CHECK(z.Xbar(2, 0) == doctest::Approx(0.56569).epsilon(1e-5));
  CHECK(z.Xbar(1, 0) == doctest::Approx(std::sqrt(0.5)));
  CHECK(z.Xbar(3, 0) == 0.0);
  CHECK(project(0.7, X, 1.0).d == 0.7);
}

TEST_CASE("zero pairs map to phase zero") {
  const DecisionPoint z = project(1.0, MatrixXd::Zero(6, 2), 3.0);
  for (Eigen::Index t = 0; t < 2; ++t)
    for (Eigen::Index j = 0; j < 3; ++j) {
      CHECK(z.Xbar(j, t) == 1.0);
      CHECK(z.Xbar(j + 3, t) == 0.0);
    }
}

TEST_CASE("projection is feasible and idempotent") {
  Rng rng(1);
  for (int n = 0; n < 100; ++n) {
    MatrixXd X(2 * 16, 5);
    for (Eigen::Index k = 0; k < X.size(); ++k) X(k) = 3.0 * rng.normal();
    const double P = 0.1 + 5.0 * rng.uniform();
    const DecisionPoint once = project(rng.normal(), X, P);
    CHECK(once.d >= 0.0);
    CHECK(ce_violation(once.Xbar, P) < 1e-12);
    const DecisionPoint twice = project(once, P);
    CHECK(twice.d == once.d);
    CHECK(twice.Xbar == once.Xbar);
  }
}

TEST_CASE("projection matches angular grid search") {
  Rng rng(2);
  const int angles = 10000;
  const double r = std::sqrt(0.5);
  for (int n = 0; n < 200; ++n) {
    MatrixXd X(2, 1);
    X << rng.normal(), rng.normal();
    const DecisionPoint z = project(0.0, X, 0.5);
    double best = INFINITY, best_phi = 0.0;
    for (int a = 0; a < angles; ++a) {
      const double phi = 2.0 * std::numbers::pi * a / angles;
      const double dist = std::hypot(X(0) - r * std::cos(phi), X(1) - r * std::sin(phi));
      if (dist < best) best = dist, best_phi = phi;
    }
    const double mine = std::hypot(X(0) - z.Xbar(0), X(1) - z.Xbar(1));
    CHECK(mine <= best + 1e-15);
    const double gap = std::remainder(std::atan2(z.Xbar(1), z.Xbar(0)) - best_phi, 2.0 * std::numbers::pi);
    CHECK(std::abs(gap) <= std::numbers::pi / angles + 1e-12);
  }
}

TEST_CASE("pg_step with a vanishing step returns z") {
  const Problem p = make_problem(8, 2, 3, 3);
  SmoothedObjective obj(lift(p.channel), p.symbols.Sbar, 0.05);
  Rng rng(4);
  const DecisionPoint z = random_feasible(8, 3, 1.0, rng);
  const DecisionPoint same = pg_step(z, 1e-300, obj, 1.0);
  CHECK(same.d == z.d);
  CHECK((same.Xbar - z.Xbar).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pg_step projects the gradient step") {
  const Problem p = make_problem(8, 2, 3, 5);
  SmoothedObjective obj(lift(p.channel), p.symbols.Sbar, 0.05);
  Rng rng(6);
  const DecisionPoint z = random_feasible(8, 3, 1.0, rng);
  const Gradient g = obj.gradient(z);
  const DecisionPoint expect = project(z.d - 0.01 * g.d, z.Xbar - 0.01 * g.X, 1.0);
  const DecisionPoint got = pg_step(z, 0.01, obj, 1.0);
  CHECK(got.d == expect.d);
  CHECK(got.Xbar == expect.Xbar);
}

TEST_CASE("a backtracked step strictly decreases f") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Problem p = make_problem(16, 4, 5, 10 + seed);
    SmoothedObjective obj(lift(p.channel), p.symbols.Sbar, 0.05);
    Rng rng(seed);
    const DecisionPoint z = random_feasible(16, 5, 1.0, rng);
    Gradient g;
    const double f = obj.value_and_gradient(z, g);
    BacktrackingLineSearch search({});
    const LineSearchStep step = search.descend(z, f, g, obj, 1.0);
    REQUIRE(step.accepted);
    CHECK(step.value < f);
    CHECK(step.value == obj.smooth(step.point));
    CHECK(step.value <= f - (1e-4 / step.gamma) * distance_squared(step.point, z));
    CHECK(search.next_gamma() == 2.0 * step.gamma);
  }
}

TEST_CASE("accepted step respects the Lipschitz bound") {
  const double sigma = 0.05, c = 1e-4, eta = 0.5;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Problem p = make_problem(4, 2, 2, 20 + seed);
    SmoothedObjective obj(lift(p.channel), p.symbols.Sbar, sigma);
    const MatrixXd A = exponent_map(obj);
    const double spectral = Eigen::JacobiSVD<MatrixXd>(A).singularValues()(0);
    const double lipschitz = spectral * spectral / sigma;

    Rng rng(seed);
    const DecisionPoint z = random_feasible(4, 2, 1.0, rng);
    Gradient g;
    const double f = obj.value_and_gradient(z, g);
    LineSearchConfig cfg;
    cfg.initial_step = 1e3;
    cfg.sufficient_decrease = c;
    cfg.shrink = eta;
    cfg.max_backtracks = 60;
    BacktrackingLineSearch search(cfg);
    const LineSearchStep step = search.descend(z, f, g, obj, 1.0);
    REQUIRE(step.accepted);
    CHECK(step.gamma >= eta * (1.0 - 2.0 * c) / lipschitz);
  }
}

TEST_CASE("zero decrease constant accepts the first non-increasing trial") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Problem p = make_problem(8, 2, 3, 30 + seed);
    SmoothedObjective obj(lift(p.channel), p.symbols.Sbar, 0.05);
    Rng rng(seed);
    const DecisionPoint z = random_feasible(8, 3, 1.0, rng);
    Gradient g;
    const double f = obj.value_and_gradient(z, g);
    LineSearchConfig cfg;
    cfg.sufficient_decrease = 0.0;
    cfg.initial_step = 0.05;
    BacktrackingLineSearch search(cfg);
    const LineSearchStep step = search.descend(z, f, g, obj, 1.0);
    const bool first_ok = obj.smooth(pg_step(z, 0.05, obj, 1.0)) <= f;
    CHECK((step.backtracks == 0) == first_ok);
    CHECK(step.value <= f);
  }
}

TEST_CASE("failed line search is flagged and keeps the smallest trial") {
  const Problem p = make_problem(8, 2, 3, 40);
  SmoothedObjective obj(lift(p.channel), p.symbols.Sbar, 0.05);
  Rng rng(1);
  const DecisionPoint z = random_feasible(8, 3, 1.0, rng);
  Gradient g;
  const double f = obj.value_and_gradient(z, g);
  LineSearchConfig cfg;
  cfg.initial_step = 1e6;
  cfg.max_backtracks = 0;
  BacktrackingLineSearch search(cfg);
  const LineSearchStep step = search.descend(z, f, g, obj, 1.0);
  CHECK_FALSE(step.accepted);
  CHECK(step.gamma == 1e6);
}

TEST_CASE("solver configuration validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.line_search.shrink = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.sigma = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(SolverConfig{}.sigma == 0.05);
  CHECK(SolverConfig{}.tol == 1e-4);
  CHECK(SolverConfig{}.max_iters == 5000);
}

TEST_CASE("init kind names") {
  CHECK(parse_init_kind("random-phase") == InitKind::RandomPhase);
  CHECK(parse_init_kind("ce-zf-warm-start") == InitKind::CeZfWarmStart);
  CHECK(to_string(InitKind::CeZfWarmStart) == "ce-zf-warm-start");
  CHECK_THROWS_AS(parse_init_kind("zeros"), ConfigError);
  CHECK(to_string(StopReason::Tolerance) == "tolerance");
}

TEST_CASE("random-phase start uses the least-squares gain") {
  const Problem p = make_problem(16, 4, 5, 50);
  SolverConfig cfg;
  cfg.seed = 9;
  const DecisionPoint z = initial_point(p.channel, p.symbols, 1.0, cfg);
  CHECK(ce_violation(z.Xbar, 1.0) < 1e-12);
  const MatrixXd HX = lift(p.channel).Hbar * z.Xbar;
  const double ls = std::max(0.0, (p.symbols.Sbar.cwiseProduct(HX)).sum() / p.symbols.Sbar.squaredNorm());
  CHECK(z.d == doctest::Approx(ls).epsilon(1e-13));
  CHECK(ls_gain(lift(p.channel).Hbar, p.symbols.Sbar, z.Xbar) == doctest::Approx(ls).epsilon(1e-13));

  const DecisionPoint again = initial_point(p.channel, p.symbols, 1.0, cfg);
  CHECK(again.Xbar == z.Xbar);
  cfg.init = InitKind::CeZfWarmStart;
  CHECK(ce_violation(initial_point(p.channel, p.symbols, 1.0, cfg).Xbar, 1.0) < 1e-12);
}

TEST_CASE("infinite tolerance stops after one iteration") {
  const Problem p = make_problem(8, 2, 3, 60);
  SolverConfig cfg;
  cfg.tol = std::numeric_limits<double>::infinity();
  cfg.patience = 1;
  for (bool fast : {false, true}) {
    const SolverReport rep = fast ? solve_fpg(p.channel, p.symbols, 1.0, cfg) : solve_pg(p.channel, p.symbols, 1.0, cfg);
    CHECK(rep.iterations == 1);
    CHECK(rep.stop == StopReason::Tolerance);
  }
}

TEST_CASE("iteration cap") {
  const Problem p = make_problem(16, 4, 5, 61);
  SolverConfig cfg;
  cfg.tol = 1e-300;
  cfg.max_iters = 7;
  const SolverReport rep = solve_pg(p.channel, p.symbols, 1.0, cfg);
  CHECK(rep.iterations == 7);
  CHECK(rep.stop == StopReason::MaxIters);
  CHECK(rep.trace.size() == 8);
}

TEST_CASE("single-antenna single-user problem reaches the grid optimum") {
  Channel h{Eigen::MatrixXcd::Constant(1, 1, cplx(1.0, 0.0))};
  const SymbolBlock s = SymbolBlock::from_symbols(Eigen::MatrixXcd::Constant(1, 1, cplx(1.0, 0.0)));
  const double sigma = 0.05;
  SmoothedObjective obj(lift(h), s.Sbar, sigma);

  double best = INFINITY;
  for (int a = 0; a < 2000; ++a) {
    const double phi = 2.0 * std::numbers::pi * a / 2000;
    MatrixXd X(2, 1);
    X << std::cos(phi), std::sin(phi);
    for (int k = 0; k <= 2000; ++k) best = std::min(best, obj.exact({2.0 * k / 2000, X}));
  }
  CHECK(best == doctest::Approx(-1.0).epsilon(1e-12));

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SolverConfig cfg;
    cfg.seed = seed;
    const SolverReport pg = solve_pg(h, s, 1.0, cfg);
    const SolverReport fpg = solve_fpg(h, s, 1.0, cfg);
    CHECK(pg.final_exact <= best + sigma * std::log(4.0));
    CHECK(fpg.final_exact <= best + sigma * std::log(4.0));
  }
}

TEST_CASE("PG descent and final feasibility") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Problem p = make_problem(16, 4, 5, 100 + seed);
    SolverConfig cfg;
    cfg.seed = seed;
    const SolverReport rep = solve_pg(p.channel, p.symbols, 1.0, cfg);
    for (std::size_t k = 1; k < rep.trace.size(); ++k) CHECK(rep.trace[k].f_smooth <= rep.trace[k - 1].f_smooth);
    CHECK(rep.final_exact <= rep.initial_exact + 0.05 * std::log(4.0 * 4 * 5));
    CHECK(ce_violation(rep.z.Xbar, 1.0) < 1e-12);
    CHECK(rep.z.d >= 0.0);
    CHECK(rep.final_smooth <= rep.initial_smooth);
  }
}

TEST_CASE("beta recursion") {
  const double b1 = next_beta(1.0);
  CHECK(b1 == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
  CHECK(b1 == doctest::Approx(1.6180).epsilon(1e-4));
  CHECK(next_beta(b1) == doctest::Approx((1.0 + std::sqrt(1.0 + 4.0 * b1 * b1)) / 2.0).epsilon(1e-15));
  CHECK(next_beta(b1) == doctest::Approx(2.1935).epsilon(1e-4));
}

TEST_CASE("first FPG iteration is a plain projected gradient step") {
  const Problem p = make_problem(16, 4, 5, 200);
  SolverConfig cfg;
  cfg.seed = 3;
  cfg.max_iters = 1;
  const SmoothedObjective obj(lift(p.channel), p.symbols.Sbar, cfg.sigma);
  const DecisionPoint z0 = project(initial_point(p.channel, p.symbols, 1.0, cfg), 1.0);
  const SolverReport rep = solve_fpg(p.channel, p.symbols, 1.0, cfg);
  REQUIRE(rep.trace.size() == 2);
  const DecisionPoint expect = pg_step(z0, rep.trace[1].gamma, obj, 1.0);
  CHECK(rep.z.d == expect.d);
  CHECK(rep.z.Xbar == expect.Xbar);
}

TEST_CASE("FPG with restart is monotone") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Problem p = make_problem(16, 4, 5, 300 + seed);
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.restart_on_increase = true;
    const SolverReport rep = solve_fpg(p.channel, p.symbols, 1.0, cfg);
    for (std::size_t k = 1; k < rep.trace.size(); ++k) CHECK(rep.trace[k].f_smooth <= rep.trace[k - 1].f_smooth);
    CHECK(ce_violation(rep.z.Xbar, 1.0) < 1e-12);
  }
}

TEST_CASE("FPG needs fewer iterations than PG") {
  std::vector<int> pg, fpg;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Problem p = make_problem(64, 8, 10, 400 + seed);
    SolverConfig cfg;
    cfg.seed = seed;
    cfg.trace_stride = 0;
    pg.push_back(solve_pg(p.channel, p.symbols, 1.0, cfg).iterations);
    fpg.push_back(solve_fpg(p.channel, p.symbols, 1.0, cfg).iterations);
  }
  std::ranges::sort(pg);
  std::ranges::sort(fpg);
  CHECK((fpg[9] + fpg[10]) < (pg[9] + pg[10]));
}

TEST_CASE("solver is deterministic") {
  const Problem p = make_problem(16, 4, 5, 500);
  SolverConfig cfg;
  cfg.seed = 77;
  const SolverReport a = solve_fpg(p.channel, p.symbols, 1.0, cfg);
  const SolverReport b = solve_fpg(p.channel, p.symbols, 1.0, cfg);
  CHECK(a.iterations == b.iterations);
  CHECK(a.z.Xbar == b.z.Xbar);
  CHECK(a.z.d == b.z.d);
}

TEST_CASE("trace CSV") {
  std::ostringstream out;
  write_trace_csv(out, {{0, 1.5, 1.0, 0.0, 0}, {1, 1.25, 0.9, 0.5, 2}});
  CHECK(out.str() == "iter,f_smooth,f_exact,gamma,backtracks\n0,1.5,1,0,0\n1,1.25,0.9,0.5,2\n");
}
