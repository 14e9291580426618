// SPDX-License-Identifier: Apache-2.0
#include "cepre/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "cepre/errors.hpp"
#include "cepre/metrics.hpp"

namespace cepre {

namespace {

// Stream tags for derive_seed(master, trial, tag).
constexpr std::uint64_t kBlockStream = 0;
constexpr std::uint64_t kSolverStream = 1;
constexpr std::uint64_t kNoiseStreamBase = 1000;

bool needs_zf(Method m) { return m == Method::Zf || m == Method::CeZf; }

struct MethodOutcome {
  int iterations = 0;
  double seconds = 0.0;
  double exact_objective = 0.0;
  std::vector<BerEstimate> per_snr;
};

struct TrialOutcome {
  std::vector<MethodOutcome> methods;
};

template <class Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  workers = std::max(1, std::min(workers, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

TrialOutcome run_trial(const ExperimentConfig& cfg, const QamConstellation& c, int trial) {
  Rng block_rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(trial), kBlockStream));
  const Channel channel = rayleigh_channel(cfg.K, cfg.N, block_rng);
  const SymbolBlock symbols = random_symbols(c, cfg.K, cfg.T, block_rng);
  const std::uint64_t solver_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(trial), kSolverStream);
  const Eigen::MatrixXd Hbar = lift(channel).Hbar;

  TrialOutcome out;
  out.methods.reserve(cfg.methods.size());
  for (Method m : cfg.methods) {
    const PrecodeResult res = precode(m, channel, symbols, cfg, solver_seed);
    MethodOutcome mo;
    mo.iterations = res.iterations;
    mo.seconds = res.seconds;
    mo.exact_objective = exact_objective_per_slot(Hbar, symbols.Sbar, res.Xbar(), res.gains);
    for (std::size_t k = 0; k < cfg.snr_db.size(); ++k) {
      Rng noise(derive_seed(cfg.seed, static_cast<std::uint64_t>(trial), kNoiseStreamBase + k));
      mo.per_snr.push_back(estimate_ber(channel, res, symbols, c, noise_sigma(cfg.P, cfg.snr_db[k]), noise,
                                        cfg.noise_draws));
    }
    out.methods.push_back(std::move(mo));
  }
  return out;
}

std::string fmt8(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (N < 1 || K < 1 || T < 1) throw ConfigError("N, K and T must be positive");
  if (!(P > 0.0)) throw ConfigError("transmit power P must be positive");
  (void)QamConstellation(L);
  if (snr_db.empty()) throw ConfigError("SNR list is empty");
  for (double s : snr_db)
    if (!std::isfinite(s)) throw ConfigError("SNR values must be finite");
  if (methods.empty()) throw ConfigError("method list is empty");
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (noise_draws < 1) throw ConfigError("noise draws must be at least 1");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  for (Method m : methods)
    if (needs_zf(m) && N < K)
      throw ConfigError("method " + to_string(m) + " needs N >= K (N=" + std::to_string(N) +
                        ", K=" + std::to_string(K) + ")");
  solver.validate();
  if (!(mui.tol > 0.0) || mui.max_iters < 1) throw ConfigError("invalid mui-min stopping rule");
}

double noise_sigma(double power, double snr_db) {
  return std::sqrt(power / std::pow(10.0, snr_db / 10.0));
}

PrecodeResult precode(Method method, const Channel& channel, const SymbolBlock& symbols,
                      const ExperimentConfig& cfg, std::uint64_t solver_seed) {
  switch (method) {
    case Method::Zf: return zf_precode(channel, symbols, cfg.P);
    case Method::CeZf: return ce_zf_precode(channel, symbols, cfg.P);
    case Method::MuiMin: {
      MuiMinConfig mui = cfg.mui;
      mui.seed = solver_seed;
      return mui_min_precode(channel, symbols, cfg.P, mui);
    }
    case Method::Pg:
    case Method::Fpg: {
      SolverConfig sc = cfg.solver;
      sc.seed = solver_seed;
      sc.trace_stride = 0;
      const SolverReport rep = method == Method::Pg ? solve_pg(channel, symbols, cfg.P, sc)
                                                    : solve_fpg(channel, symbols, cfg.P, sc);
      return from_solver(rep, method);
    }
  }
  throw ConfigError("unhandled method");
}

std::vector<BerRecord> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const QamConstellation c(cfg.L);
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(cfg.trials));
  parallel_for(cfg.trials, cfg.workers,
               [&](int trial) { outcomes[static_cast<std::size_t>(trial)] = run_trial(cfg, c, trial); });

  std::vector<BerRecord> records;
  const double n = static_cast<double>(cfg.trials);
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    double iters = 0.0, seconds = 0.0, objective = 0.0;
    for (const TrialOutcome& t : outcomes) {
      iters += t.methods[m].iterations;
      seconds += t.methods[m].seconds;
      objective += t.methods[m].exact_objective;
    }
    for (std::size_t k = 0; k < cfg.snr_db.size(); ++k) {
      BerEstimate pooled;
      double worst = 0.0;
      for (const TrialOutcome& t : outcomes) {
        pooled.merge(t.methods[m].per_snr[k]);
        worst += t.methods[m].per_snr[k].worst_user_ser();
      }
      BerRecord r;
      r.method = cfg.methods[m];
      r.N = cfg.N;
      r.K = cfg.K;
      r.L = cfg.L;
      r.snr_db = cfg.snr_db[k];
      r.trials = cfg.trials;
      r.avg_ber = pooled.ber();
      r.worst_user_ser = worst / n;
      r.ci_halfwidth = pooled.ci_halfwidth();
      r.mean_iters = iters / n;
      r.mean_runtime_s = cfg.timing ? seconds / n : 0.0;
      r.mean_final_exact_obj = objective / n;
      records.push_back(r);
    }
  }
  return records;
}

void write_records_csv(std::ostream& out, const std::vector<BerRecord>& records) {
  out << kBerCsvHeader << '\n';
  for (const BerRecord& r : records) {
    out << to_string(r.method) << ',' << r.N << ',' << r.K << ',' << r.L << ',' << fmt8(r.snr_db) << ','
        << r.trials << ',' << fmt8(r.avg_ber) << ',' << fmt8(r.worst_user_ser) << ','
        << fmt8(r.ci_halfwidth) << ',' << fmt8(r.mean_iters) << ',' << fmt8(r.mean_runtime_s) << ','
        << fmt8(r.mean_final_exact_obj) << '\n';
  }
}

std::string records_to_csv(const std::vector<BerRecord>& records) {
  std::ostringstream ss;
  write_records_csv(ss, records);
  return ss.str();
}

std::vector<RuntimeCell> run_runtime_bench(const ExperimentConfig& base, const std::vector<int>& sizes) {
  if (sizes.empty()) throw ConfigError("runtime bench needs at least one antenna count");
  for (int N : sizes) {
    ExperimentConfig probe = base;
    probe.N = N;
    probe.validate();
  }
  const QamConstellation c(base.L);
  std::vector<RuntimeCell> cells;
  for (int N : sizes) {
    ExperimentConfig cfg = base;
    cfg.N = N;
    std::vector<std::vector<double>> seconds(cfg.methods.size());
    std::vector<std::vector<double>> iters(cfg.methods.size());
    // Trial index -1 is the warm-up block.
    for (int trial = -1; trial < cfg.trials; ++trial) {
      const auto tag = static_cast<std::uint64_t>(static_cast<std::int64_t>(trial));
      Rng block_rng(derive_seed(cfg.seed ^ static_cast<std::uint64_t>(N), tag, kBlockStream));
      const Channel channel = rayleigh_channel(cfg.K, N, block_rng);
      const SymbolBlock symbols = random_symbols(c, cfg.K, cfg.T, block_rng);
      const std::uint64_t solver_seed = derive_seed(cfg.seed ^ static_cast<std::uint64_t>(N), tag, kSolverStream);
      for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        const PrecodeResult res = precode(cfg.methods[m], channel, symbols, cfg, solver_seed);
        if (trial < 0) continue;
        seconds[m].push_back(res.seconds);
        iters[m].push_back(res.iterations);
      }
    }
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      RuntimeCell cell;
      cell.method = cfg.methods[m];
      cell.N = N;
      cell.blocks = cfg.trials;
      const double n = static_cast<double>(cfg.trials);
      for (double s : seconds[m]) cell.mean_seconds += s / n;
      for (double it : iters[m]) cell.mean_iterations += it / n;
      std::vector<double> sorted = iters[m];
      std::sort(sorted.begin(), sorted.end());
      const std::size_t mid = sorted.size() / 2;
      cell.median_iterations = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_runtime_csv(std::ostream& out, const std::vector<RuntimeCell>& cells) {
  out << "method,N,blocks,mean_runtime_s,mean_iters,median_iters\n";
  for (const RuntimeCell& c : cells)
    out << to_string(c.method) << ',' << c.N << ',' << c.blocks << ',' << fmt8(c.mean_seconds) << ','
        << fmt8(c.mean_iterations) << ',' << fmt8(c.median_iterations) << '\n';
}

}  // namespace cepre
