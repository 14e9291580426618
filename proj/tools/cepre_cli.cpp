// SPDX-License-Identifier: Apache-2.0
//
// cepre: constant-envelope precoding experiments.
//
//   cepre sweep     --config fig1.cfg --out ber.csv
//   cepre bench     --sizes 50,100 --methods pg,fpg
//   cepre solve-one --seed 3 --method fpg --trace trace.csv
//   cepre check     [--quick]

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cepre/config.hpp"
#include "cepre/errors.hpp"
#include "cepre/harness.hpp"
#include "cepre/metrics.hpp"
#include "cepre/selfcheck.hpp"

namespace {

using namespace cepre;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct FlagSet {
  std::string config;
  std::map<std::string, std::string> values;
  std::map<std::string, bool> switches;
  int verbosity = 0;
};

void add_override(CLI::App* app, FlagSet& flags, const std::string& key, const std::string& help) {
  app->add_option("--" + key, flags.values[key], help);
}

void add_switch(CLI::App* app, FlagSet& flags, const std::string& key, const std::string& help) {
  app->add_flag("--" + key, flags.switches[key], help);
}

void add_experiment_flags(CLI::App* app, FlagSet& flags) {
  app->add_option("--config", flags.config, "key = value experiment manifest");
  add_override(app, flags, "out", "output CSV path (stdout when omitted)");
  add_override(app, flags, "seed", "master seed");
  add_override(app, flags, "trials", "channel realizations (blocks)");
  add_override(app, flags, "snr", "comma list of P/sigma_n^2 in dB");
  add_override(app, flags, "methods", "comma list from zf,ce-zf,mui-min,pg,fpg");
  add_override(app, flags, "N", "transmit antennas");
  add_override(app, flags, "K", "users");
  add_override(app, flags, "T", "block length");
  add_override(app, flags, "L", "QAM order (2 -> 16-QAM, 4 -> 64-QAM)");
  add_override(app, flags, "qam", "alphabet size, alternative to --L");
  add_override(app, flags, "P", "total transmit power");
  add_override(app, flags, "sigma", "smoothing parameter");
  add_override(app, flags, "tol", "objective improvement tolerance");
  add_override(app, flags, "max-iters", "iteration cap");
  add_override(app, flags, "patience", "consecutive small improvements before stopping");
  add_override(app, flags, "init", "random-phase or ce-zf-warm-start");
  add_override(app, flags, "workers", "worker threads");
  add_override(app, flags, "noise-draws", "noise realizations per block and SNR");
  add_switch(app, flags, "accelerate", "use the accelerated solver");
  add_switch(app, flags, "restart", "restart momentum when the objective increases");
  add_switch(app, flags, "timing", "record wall-clock runtimes");
  add_switch(app, flags, "mui-refit", "refit the mui-min gain after every step");
  app->add_flag("-v,--verbose", flags.verbosity, "more output");
}

RunSettings resolve(const FlagSet& flags) {
  RunSettings run;
  if (!flags.config.empty()) apply_settings(run, load_settings(flags.config));
  Settings overrides;
  for (const auto& [key, value] : flags.values)
    if (!value.empty()) overrides[key] = value;
  for (const auto& [key, on] : flags.switches)
    if (on) overrides[key] = "true";
  apply_settings(run, overrides);
  return run;
}

// Writes through a temporary file so a failed run never leaves a partial file.
void write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot write output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void print_sweep_summary(std::ostream& os, const std::vector<BerRecord>& records) {
  char line[200];
  std::snprintf(line, sizeof line, "%-8s %8s %12s %14s %10s %12s\n", "method", "snr_db", "avg_ber",
                "worst_usr_ser", "iters", "exact_obj");
  os << line;
  for (const BerRecord& r : records) {
    std::snprintf(line, sizeof line, "%-8s %8.2f %12.4e %14.4e %10.1f %12.5f\n", to_string(r.method).c_str(),
                  r.snr_db, r.avg_ber, r.worst_user_ser, r.mean_iters, r.mean_final_exact_obj);
    os << line;
  }
}

int cmd_sweep(const FlagSet& flags) {
  RunSettings run = resolve(flags);
  run.experiment.validate();
  const auto records = run_sweep(run.experiment);
  const std::string csv = records_to_csv(records);
  if (run.experiment.out.empty()) {
    std::cout << csv;
    print_sweep_summary(std::cerr, records);
  } else {
    write_file(run.experiment.out, csv);
    print_sweep_summary(std::cout, records);
  }
  return kExitOk;
}

int cmd_bench(const FlagSet& flags) {
  RunSettings run = resolve(flags);
  if (flags.values.at("methods").empty() && flags.config.empty())
    run.experiment.methods = {Method::Pg, Method::Fpg};
  const auto cells = run_runtime_bench(run.experiment, run.sizes);
  std::ostringstream csv;
  write_runtime_csv(csv, cells);
  if (run.experiment.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(run.experiment.out, csv.str());
    std::cout << csv.str();
  }
  return kExitOk;
}

int cmd_solve_one(const FlagSet& flags) {
  RunSettings run = resolve(flags);
  ExperimentConfig& e = run.experiment;
  Channel channel;
  if (!run.channel_path.empty()) {
    channel = load_channel_csv(run.channel_path);
    e.K = static_cast<int>(channel.users());
    e.N = static_cast<int>(channel.antennas());
  }
  e.methods = {run.method};
  e.validate();
  const QamConstellation c(e.L);
  Rng block_rng(derive_seed(e.seed, 0, 0));
  if (run.channel_path.empty()) channel = rayleigh_channel(e.K, e.N, block_rng);
  const SymbolBlock symbols = random_symbols(c, e.K, e.T, block_rng);

  const Eigen::MatrixXd Hbar = lift(channel).Hbar;
  std::printf("method          %s\n", to_string(run.method).c_str());
  std::printf("N K T L         %d %d %d %d\n", e.N, e.K, e.T, e.L);
  if (run.method == Method::Pg || run.method == Method::Fpg) {
    SolverConfig sc = e.solver;
    sc.seed = derive_seed(e.seed, 0, 1);
    const SolverReport rep =
        run.method == Method::Pg ? solve_pg(channel, symbols, e.P, sc) : solve_fpg(channel, symbols, e.P, sc);
    if (!run.trace_path.empty()) {
      std::ostringstream trace;
      write_trace_csv(trace, rep.trace);
      write_file(run.trace_path, trace.str());
    }
    std::printf("iterations      %d\n", rep.iterations);
    std::printf("stop            %s\n", to_string(rep.stop).c_str());
    std::printf("backtracks      %d\n", rep.backtracks);
    std::printf("initial exact   %.10f\n", rep.initial_exact);
    std::printf("final exact     %.10f\n", rep.final_exact);
    std::printf("final smoothed  %.10f\n", rep.final_smooth);
    std::printf("d               %.10f\n", rep.z.d);
    std::printf("ce violation    %.3g\n", ce_violation(rep.z.Xbar, e.P));
    if (e.timing) std::printf("seconds         %.6f\n", rep.seconds);
  } else {
    const PrecodeResult res = precode(run.method, channel, symbols, e, 0);
    std::printf("iterations      %d\n", res.iterations);
    std::printf("final exact     %.10f\n", exact_objective_per_slot(Hbar, symbols.Sbar, res.Xbar(), res.gains));
    std::printf("d               %.10f\n", res.shared_gain());
    std::printf("papr            %.6f\n", papr(res.X));
    if (e.timing) std::printf("seconds         %.6f\n", res.seconds);
  }
  return kExitOk;
}

int cmd_check(bool quick, bool inject_gradient_bug) {
  SelfCheckOptions opts;
  opts.quick = quick;
  if (inject_gradient_bug) {
    opts.gradient = [](const SmoothedObjective& obj, const DecisionPoint& z) {
      Gradient g = obj.gradient(z);
      g.d *= 1.01;
      return g;
    };
  }
  bool all = true;
  for (const CheckResult& r : run_self_checks(opts)) {
    std::printf("[%s] %-28s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    all = all && r.passed;
  }
  return all ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constant-envelope precoding: solvers, baselines and BER experiments"};
  app.require_subcommand(1);

  FlagSet sweep_flags, bench_flags, solve_flags;
  auto* sweep = app.add_subcommand("sweep", "BER versus SNR sweep, one CSV row per (method, snr)");
  add_experiment_flags(sweep, sweep_flags);

  auto* bench = app.add_subcommand("bench", "runtime per block for each method and antenna count");
  add_experiment_flags(bench, bench_flags);
  add_override(bench, bench_flags, "sizes", "comma list of antenna counts");

  auto* solve = app.add_subcommand("solve-one", "run one precoder on one block and report the objective");
  add_experiment_flags(solve, solve_flags);
  add_override(solve, solve_flags, "method", "pg, fpg, zf, ce-zf or mui-min");
  add_override(solve, solve_flags, "trace", "per-iteration trace CSV path");
  add_override(solve, solve_flags, "channel", "channel CSV (K rows of N re,im pairs)");

  bool quick = false;
  bool inject = false;
  auto* check = app.add_subcommand("check", "run the fast invariant self-checks");
  check->add_flag("--quick", quick, "smaller instances");
  check->add_flag("--inject-gradient-bug", inject, "perturb the analytic gradient (tests the checker)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*sweep) return cmd_sweep(sweep_flags);
    if (*bench) return cmd_bench(bench_flags);
    if (*solve) return cmd_solve_one(solve_flags);
    if (*check) return cmd_check(quick, inject);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
