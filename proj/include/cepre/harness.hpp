// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cepre/baselines.hpp"
#include "cepre/solver.hpp"

namespace cepre {

struct ExperimentConfig {
  int N = 64;
  int K = 8;
  int T = 10;
  double P = 1.0;
  int L = 2;
  std::vector<double> snr_db{20.0, 25.0, 30.0};  // P / sigma_n^2
  std::vector<Method> methods{Method::Zf, Method::CeZf, Method::MuiMin, Method::Pg, Method::Fpg};
  int trials = 100;
  // Noise realizations per block and SNR point.
  int noise_draws = 1;
  SolverConfig solver;
  MuiMinConfig mui;
  std::uint64_t seed = 1;
  int workers = 1;
  // Record wall-clock runtimes. Off by default so sweep output is reproducible byte for byte.
  bool timing = false;
  std::string out;

  // Throws ConfigError before any work is done.
  void validate() const;
};

// sigma_n with sigma_n^2 = P / 10^(snr_db / 10).
double noise_sigma(double power, double snr_db);

struct BerRecord {
  Method method = Method::Zf;
  int N = 0;
  int K = 0;
  int L = 0;
  double snr_db = 0.0;
  int trials = 0;
  double avg_ber = 0.0;
  // Mean over blocks of the worst user's SER within the block.
  double worst_user_ser = 0.0;
  double ci_halfwidth = 0.0;
  double mean_iters = 0.0;
  double mean_runtime_s = 0.0;
  double mean_final_exact_obj = 0.0;
};

// One record per (method, SNR), methods in configured order, SNR ascending
// as configured. Each trial draws one channel and one symbol block, precodes
// once per method and reuses that block at every SNR point; noise at a given
// (trial, SNR) is identical across methods. Output depends only on the config,
// not on the worker count.
std::vector<BerRecord> run_sweep(const ExperimentConfig& cfg);

inline constexpr const char* kBerCsvHeader =
    "method,N,K,L,snr_db,trials,avg_ber,worst_user_ser,ci_halfwidth,mean_iters,mean_runtime_s,"
    "mean_final_exact_obj";

void write_records_csv(std::ostream& out, const std::vector<BerRecord>& records);
std::string records_to_csv(const std::vector<BerRecord>& records);

struct RuntimeCell {
  Method method = Method::Pg;
  int N = 0;
  int blocks = 0;
  double mean_seconds = 0.0;
  double mean_iterations = 0.0;
  double median_iterations = 0.0;
};

// Wall-clock per transmission block, single-threaded, for every method in
// cfg.methods and every antenna count in sizes. cfg.trials blocks per cell
// after one untimed warm-up block. Rows ordered by N, then method.
std::vector<RuntimeCell> run_runtime_bench(const ExperimentConfig& cfg, const std::vector<int>& sizes);

void write_runtime_csv(std::ostream& out, const std::vector<RuntimeCell>& cells);

// The precoder for one method on one block.
PrecodeResult precode(Method method, const Channel& channel, const SymbolBlock& symbols,
                      const ExperimentConfig& cfg, std::uint64_t solver_seed);

}  // namespace cepre
