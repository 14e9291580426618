// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "cepre/baselines.hpp"
#include "cepre/channel.hpp"
#include "cepre/constellation.hpp"

namespace cepre {

// Gaussian tail probability Q(x) = P(Z > x), Z ~ N(0, 1).
double q_function(double x);

// Per-user, per-slot SER bound pieces. M^R and M^I lie in [0, 2]; combined
// is 2 max{M^R, M^I} clipped to 2. per_user(i) is the worst slot for user i.
struct SerBound {
  Eigen::MatrixXd real_part;
  Eigen::MatrixXd imag_part;
  Eigen::MatrixXd combined;
  Eigen::VectorXd per_user;
};

// Bound for transmit block X (N x T complex) with shared gain d >= 0 and
// noise level sigma_n > 0. Throws DomainError otherwise.
SerBound ser_upper_bound(const Channel& channel, const Eigen::MatrixXcd& X, double d,
                         const SymbolBlock& symbols, double sigma_n);

// Error counters; merge() is associative, so per-trial estimates can be
// combined in any grouping.
struct BerEstimate {
  std::uint64_t bit_errors = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t symbol_errors = 0;
  std::uint64_t total_symbols = 0;
  std::vector<std::uint64_t> user_symbol_errors;
  std::vector<std::uint64_t> user_symbols;

  double ber() const;
  double ser() const;
  double user_ser(std::size_t user) const;
  double worst_user_ser() const;
  // 95% normal-approximation half-width on the BER.
  double ci_halfwidth() const;

  void merge(const BerEstimate& other);
};

// Sends the precoded block `trials` times through receive() with fresh noise,
// decides every sample with the method's gain for that slot and counts Gray
// bit and symbol errors. A non-positive gain is treated as the smallest
// positive double (the decision saturates at the outer levels).
BerEstimate estimate_ber(const Channel& channel, const PrecodeResult& result, const SymbolBlock& symbols,
                         const QamConstellation& c, double sigma_n, Rng& rng, int trials = 1);

// Empirical per-(user, slot) error rates over `draws` noise realizations.
struct SlotErrorRates {
  Eigen::MatrixXd ser;       // symbol error
  Eigen::MatrixXd ser_real;  // in-phase component wrong
  Eigen::MatrixXd ser_imag;  // quadrature component wrong
  std::int64_t draws = 0;
};

SlotErrorRates slot_error_rates(const Channel& channel, const Eigen::MatrixXcd& X, double d,
                                const SymbolBlock& symbols, const QamConstellation& c, double sigma_n,
                                Rng& rng, std::int64_t draws);

// Largest per-antenna ratio of peak to mean instantaneous power over the
// block. Exactly 1 for constant-envelope signals.
double papr(const Eigen::MatrixXcd& X);
double papr_real(const Eigen::MatrixXd& Xbar);

}  // namespace cepre
