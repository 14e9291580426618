// SPDX-License-Identifier: Apache-2.0
#include "cepre/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "cepre/errors.hpp"

namespace cepre {

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

SerBound ser_upper_bound(const Channel& channel, const Eigen::MatrixXcd& X, double d,
                         const SymbolBlock& symbols, double sigma_n) {
  if (d < 0.0) throw DomainError("ser_upper_bound: gain d must be non-negative");
  if (!(sigma_n > 0.0)) throw DomainError("ser_upper_bound: sigma_n must be positive");
  if (X.rows() != channel.antennas() || X.cols() != symbols.slots() || symbols.users() != channel.users())
    throw DomainError("ser_upper_bound: shape mismatch");

  const Eigen::MatrixXcd distortion = channel.H * X - d * symbols.S;
  const double scale = sigma_n / std::numbers::sqrt2;
  const auto K = channel.users();
  const auto T = symbols.slots();
  SerBound out;
  out.real_part.resize(K, T);
  out.imag_part.resize(K, T);
  out.combined.resize(K, T);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index i = 0; i < K; ++i) {
      out.real_part(i, t) = 2.0 * q_function((d - std::abs(distortion(i, t).real())) / scale);
      out.imag_part(i, t) = 2.0 * q_function((d - std::abs(distortion(i, t).imag())) / scale);
      out.combined(i, t) = std::min(2.0, 2.0 * std::max(out.real_part(i, t), out.imag_part(i, t)));
    }
  out.per_user = out.combined.rowwise().maxCoeff();
  return out;
}

double BerEstimate::ber() const {
  return total_bits ? static_cast<double>(bit_errors) / static_cast<double>(total_bits) : 0.0;
}

double BerEstimate::ser() const {
  return total_symbols ? static_cast<double>(symbol_errors) / static_cast<double>(total_symbols) : 0.0;
}

double BerEstimate::user_ser(std::size_t user) const {
  if (user >= user_symbols.size() || user_symbols[user] == 0) return 0.0;
  return static_cast<double>(user_symbol_errors[user]) / static_cast<double>(user_symbols[user]);
}

double BerEstimate::worst_user_ser() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < user_symbols.size(); ++i) worst = std::max(worst, user_ser(i));
  return worst;
}

double BerEstimate::ci_halfwidth() const {
  if (total_bits == 0) return 0.0;
  const double p = ber();
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(total_bits));
}

void BerEstimate::merge(const BerEstimate& other) {
  bit_errors += other.bit_errors;
  total_bits += other.total_bits;
  symbol_errors += other.symbol_errors;
  total_symbols += other.total_symbols;
  if (user_symbols.size() < other.user_symbols.size()) {
    user_symbols.resize(other.user_symbols.size(), 0);
    user_symbol_errors.resize(other.user_symbols.size(), 0);
  }
  for (std::size_t i = 0; i < other.user_symbols.size(); ++i) {
    user_symbols[i] += other.user_symbols[i];
    user_symbol_errors[i] += other.user_symbol_errors[i];
  }
}

namespace {

double usable_gain(double g) { return g > 0.0 ? g : std::numeric_limits<double>::min(); }

}  // namespace

BerEstimate estimate_ber(const Channel& channel, const PrecodeResult& result, const SymbolBlock& symbols,
                         const QamConstellation& c, double sigma_n, Rng& rng, int trials) {
  if (trials < 1) throw DomainError("estimate_ber: trials must be at least 1");
  if (result.gains.size() != symbols.slots()) throw DomainError("estimate_ber: gain count != slots");
  const auto K = static_cast<std::size_t>(channel.users());
  const Eigen::Index T = symbols.slots();

  Eigen::MatrixX<std::uint32_t> labels(K, T);
  for (Eigen::Index t = 0; t < T; ++t)
    for (std::size_t i = 0; i < K; ++i) labels(i, t) = c.label(symbols.S(i, t));

  BerEstimate est;
  est.user_symbols.assign(K, 0);
  est.user_symbol_errors.assign(K, 0);
  for (int trial = 0; trial < trials; ++trial) {
    const Eigen::MatrixXcd Y = receive(channel, result.X, sigma_n, rng);
    for (Eigen::Index t = 0; t < T; ++t) {
      const double gain = usable_gain(result.gains(t));
      for (std::size_t i = 0; i < K; ++i) {
        const cplx decided = c.decide(Y(i, t), gain);
        const std::uint32_t wrong = c.label(decided) ^ labels(i, t);
        est.bit_errors += static_cast<std::uint64_t>(std::popcount(wrong));
        if (wrong != 0) {
          ++est.symbol_errors;
          ++est.user_symbol_errors[i];
        }
        ++est.user_symbols[i];
      }
    }
    est.total_symbols += K * static_cast<std::uint64_t>(T);
  }
  est.total_bits = est.total_symbols * static_cast<std::uint64_t>(c.bits_per_symbol());
  return est;
}

SlotErrorRates slot_error_rates(const Channel& channel, const Eigen::MatrixXcd& X, double d,
                                const SymbolBlock& symbols, const QamConstellation& c, double sigma_n,
                                Rng& rng, std::int64_t draws) {
  if (draws < 1) throw DomainError("slot_error_rates: draws must be positive");
  const Eigen::MatrixXcd clean = channel.H * X;
  const auto K = clean.rows();
  const auto T = clean.cols();
  const double gain = usable_gain(d);
  const double scale = sigma_n / std::numbers::sqrt2;
  Eigen::MatrixX<std::int64_t> err = Eigen::MatrixX<std::int64_t>::Zero(K, T);
  Eigen::MatrixX<std::int64_t> err_re = err;
  Eigen::MatrixX<std::int64_t> err_im = err;
  for (std::int64_t n = 0; n < draws; ++n) {
    for (Eigen::Index t = 0; t < T; ++t)
      for (Eigen::Index i = 0; i < K; ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        const cplx y = clean(i, t) + cplx(scale * re, scale * im);
        const cplx s = symbols.S(i, t);
        const cplx decided = c.decide(y, gain);
        const bool bad_re = decided.real() != s.real();
        const bool bad_im = decided.imag() != s.imag();
        err_re(i, t) += bad_re;
        err_im(i, t) += bad_im;
        err(i, t) += bad_re || bad_im;
      }
  }
  const double n = static_cast<double>(draws);
  return {err.cast<double>() / n, err_re.cast<double>() / n, err_im.cast<double>() / n, draws};
}

double papr(const Eigen::MatrixXcd& X) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < X.rows(); ++j) {
    const Eigen::ArrayXd power = X.row(j).cwiseAbs2().transpose().array();
    const double mean = power.mean();
    worst = std::max(worst, mean > 0.0 ? power.maxCoeff() / mean : 1.0);
  }
  return worst;
}

double papr_real(const Eigen::MatrixXd& Xbar) { return papr(unstack_real(Xbar)); }

}  // namespace cepre
