// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

#include "cepre/constellation.hpp"
#include "cepre/random.hpp"

namespace cepre {

// Downlink channel for one fading block. Row i is h_i^T (user i), so
// H is K x N.
struct Channel {
  Eigen::MatrixXcd H;

  Eigen::Index users() const { return H.rows(); }
  Eigen::Index antennas() const { return H.cols(); }
};

// Real-equivalent channel [[Re H, -Im H], [Im H, Re H]], 2K x 2N.
struct RealChannel {
  Eigen::MatrixXd Hbar;
};

// Per-user symbols for a block of T slots. S is K x T; Sbar stacks
// [Re S; Im S] (2K x T).
struct SymbolBlock {
  Eigen::MatrixXcd S;
  Eigen::MatrixXd Sbar;

  static SymbolBlock from_symbols(const Eigen::MatrixXcd& S);
  Eigen::Index users() const { return S.rows(); }
  Eigen::Index slots() const { return S.cols(); }
};

// Real transmit block on the constant-envelope set: column t is
// [Re x_t; Im x_t] with x_{j,t}^2 + x_{j+N,t}^2 = P/N for every antenna j.
struct CEPoint {
  Eigen::MatrixXd Xbar;
  double power = 1.0;
};

RealChannel lift(const Channel& channel);

// [Re Z; Im Z] and its inverse.
Eigen::MatrixXd stack_real(const Eigen::MatrixXcd& Z);
Eigen::MatrixXcd unstack_real(const Eigen::MatrixXd& Zbar);

// Largest relative deviation of any antenna pair power from P/N.
double ce_violation(const Eigen::MatrixXd& Xbar, double power);

// i.i.d. CN(0, 1) entries.
Channel rayleigh_channel(Eigen::Index K, Eigen::Index N, Rng& rng);

// Symbols drawn uniformly from the alphabet, independently per user and slot.
SymbolBlock random_symbols(const QamConstellation& c, Eigen::Index K, Eigen::Index T, Rng& rng);

// CN(0, sigma^2) matrix: real and imaginary parts each have variance sigma^2 / 2.
Eigen::MatrixXcd complex_noise(Eigen::Index rows, Eigen::Index cols, double sigma, Rng& rng);

// y_t = H x_t + n_t for every slot. X is N x T complex. sigma_n = 0 draws no
// noise and leaves rng untouched. Throws DomainError on a dimension mismatch.
Eigen::MatrixXcd receive(const Channel& channel, const Eigen::MatrixXcd& X, double sigma_n, Rng& rng);
Eigen::MatrixXcd receive(const Channel& channel, const CEPoint& x, double sigma_n, Rng& rng);

// CSV fixture format: K lines, each holding N "re,im" pairs, row-major.
void write_channel_csv(std::ostream& out, const Channel& channel);
Channel read_channel_csv(std::istream& in);
Channel load_channel_csv(const std::string& path);

}  // namespace cepre
