// SPDX-License-Identifier: Apache-2.0
#include "cepre/channel.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cepre/errors.hpp"

namespace cepre {

SymbolBlock SymbolBlock::from_symbols(const Eigen::MatrixXcd& S) {
  return SymbolBlock{S, stack_real(S)};
}

RealChannel lift(const Channel& channel) {
  const Eigen::Index K = channel.users();
  const Eigen::Index N = channel.antennas();
  RealChannel out;
  out.Hbar.resize(2 * K, 2 * N);
  out.Hbar.topLeftCorner(K, N) = channel.H.real();
  out.Hbar.topRightCorner(K, N) = -channel.H.imag();
  out.Hbar.bottomLeftCorner(K, N) = channel.H.imag();
  out.Hbar.bottomRightCorner(K, N) = channel.H.real();
  return out;
}

Eigen::MatrixXd stack_real(const Eigen::MatrixXcd& Z) {
  Eigen::MatrixXd out(2 * Z.rows(), Z.cols());
  out.topRows(Z.rows()) = Z.real();
  out.bottomRows(Z.rows()) = Z.imag();
  return out;
}

Eigen::MatrixXcd unstack_real(const Eigen::MatrixXd& Zbar) {
  if (Zbar.rows() % 2 != 0) throw DomainError("stacked real matrix needs an even row count");
  const Eigen::Index n = Zbar.rows() / 2;
  Eigen::MatrixXcd out(n, Zbar.cols());
  out.real() = Zbar.topRows(n);
  out.imag() = Zbar.bottomRows(n);
  return out;
}

double ce_violation(const Eigen::MatrixXd& Xbar, double power) {
  const Eigen::Index N = Xbar.rows() / 2;
  const double target = power / static_cast<double>(N);
  const Eigen::ArrayXXd pair_power =
      Xbar.topRows(N).array().square() + Xbar.bottomRows(N).array().square();
  return ((pair_power - target).abs() / target).maxCoeff();
}

Channel rayleigh_channel(Eigen::Index K, Eigen::Index N, Rng& rng) {
  return Channel{complex_noise(K, N, 1.0, rng)};
}

SymbolBlock random_symbols(const QamConstellation& c, Eigen::Index K, Eigen::Index T, Rng& rng) {
  Eigen::MatrixXcd S(K, T);
  for (Eigen::Index t = 0; t < T; ++t)
    for (Eigen::Index i = 0; i < K; ++i) S(i, t) = c.points()[rng.uniform_int(c.size())];
  return SymbolBlock::from_symbols(S);
}

Eigen::MatrixXcd complex_noise(Eigen::Index rows, Eigen::Index cols, double sigma, Rng& rng) {
  const double scale = sigma / std::sqrt(2.0);
  Eigen::MatrixXcd out(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      out(r, c) = cplx(scale * re, scale * im);
    }
  return out;
}

Eigen::MatrixXcd receive(const Channel& channel, const Eigen::MatrixXcd& X, double sigma_n, Rng& rng) {
  if (X.rows() != channel.antennas())
    throw DomainError("receive: transmit block has " + std::to_string(X.rows()) +
                      " rows, channel has " + std::to_string(channel.antennas()) + " antennas");
  if (sigma_n < 0.0) throw DomainError("receive: noise level must be non-negative");
  Eigen::MatrixXcd Y = channel.H * X;
  if (sigma_n > 0.0) Y += complex_noise(Y.rows(), Y.cols(), sigma_n, rng);
  return Y;
}

Eigen::MatrixXcd receive(const Channel& channel, const CEPoint& x, double sigma_n, Rng& rng) {
  return receive(channel, unstack_real(x.Xbar), sigma_n, rng);
}

void write_channel_csv(std::ostream& out, const Channel& channel) {
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < channel.users(); ++i) {
    for (Eigen::Index j = 0; j < channel.antennas(); ++j) {
      if (j > 0) out << ',';
      out << channel.H(i, j).real() << ',' << channel.H(i, j).imag();
    }
    out << '\n';
  }
}

Channel read_channel_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("channel CSV: bad number '" + cell + "'");
      }
    }
    if (values.empty() || values.size() % 2 != 0)
      throw ConfigError("channel CSV: each row needs re,im pairs");
    if (!rows.empty() && values.size() != rows.front().size())
      throw ConfigError("channel CSV: ragged rows");
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ConfigError("channel CSV: no rows");
  const auto K = static_cast<Eigen::Index>(rows.size());
  const auto N = static_cast<Eigen::Index>(rows.front().size() / 2);
  Channel ch{Eigen::MatrixXcd(K, N)};
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index j = 0; j < N; ++j)
      ch.H(i, j) = cplx(rows[i][2 * j], rows[i][2 * j + 1]);
  return ch;
}

Channel load_channel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open channel file: " + path);
  return read_channel_csv(in);
}

}  // namespace cepre
