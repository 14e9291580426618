// SPDX-License-Identifier: Apache-2.0
#include "cepre/constellation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "cepre/errors.hpp"

namespace cepre {

namespace {

std::uint32_t gray(std::uint32_t k) { return k ^ (k >> 1); }

std::uint32_t gray_inverse(std::uint32_t g) {
  std::uint32_t k = g;
  for (std::uint32_t shift = 1; shift < 32; shift <<= 1) k ^= k >> shift;
  return k;
}

}  // namespace

QamConstellation::QamConstellation(int L) : L_(L) {
  if (L < 1 || !std::has_single_bit(static_cast<unsigned>(2 * L)))
    throw ConfigError("QAM order L must be >= 1 with 2L a power of two, got " +
                      std::to_string(L));
  bits_per_dim_ = std::countr_zero(static_cast<unsigned>(2 * L));
  points_.reserve(static_cast<std::size_t>(levels()) * levels());
  for (int i = 0; i < levels(); ++i)
    for (int q = 0; q < levels(); ++q) points_.emplace_back(amplitude(i), amplitude(q));
}

int QamConstellation::nearest_level(double u) const {
  const double k = std::round((u + max_amplitude()) / 2.0);
  if (!(k > 0.0)) return 0;  // also catches NaN
  return static_cast<int>(std::min(k, static_cast<double>(levels() - 1)));
}

bool QamConstellation::is_interior(cplx s) const {
  return std::abs(s.real()) < max_amplitude() && std::abs(s.imag()) < max_amplitude();
}

cplx QamConstellation::decide(cplx y, double d) const {
  if (!(d > 0.0)) throw DomainError("decide: gain d must be positive");
  const cplx u = y / d;
  return {amplitude(nearest_level(u.real())), amplitude(nearest_level(u.imag()))};
}

int QamConstellation::level_of(double coordinate) const {
  const int k = nearest_level(coordinate);
  if (amplitude(k) != coordinate)
    throw DomainError("value " + std::to_string(coordinate) + " is not a constellation level");
  return k;
}

std::uint32_t QamConstellation::label(cplx s) const {
  const auto gi = gray(static_cast<std::uint32_t>(level_of(s.real())));
  const auto gq = gray(static_cast<std::uint32_t>(level_of(s.imag())));
  return (gi << bits_per_dim_) | gq;
}

cplx QamConstellation::point_from_label(std::uint32_t label) const {
  const std::uint32_t mask = (1u << bits_per_dim_) - 1u;
  const auto ki = static_cast<int>(gray_inverse((label >> bits_per_dim_) & mask));
  const auto kq = static_cast<int>(gray_inverse(label & mask));
  return {amplitude(ki), amplitude(kq)};
}

std::vector<std::uint8_t> QamConstellation::symbols_to_bits(std::span<const cplx> symbols) const {
  const int m = bits_per_symbol();
  std::vector<std::uint8_t> bits;
  bits.reserve(symbols.size() * static_cast<std::size_t>(m));
  for (const cplx& s : symbols) {
    const std::uint32_t l = label(s);
    for (int b = m - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((l >> b) & 1u));
  }
  return bits;
}

std::vector<cplx> QamConstellation::bits_to_symbols(std::span<const std::uint8_t> bits) const {
  const auto m = static_cast<std::size_t>(bits_per_symbol());
  if (bits.size() % m != 0)
    throw DomainError("bit stream length " + std::to_string(bits.size()) +
                      " is not a multiple of " + std::to_string(m));
  std::vector<cplx> symbols;
  symbols.reserve(bits.size() / m);
  for (std::size_t at = 0; at < bits.size(); at += m) {
    std::uint32_t l = 0;
    for (std::size_t b = 0; b < m; ++b) {
      if (bits[at + b] > 1) throw DomainError("bit values must be 0 or 1");
      l = (l << 1) | bits[at + b];
    }
    symbols.push_back(point_from_label(l));
  }
  return symbols;
}

QamConstellation make_constellation(int L) { return QamConstellation(L); }

int order_for_alphabet_size(int M) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(M))));
  if (M < 4 || side * side != M || side % 2 != 0)
    throw ConfigError("not a square QAM alphabet size: " + std::to_string(M));
  return side / 2;
}

}  // namespace cepre
