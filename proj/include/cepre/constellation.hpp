// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace cepre {

using cplx = std::complex<double>;

// Square QAM alphabet on the odd-integer grid {±1, ±3, ..., ±(2L-1)}²,
// unnormalized. Bit labels are independent Gray codes on the in-phase and
// quadrature level indices; the in-phase bits come first, MSB first.
//
// Immutable after construction.
class QamConstellation {
 public:
  // Throws ConfigError unless L >= 1 and 2L is a power of two.
  explicit QamConstellation(int L);

  int order() const { return L_; }
  int levels() const { return 2 * L_; }
  int bits_per_dim() const { return bits_per_dim_; }
  int bits_per_symbol() const { return 2 * bits_per_dim_; }
  int max_amplitude() const { return 2 * L_ - 1; }
  std::size_t size() const { return points_.size(); }

  // Points ordered by (I level index, Q level index), each index ascending.
  const std::vector<cplx>& points() const { return points_; }

  // Level index k in [0, 2L) <-> amplitude 2k - (2L-1).
  double amplitude(int level) const { return 2.0 * level - max_amplitude(); }
  // Nearest level index to a real coordinate, clipped to the outer levels.
  int nearest_level(double u) const;

  // True when both coordinates of s are strictly inside the outer levels.
  bool is_interior(cplx s) const;

  // Nearest alphabet point to y/d. Throws DomainError if d <= 0.
  cplx decide(cplx y, double d) const;

  // Gray label of an alphabet point, packed into the low bits_per_symbol bits.
  std::uint32_t label(cplx s) const;
  cplx point_from_label(std::uint32_t label) const;

  // Bit vectors hold one bit per byte (0 or 1).
  std::vector<std::uint8_t> symbols_to_bits(std::span<const cplx> symbols) const;
  // Throws DomainError when bits.size() is not a multiple of bits_per_symbol.
  std::vector<cplx> bits_to_symbols(std::span<const std::uint8_t> bits) const;

 private:
  int level_of(double coordinate) const;

  int L_;
  int bits_per_dim_;
  std::vector<cplx> points_;
};

// Convenience wrapper with the same semantics as the constructor.
QamConstellation make_constellation(int L);

// Alphabet order L for an M-QAM name, e.g. 16 -> 2, 64 -> 4.
int order_for_alphabet_size(int M);

}  // namespace cepre
