// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace cepre {

// Seedable generator used by every stochastic operation.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The std:: distributions are not (their algorithms are
// implementation-defined), so uniform and Gaussian variates are derived here
// directly from raw engine output: uniforms take the top 53 bits, Gaussians
// use the Box-Muller transform. Results are therefore identical across
// standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform();

  // Uniform integer on [0, n). n must be positive.
  std::uint64_t uniform_int(std::uint64_t n);

  // Standard normal N(0, 1).
  double normal();

  // Bernoulli(1/2).
  bool bit() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed for a sub-stream identified by (master, a, b). Distinct tuples give
// statistically independent streams; the mapping is platform-independent.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

}  // namespace cepre
