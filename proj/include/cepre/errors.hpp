// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cepre {

/// Invalid user-supplied configuration (sizes, constellation order, solver knobs).
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// An argument outside the domain of an operation (dimension mismatch, d <= 0, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Numerical linear algebra failure, e.g. a rank-deficient channel handed to ZF.
class LinearAlgebraError : public std::runtime_error {
 public:
  explicit LinearAlgebraError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cepre
