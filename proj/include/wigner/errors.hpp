#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace wigner {

/// Precondition or domain violation (bad indices, invalid configuration).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Iterative eigensolver ran out of sweeps.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int sweeps, double off_norm)
      : std::runtime_error(what), sweeps_(sweeps), off_norm_(off_norm) {}

  int sweeps() const noexcept { return sweeps_; }
  double off_diagonal_norm() const noexcept { return off_norm_; }

 private:
  int sweeps_;
  double off_norm_;
};

/// Objective returned a non-finite value; carries the offending point.
class OptimizerError : public std::runtime_error {
 public:
  OptimizerError(const std::string& what, std::vector<double> point)
      : std::runtime_error(what), point_(std::move(point)) {}

  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wigner
