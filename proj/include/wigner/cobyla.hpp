#pragma once

// Derivative-free minimisation with linear interpolation models over a
// simplex and a shrinking trust region (Powell's COBYLA, no constraints).

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace wigner {

struct OptimizerConfig {
  double rho_begin = 0.5;
  double rho_end = 1e-6;
  int max_evaluations = 5000;
  std::uint64_t seed = 0;

  /// Throws DomainError unless 0 < rho_end < rho_begin and
  /// max_evaluations >= dimension + 2.
  void validate(std::size_t dimension) const;
};

using Objective = std::function<double(std::span<const double>)>;

struct CobylaResult {
  std::vector<double> x;
  double f = 0.0;
  int evaluations = 0;
  bool converged = false;  // reached rho_end (or an exactly flat model)
  std::vector<double> history;  // objective value of every evaluation, in order
};

/// Returns the best point seen, never worse than f(x0). Throws OptimizerError
/// when the objective returns a non-finite value.
CobylaResult cobyla_minimize(const Objective& objective, std::vector<double> x0, const OptimizerConfig& cfg);

}  // namespace wigner
