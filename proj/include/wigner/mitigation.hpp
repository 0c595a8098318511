#pragma once

// Error mitigation: circuit inversion, global unitary folding, zero-noise
// extrapolation, and dynamical decoupling of idle windows.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wigner/circuit.hpp"

namespace wigner {

enum class ZneFit { Linear, Richardson };

std::string to_string(ZneFit fit);
ZneFit parse_zne_fit(std::string_view text);

struct MitigationConfig {
  bool zne_enabled = true;
  std::vector<int> scale_factors{1, 3, 5};
  ZneFit fit = ZneFit::Linear;
  bool dd_enabled = true;

  void validate() const;
  bool any() const { return zne_enabled || dd_enabled; }
};

/// Reversed gate order with each gate replaced by its inverse.
Circuit invert(const Circuit& c);

/// c (c^-1 c)^((lambda-1)/2). Lambda must be odd and positive.
Circuit fold_global(const Circuit& c, int lambda);

struct ZneResult {
  double value = 0.0;                // extrapolated energy at lambda = 0
  std::vector<double> coefficients;  // polynomial in lambda, constant term first
};

/// Linear: least-squares line. Richardson: the degree (count-1) polynomial
/// through every point. Lambdas must be distinct; at least two points.
ZneResult zne_fit(const std::vector<std::pair<double, double>>& points, ZneFit fit);

inline double zne_extrapolate(const std::vector<std::pair<double, double>>& points, ZneFit fit) {
  return zne_fit(points, fit).value;
}

/// X pulses at the first and last moment of every idle window spanning at
/// least two moments, with explicit idle slots in between so the pulses keep
/// their positions under ASAP scheduling. A qubit's windows start after its
/// first gate and include the trailing span up to the final moment; explicit
/// idle slots count as occupied, so a second pass adds nothing.
Circuit insert_dd(const Circuit& c);

/// Per-lambda energies and fit behind one mitigated estimate.
struct MitigationDiagnostics {
  std::vector<int> scale_factors;
  std::vector<double> energies;
  std::vector<double> coefficients;
  double value = 0.0;
};

/// Noisy energy of `c` acting on |0...0> with the configured mitigation:
/// fold at each scale factor, then insert DD on the folded circuit, then
/// extrapolate. Without ZNE only the unfolded circuit is evaluated.
MitigationDiagnostics mitigated_expectation(const Circuit& c, const PauliHamiltonian& h, const NoiseModel& noise,
                                            const MitigationConfig& cfg);

}  // namespace wigner
