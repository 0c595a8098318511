#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wigner/circuit.hpp"
#include "wigner/cobyla.hpp"
#include "wigner/mitigation.hpp"
#include "wigner/model.hpp"

namespace wigner {

enum class AnsatzKind { HardwareEfficient, NumberPreserving };

std::string to_string(AnsatzKind kind);
AnsatzKind parse_ansatz_kind(std::string_view text);

struct AnsatzSpec {
  AnsatzKind kind = AnsatzKind::NumberPreserving;
  int layers = 3;
  int qubits = 6;
  Bitmask initial_state = 0b001001;

  std::size_t parameter_count() const;
  void validate() const;
};

/// Hardware-efficient: L x [RY on every qubit; CZ on every ring edge], then a
/// final RY layer, starting from |0...0>. qubits * (L + 1) parameters.
///
/// Number-preserving: prepares `initial_state` (see prepare_initial_state),
/// then L layers of
///   - a phase exp(-i g_d Z_i Z_j / 2) on every pair at ring distance d, one
///     angle per distance class except the largest (RZZ);
///   - XXplusYY on the even ring edges with one shared angle, then on the odd
///     edges with another.
/// Layer l uses params[l*(1 + M/2) ...]: even hop, odd hop, g_1 .. g_{M/2-1}.
/// Every layer commutes with translation by two sites and conserves the
/// particle number.
Circuit build_ansatz(const AnsatzSpec& spec, std::span<const double> params);

/// Smallest p with the configuration invariant under translation by p = M/Ne
/// sites, or 0 when it is not such a crystal.
int crystal_period(Bitmask mask, int qubits);

/// For a crystal configuration, the equal-weight, equal-phase superposition
/// of its p translates (the zero-momentum state of the classical minimum in
/// the hardcore-boson convention); otherwise X gates on the set bits.
void prepare_initial_state(Circuit& c, Bitmask mask);

struct VqeResult {
  std::vector<double> parameters;
  double energy = 0.0;
  std::vector<std::pair<int, double>> history;  // (evaluation index, objective)
  bool converged = false;
  int evaluations = 0;
  std::optional<MitigationDiagnostics> mitigation;  // at the final parameters
};

/// The observable the optimizer sees. For ansaetze that do not conserve
/// particle number a penalty mu (N - Ne)^2 is added, with mu = 2 * sum|c_k|
/// of the model Hamiltonian, so every other particle sector lies above the
/// Ne-sector ground energy and the objective stays a variational bound.
PauliHamiltonian vqe_observable(const RingConfig& cfg, const AnsatzSpec& spec);

/// Minimises the observable over ansatz parameters with COBYLA. The initial
/// point is drawn uniformly from [-0.1, 0.1] with `opt.seed`. Noise selects
/// density-matrix evaluation; mitigation (if any) wraps each evaluation.
VqeResult run_vqe(const RingConfig& cfg, const AnsatzSpec& spec, const OptimizerConfig& opt,
                  const std::optional<NoiseModel>& noise = std::nullopt,
                  const std::optional<MitigationConfig>& mitigation = std::nullopt);

/// 100 |E_exp - E_th| / |E_th|, in percent.
double relative_error(double measured, double reference);

/// `key = value` per line.
void write_vqe_result(std::ostream& os, const VqeResult& r);
/// Two columns: evaluation index, objective value.
void write_vqe_history(std::ostream& os, const VqeResult& r);

}  // namespace wigner
