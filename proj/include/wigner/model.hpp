#pragma once

// Ring lattice with long-range Coulomb repulsion: geometry, interaction
// matrix, and the Hamiltonian in sector-matrix and Pauli-operator form.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace wigner {

using Bitmask = std::uint32_t;

enum class Statistics { HardcoreBoson, SpinlessFermion };

std::string to_string(Statistics s);
Statistics parse_statistics(std::string_view text);

struct RingConfig {
  int sites = 6;
  int electrons = 2;
  double hopping = 1.0;
  double interaction = 0.0;
  Statistics statistics = Statistics::HardcoreBoson;

  /// Throws DomainError unless 3 <= sites, 0 < electrons < sites,
  /// hopping > 0 and interaction >= 0.
  void validate() const;
};

/// Chord length between sites i and j of an M-site ring whose circumference
/// is M lattice spacings: (M/pi) sin(pi d / M), d the minimal ring separation.
double chord_distance(int sites, int i, int j);

class InteractionMatrix {
 public:
  InteractionMatrix(int sites, std::vector<double> values);

  int sites() const noexcept { return sites_; }
  double operator()(int i, int j) const { return values_[static_cast<std::size_t>(i * sites_ + j)]; }

 private:
  int sites_;
  std::vector<double> values_;  // row-major, zero diagonal
};

InteractionMatrix build_interaction_matrix(const RingConfig& cfg);

/// Dense Hamiltonian block on the fixed-particle-number basis.
struct SectorHamiltonian {
  std::vector<Bitmask> basis;  // strictly increasing
  std::vector<double> matrix;  // row-major, dimension x dimension

  std::size_t dimension() const noexcept { return basis.size(); }
  double operator()(std::size_t row, std::size_t col) const { return matrix[row * basis.size() + col]; }
  /// Position of `state` in the basis, or dimension() if absent.
  std::size_t index_of(Bitmask state) const;
};

SectorHamiltonian build_sector_hamiltonian(const RingConfig& cfg);

/// Tensor product of single-qubit Paulis. `axes[q]` acts on qubit q, so the
/// leftmost character is qubit 0 (the least significant bit of a basis index).
struct PauliTerm {
  double coefficient = 0.0;
  std::string axes;
};

/// Bit-level form of a Pauli string: P|b> = phase(b) |b ^ flip>.
struct PauliMasks {
  std::uint64_t flip = 0;   // X or Y
  std::uint64_t phase = 0;  // Z or Y
  int y_count = 0;

  static PauliMasks from_axes(std::string_view axes);
};

class PauliHamiltonian {
 public:
  explicit PauliHamiltonian(int qubits);

  /// Adds `coefficient * axes`, merging with an existing identical string.
  void add(double coefficient, std::string_view axes);
  PauliHamiltonian& operator+=(const PauliHamiltonian& other);
  PauliHamiltonian scaled(double factor) const;

  int qubits() const noexcept { return qubits_; }
  /// Terms sorted lexicographically by axes; exact cancellations removed.
  const std::vector<PauliTerm>& terms() const noexcept { return terms_; }
  /// Sum of |coefficient|, an upper bound on the operator norm.
  double norm_bound() const;

 private:
  int qubits_;
  std::vector<PauliTerm> terms_;
};

PauliHamiltonian build_pauli_hamiltonian(const RingConfig& cfg);

/// Total particle number sum_i (I - Z_i)/2 as a Pauli operator.
PauliHamiltonian number_operator(int qubits);

struct ThresholdReport {
  double v_nearest = 0.0;
  double v_antipodal = 0.0;
  double bandwidth = 0.0;
  bool localised = false;
};

/// Interaction strength at which the ring is reported as localised.
inline constexpr double kLocalisationThreshold = 45.0;

/// Coulomb scales against the kinetic bandwidth. `localised` is the empirical
/// U >= 45 criterion, not a computed phase boundary. Requires even M.
ThresholdReport analyze_threshold(const RingConfig& cfg);

/// `<coefficient> <axes>` per line, 12 significant digits.
void write_pauli_hamiltonian(std::ostream& os, const PauliHamiltonian& h);
PauliHamiltonian read_pauli_hamiltonian(std::istream& is);

/// `<V_ij> <occupation>` per pair i < j, where the occupation string has '1'
/// at sites i and j and '0' elsewhere (site 0 leftmost).
void write_interaction_matrix(std::ostream& os, const InteractionMatrix& v);

}  // namespace wigner
