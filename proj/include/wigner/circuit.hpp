#pragma once

// Gate-level circuits: ASAP scheduling, state-vector and density-matrix
// simulation, and Pauli-sum expectation values.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wigner/model.hpp"

namespace wigner {

using Complex = std::complex<double>;

// `I` is an explicit idle slot. It occupies its moment in the schedule (so
// padded DD pulses keep their timing) but the noisy simulator treats the
// qubit as idle there.
enum class GateKind { X, Y, Z, H, RX, RY, RZ, CZ, CNOT, XXplusYY, RZZ, I };

std::string_view gate_name(GateKind kind);
int gate_arity(GateKind kind);
bool is_rotation(GateKind kind);

struct Gate {
  GateKind kind = GateKind::I;
  double angle = 0.0;
  int q0 = 0;
  int q1 = -1;  // second target for two-qubit kinds; CNOT control is q0

  static Gate x(int q) { return {GateKind::X, 0.0, q, -1}; }
  static Gate y(int q) { return {GateKind::Y, 0.0, q, -1}; }
  static Gate z(int q) { return {GateKind::Z, 0.0, q, -1}; }
  static Gate h(int q) { return {GateKind::H, 0.0, q, -1}; }
  static Gate rx(double theta, int q) { return {GateKind::RX, theta, q, -1}; }
  static Gate ry(double theta, int q) { return {GateKind::RY, theta, q, -1}; }
  static Gate rz(double theta, int q) { return {GateKind::RZ, theta, q, -1}; }
  static Gate cz(int a, int b) { return {GateKind::CZ, 0.0, a, b}; }
  static Gate cnot(int control, int target) { return {GateKind::CNOT, 0.0, control, target}; }
  /// exp(-i theta/2 (XX + YY)/2): swaps one excitation between a and b.
  static Gate xx_plus_yy(double theta, int a, int b) { return {GateKind::XXplusYY, theta, a, b}; }
  /// exp(-i theta/2 Z_a Z_b); diagonal, so it conserves excitation number.
  static Gate rzz(double theta, int a, int b) { return {GateKind::RZZ, theta, a, b}; }
  static Gate idle(int q) { return {GateKind::I, 0.0, q, -1}; }

  int arity() const { return gate_arity(kind); }
  bool acts_on(int q) const { return q0 == q || (arity() == 2 && q1 == q); }

  friend bool operator==(const Gate&, const Gate&) = default;
};

struct Circuit {
  int qubits = 0;
  std::vector<Gate> gates;

  explicit Circuit(int n = 0) : qubits(n) {}
  Circuit& add(const Gate& g);
  /// Throws DomainError on out-of-range or repeated targets.
  void validate() const;

  friend bool operator==(const Circuit&, const Circuit&) = default;
};

struct Schedule {
  std::vector<std::vector<std::size_t>> moments;  // gate indices, ascending within a moment
};

/// ASAP layering: each gate lands one moment after the latest gate sharing a qubit.
Schedule schedule(const Circuit& c);

class StateVector {
 public:
  explicit StateVector(int qubits, Bitmask basis_state = 0);
  StateVector(int qubits, std::vector<Complex> amplitudes);

  int qubits() const noexcept { return qubits_; }
  std::size_t dimension() const noexcept { return amps_.size(); }
  const std::vector<Complex>& amplitudes() const noexcept { return amps_; }
  std::vector<Complex>& amplitudes() noexcept { return amps_; }
  double norm() const;

 private:
  int qubits_;
  std::vector<Complex> amps_;
};

class DensityMatrix {
 public:
  explicit DensityMatrix(int qubits, Bitmask basis_state = 0);
  static DensityMatrix from_pure(const StateVector& psi);

  int qubits() const noexcept { return qubits_; }
  std::size_t dimension() const noexcept { return dim_; }
  Complex operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
  /// Row-major storage; entry (r, c) sits at r * dimension() + c.
  const std::vector<Complex>& data() const noexcept { return data_; }
  std::vector<Complex>& data() noexcept { return data_; }
  Complex trace() const;

 private:
  int qubits_;
  std::size_t dim_;
  std::vector<Complex> data_;
};

struct NoiseModel {
  double p1 = 1e-3;      // depolarizing, per single-qubit gate
  double p2 = 8e-3;      // depolarizing, per two-qubit gate
  double p_idle = 2e-3;  // phase flip, per idle qubit per moment

  static NoiseModel noiseless() { return {0.0, 0.0, 0.0}; }
  void validate() const;
};

StateVector apply_circuit(StateVector state, const Circuit& c);

/// Moment by moment: gate unitaries, then depolarizing on each gate's targets
/// (rho -> (1-p) rho + p I_S/d_S (x) Tr_S rho), then rho -> (1-p) rho + p Z rho Z
/// on every qubit idle in the moment.
DensityMatrix apply_circuit_noisy(DensityMatrix rho, const Circuit& c, const NoiseModel& noise);

/// Single-channel primitives, exposed for testing and custom noise passes.
void apply_depolarizing(DensityMatrix& rho, int qubit, double p);
void apply_depolarizing(DensityMatrix& rho, int qubit_a, int qubit_b, double p);
void apply_phase_flip(DensityMatrix& rho, int qubit, double p);

double expectation(const StateVector& psi, const PauliHamiltonian& h);
double expectation(const DensityMatrix& rho, const PauliHamiltonian& h);

/// Shot-sampled estimate: each non-identity term is measured in its own basis
/// with `shots` samples. Deterministic for a fixed seed.
double sample_expectation(const StateVector& psi, const PauliHamiltonian& h, int shots, std::uint64_t seed);

/// One gate per line: `KIND [angle] q0 [q1]`.
void write_circuit(std::ostream& os, const Circuit& c);
Circuit read_circuit(std::istream& is, int qubits);

}  // namespace wigner
