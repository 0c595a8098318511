#include "wigner/circuit.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wigner/errors.hpp"

namespace wigner {

namespace {

using Mat2 = std::array<Complex, 4>;   // row-major
using Mat4 = std::array<Complex, 16>;  // row-major, local index = bit(a) + 2 bit(b)

constexpr Complex kI{0.0, 1.0};

// Kernels act on a flat amplitude array whose index bits are "positions".
// A density matrix is handled as a vector over 2n positions: column bits are
// positions [0, n), row bits are positions [n, 2n).

void apply_mat2(std::vector<Complex>& v, int pos, const Mat2& m) {
  const std::size_t mask = std::size_t{1} << pos;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i & mask) continue;
    const Complex a = v[i];
    const Complex b = v[i | mask];
    v[i] = m[0] * a + m[1] * b;
    v[i | mask] = m[2] * a + m[3] * b;
  }
}

void apply_diag2(std::vector<Complex>& v, int pos, Complex d0, Complex d1) {
  const std::size_t mask = std::size_t{1} << pos;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= (i & mask) ? d1 : d0;
}

void apply_mat4(std::vector<Complex>& v, int pos_a, int pos_b, const Mat4& m) {
  const std::size_t ma = std::size_t{1} << pos_a;
  const std::size_t mb = std::size_t{1} << pos_b;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i & (ma | mb)) continue;
    const std::array<std::size_t, 4> idx{i, i | ma, i | mb, i | ma | mb};
    std::array<Complex, 4> in{v[idx[0]], v[idx[1]], v[idx[2]], v[idx[3]]};
    for (int r = 0; r < 4; ++r) {
      Complex acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += m[static_cast<std::size_t>(r * 4 + k)] * in[static_cast<std::size_t>(k)];
      v[idx[static_cast<std::size_t>(r)]] = acc;
    }
  }
}

// 2x2 block acting on the single-excitation pair {|a=1,b=0>, |a=0,b=1>}.
void apply_exchange(std::vector<Complex>& v, int pos_a, int pos_b, Complex diag, Complex off) {
  const std::size_t ma = std::size_t{1} << pos_a;
  const std::size_t mb = std::size_t{1} << pos_b;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i & (ma | mb)) continue;
    const Complex x = v[i | ma];
    const Complex y = v[i | mb];
    v[i | ma] = diag * x + off * y;
    v[i | mb] = off * x + diag * y;
  }
}

void apply_zz_phase(std::vector<Complex>& v, int pos_a, int pos_b, Complex same, Complex differ) {
  const std::size_t ma = std::size_t{1} << pos_a;
  const std::size_t mb = std::size_t{1} << pos_b;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= (!(i & ma) == !(i & mb)) ? same : differ;
}

void apply_cz(std::vector<Complex>& v, int pos_a, int pos_b) {
  const std::size_t both = (std::size_t{1} << pos_a) | (std::size_t{1} << pos_b);
  for (std::size_t i = 0; i < v.size(); ++i)
    if ((i & both) == both) v[i] = -v[i];
}

Mat2 single_qubit_matrix(const Gate& g) {
  const double c = std::cos(g.angle / 2.0);
  const double s = std::sin(g.angle / 2.0);
  const double r = std::numbers::sqrt2 / 2.0;
  switch (g.kind) {
    case GateKind::X: return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Y: return {0.0, -kI, kI, 0.0};
    case GateKind::Z: return {1.0, 0.0, 0.0, -1.0};
    case GateKind::H: return {r, r, r, -r};
    case GateKind::RX: return {c, -kI * s, -kI * s, c};
    case GateKind::RY: return {c, -s, s, c};
    case GateKind::RZ: return {std::polar(1.0, -g.angle / 2.0), 0.0, 0.0, std::polar(1.0, g.angle / 2.0)};
    case GateKind::I: return {1.0, 0.0, 0.0, 1.0};
    default: throw DomainError("not a single-qubit gate");
  }
}

// Applies the gate (or its elementwise conjugate) at positions offset by `shift`.
void apply_gate(std::vector<Complex>& v, const Gate& g, int shift, bool conjugate) {
  auto cj = [conjugate](Complex z) { return conjugate ? std::conj(z) : z; };
  const int a = g.q0 + shift;
  const int b = g.q1 + shift;
  switch (g.kind) {
    case GateKind::I: return;
    case GateKind::Z: apply_diag2(v, a, 1.0, -1.0); return;
    case GateKind::RZ:
      apply_diag2(v, a, cj(std::polar(1.0, -g.angle / 2.0)), cj(std::polar(1.0, g.angle / 2.0)));
      return;
    case GateKind::CZ: apply_cz(v, a, b); return;
    case GateKind::RZZ:
      apply_zz_phase(v, a, b, cj(std::polar(1.0, -g.angle / 2.0)), cj(std::polar(1.0, g.angle / 2.0)));
      return;
    case GateKind::XXplusYY:
      apply_exchange(v, a, b, std::cos(g.angle / 2.0), cj(-kI * std::sin(g.angle / 2.0)));
      return;
    case GateKind::CNOT: {
      Mat4 m{};
      m[0] = 1.0;           // |00> -> |00>
      m[1 * 4 + 3] = 1.0;   // |a=1,b=1> -> |a=1,b=0>
      m[2 * 4 + 2] = 1.0;   // |a=0,b=1> unchanged
      m[3 * 4 + 1] = 1.0;   // |a=1,b=0> -> |a=1,b=1>
      apply_mat4(v, a, b, m);
      return;
    }
    default: {
      Mat2 m = single_qubit_matrix(g);
      for (auto& z : m) z = cj(z);
      apply_mat2(v, a, m);
      return;
    }
  }
}

void check_qubits(int qubits) {
  if (qubits <= 0 || qubits > 20) throw DomainError("qubit count must be in [1, 20]");
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Complex pauli_phase(const PauliMasks& m, std::size_t b) {
  static constexpr std::array<Complex, 4> kPowers{Complex{1, 0}, Complex{0, 1}, Complex{-1, 0}, Complex{0, -1}};
  const bool negative = std::popcount(static_cast<std::uint64_t>(b) & m.phase) & 1;
  const Complex base = kPowers[static_cast<std::size_t>(m.y_count % 4)];
  return negative ? -base : base;
}

}  // namespace

std::string_view gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CZ: return "CZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::XXplusYY: return "XXPLUSYY";
    case GateKind::RZZ: return "RZZ";
    case GateKind::I: return "I";
  }
  return "?";
}

int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::CZ:
    case GateKind::CNOT:
    case GateKind::XXplusYY:
    case GateKind::RZZ: return 2;
    default: return 1;
  }
}

bool is_rotation(GateKind kind) {
  return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ || kind == GateKind::XXplusYY ||
         kind == GateKind::RZZ;
}

Circuit& Circuit::add(const Gate& g) {
  gates.push_back(g);
  return *this;
}

void Circuit::validate() const {
  check_qubits(qubits);
  for (const auto& g : gates) {
    if (g.q0 < 0 || g.q0 >= qubits) throw DomainError("gate target out of range");
    if (g.arity() == 2) {
      if (g.q1 < 0 || g.q1 >= qubits) throw DomainError("gate target out of range");
      if (g.q1 == g.q0) throw DomainError("two-qubit gate targets must be distinct");
    }
    if (!std::isfinite(g.angle)) throw DomainError("gate angle must be finite");
  }
}

Schedule schedule(const Circuit& c) {
  c.validate();
  Schedule s;
  std::vector<int> next_free(static_cast<std::size_t>(c.qubits), 0);
  for (std::size_t k = 0; k < c.gates.size(); ++k) {
    const Gate& g = c.gates[k];
    int moment = next_free[static_cast<std::size_t>(g.q0)];
    if (g.arity() == 2) moment = std::max(moment, next_free[static_cast<std::size_t>(g.q1)]);
    if (static_cast<std::size_t>(moment) >= s.moments.size()) s.moments.resize(static_cast<std::size_t>(moment) + 1);
    s.moments[static_cast<std::size_t>(moment)].push_back(k);
    next_free[static_cast<std::size_t>(g.q0)] = moment + 1;
    if (g.arity() == 2) next_free[static_cast<std::size_t>(g.q1)] = moment + 1;
  }
  return s;
}

StateVector::StateVector(int qubits, Bitmask basis_state) : qubits_(qubits) {
  check_qubits(qubits);
  amps_.assign(std::size_t{1} << qubits, 0.0);
  if (basis_state >= amps_.size()) throw DomainError("basis state out of range");
  amps_[basis_state] = 1.0;
}

StateVector::StateVector(int qubits, std::vector<Complex> amplitudes) : qubits_(qubits), amps_(std::move(amplitudes)) {
  check_qubits(qubits);
  if (amps_.size() != (std::size_t{1} << qubits)) throw DomainError("amplitude count must be 2^qubits");
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

DensityMatrix::DensityMatrix(int qubits, Bitmask basis_state) : qubits_(qubits) {
  check_qubits(qubits);
  if (qubits > 12) throw DomainError("density matrices limited to 12 qubits");
  dim_ = std::size_t{1} << qubits;
  if (basis_state >= dim_) throw DomainError("basis state out of range");
  data_.assign(dim_ * dim_, 0.0);
  data_[basis_state * dim_ + basis_state] = 1.0;
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  DensityMatrix rho(psi.qubits());
  const auto& a = psi.amplitudes();
  for (std::size_t r = 0; r < rho.dim_; ++r)
    for (std::size_t c = 0; c < rho.dim_; ++c) rho.data_[r * rho.dim_ + c] = a[r] * std::conj(a[c]);
  return rho;
}

Complex DensityMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += data_[i * dim_ + i];
  return t;
}

void NoiseModel::validate() const {
  for (double p : {p1, p2, p_idle})
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("noise probabilities must lie in [0, 1]");
}

StateVector apply_circuit(StateVector state, const Circuit& c) {
  c.validate();
  if (c.qubits != state.qubits()) throw DomainError("circuit and state qubit counts differ");
  for (const auto& g : c.gates) apply_gate(state.amplitudes(), g, 0, false);
  return state;
}

void apply_depolarizing(DensityMatrix& rho, int qubit, double p) {
  if (p == 0.0) return;
  const int n = rho.qubits();
  auto& d = rho.data();
  const std::size_t col = std::size_t{1} << qubit;
  const std::size_t row = std::size_t{1} << (qubit + n);
  const double keep = 1.0 - p;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i & (row | col)) continue;
    const Complex mixed = 0.5 * p * (d[i] + d[i | row | col]);
    d[i] = keep * d[i] + mixed;
    d[i | row | col] = keep * d[i | row | col] + mixed;
    d[i | row] *= keep;
    d[i | col] *= keep;
  }
}

void apply_depolarizing(DensityMatrix& rho, int qubit_a, int qubit_b, double p) {
  if (p == 0.0) return;
  const int n = rho.qubits();
  auto& d = rho.data();
  const std::array<std::size_t, 4> col{0, std::size_t{1} << qubit_a, std::size_t{1} << qubit_b,
                                       (std::size_t{1} << qubit_a) | (std::size_t{1} << qubit_b)};
  std::array<std::size_t, 4> row{};
  for (std::size_t k = 0; k < 4; ++k) row[k] = col[k] << n;
  const std::size_t all = row[3] | col[3];
  const double keep = 1.0 - p;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i & all) continue;
    Complex trace = 0.0;
    for (std::size_t s = 0; s < 4; ++s) trace += d[i | row[s] | col[s]];
    const Complex mixed = 0.25 * p * trace;
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t c = 0; c < 4; ++c) {
        Complex& e = d[i | row[r] | col[c]];
        e = keep * e + (r == c ? mixed : Complex{0.0});
      }
    }
  }
}

void apply_phase_flip(DensityMatrix& rho, int qubit, double p) {
  if (p == 0.0) return;
  const int n = rho.qubits();
  auto& d = rho.data();
  const std::size_t col = std::size_t{1} << qubit;
  const std::size_t row = std::size_t{1} << (qubit + n);
  const double damp = 1.0 - 2.0 * p;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const bool r = i & row;
    const bool c = i & col;
    if (r != c) d[i] *= damp;
  }
}

DensityMatrix apply_circuit_noisy(DensityMatrix rho, const Circuit& c, const NoiseModel& noise) {
  noise.validate();
  if (c.qubits != rho.qubits()) throw DomainError("circuit and density matrix qubit counts differ");
  const Schedule s = schedule(c);
  const int n = rho.qubits();
  std::vector<bool> busy(static_cast<std::size_t>(n));
  for (const auto& moment : s.moments) {
    std::fill(busy.begin(), busy.end(), false);
    for (std::size_t k : moment) {
      const Gate& g = c.gates[k];
      if (g.kind == GateKind::I) continue;
      apply_gate(rho.data(), g, n, false);
      apply_gate(rho.data(), g, 0, true);
      busy[static_cast<std::size_t>(g.q0)] = true;
      if (g.arity() == 2) busy[static_cast<std::size_t>(g.q1)] = true;
    }
    for (std::size_t k : moment) {
      const Gate& g = c.gates[k];
      if (g.kind == GateKind::I) continue;
      if (g.arity() == 2)
        apply_depolarizing(rho, g.q0, g.q1, noise.p2);
      else
        apply_depolarizing(rho, g.q0, noise.p1);
    }
    for (int q = 0; q < n; ++q)
      if (!busy[static_cast<std::size_t>(q)]) apply_phase_flip(rho, q, noise.p_idle);
  }
  return rho;
}

double expectation(const StateVector& psi, const PauliHamiltonian& h) {
  if (h.qubits() != psi.qubits()) throw DomainError("Hamiltonian and state qubit counts differ");
  const auto& a = psi.amplitudes();
  double total = 0.0;
  for (const auto& term : h.terms()) {
    const auto m = PauliMasks::from_axes(term.axes);
    Complex acc = 0.0;
    for (std::size_t b = 0; b < a.size(); ++b) acc += std::conj(a[b ^ m.flip]) * pauli_phase(m, b) * a[b];
    total += term.coefficient * acc.real();
  }
  return total;
}

double expectation(const DensityMatrix& rho, const PauliHamiltonian& h) {
  if (h.qubits() != rho.qubits()) throw DomainError("Hamiltonian and density matrix qubit counts differ");
  const std::size_t dim = rho.dimension();
  const auto& d = rho.data();
  double total = 0.0;
  for (const auto& term : h.terms()) {
    const auto m = PauliMasks::from_axes(term.axes);
    Complex acc = 0.0;
    for (std::size_t b = 0; b < dim; ++b) acc += pauli_phase(m, b) * d[b * dim + (b ^ m.flip)];
    total += term.coefficient * acc.real();
  }
  return total;
}

double sample_expectation(const StateVector& psi, const PauliHamiltonian& h, int shots, std::uint64_t seed) {
  if (shots < 1) throw DomainError("shot count must be positive");
  if (h.qubits() != psi.qubits()) throw DomainError("Hamiltonian and state qubit counts differ");
  const int n = psi.qubits();
  double total = 0.0;
  std::uint64_t rng = seed;
  std::vector<double> cumulative(psi.dimension());
  for (const auto& term : h.terms()) {
    // One stream per term, drawn in term order.
    std::uint64_t term_state = splitmix64(rng);
    const auto m = PauliMasks::from_axes(term.axes);
    const std::uint64_t support = m.flip | m.phase;
    if (support == 0) {
      total += term.coefficient;
      continue;
    }
    StateVector rotated = psi;
    for (int q = 0; q < n; ++q) {
      const char axis = term.axes[static_cast<std::size_t>(q)];
      if (axis == 'X') {
        apply_gate(rotated.amplitudes(), Gate::h(q), 0, false);
      } else if (axis == 'Y') {
        // S^dagger then H maps the Y eigenbasis onto the computational basis.
        apply_diag2(rotated.amplitudes(), q, 1.0, -kI);
        apply_gate(rotated.amplitudes(), Gate::h(q), 0, false);
      }
    }
    double running = 0.0;
    for (std::size_t b = 0; b < cumulative.size(); ++b) {
      running += std::norm(rotated.amplitudes()[b]);
      cumulative[b] = running;
    }
    long long parity_sum = 0;
    for (int s = 0; s < shots; ++s) {
      const double u = static_cast<double>(splitmix64(term_state) >> 11) * 0x1.0p-53 * running;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
      if (it == cumulative.end()) --it;
      const auto outcome = static_cast<std::uint64_t>(it - cumulative.begin());
      parity_sum += (std::popcount(outcome & support) & 1) ? -1 : 1;
    }
    total += term.coefficient * static_cast<double>(parity_sum) / shots;
  }
  return total;
}

void write_circuit(std::ostream& os, const Circuit& c) {
  char buf[64];
  for (const auto& g : c.gates) {
    os << gate_name(g.kind);
    if (is_rotation(g.kind)) {
      std::snprintf(buf, sizeof buf, "%.17g", g.angle);
      os << ' ' << buf;
    }
    os << ' ' << g.q0;
    if (g.arity() == 2) os << ' ' << g.q1;
    os << '\n';
  }
}

Circuit read_circuit(std::istream& is, int qubits) {
  Circuit c(qubits);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string name;
    ls >> name;
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::toupper(ch); });
    Gate g;
    bool known = false;
    for (GateKind k : {GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::RX, GateKind::RY, GateKind::RZ,
                       GateKind::CZ, GateKind::CNOT, GateKind::XXplusYY, GateKind::RZZ, GateKind::I}) {
      if (gate_name(k) == name) {
        g.kind = k;
        known = true;
      }
    }
    if (!known) throw DomainError("unknown gate '" + name + "'");
    if (is_rotation(g.kind) && !(ls >> g.angle)) throw DomainError("missing angle: " + line);
    if (!(ls >> g.q0)) throw DomainError("missing target: " + line);
    if (g.arity() == 2 && !(ls >> g.q1)) throw DomainError("missing second target: " + line);
    c.add(g);
  }
  c.validate();
  return c;
}

}  // namespace wigner
