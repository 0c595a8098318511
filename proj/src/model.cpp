#include "wigner/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "wigner/errors.hpp"
#include "wigner/exact.hpp"

namespace wigner {

namespace {

constexpr double kDropTolerance = 1e-14;

std::vector<std::pair<int, int>> ring_edges(int sites) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i) edges.emplace_back(i, (i + 1) % sites);
  return edges;
}

Bitmask bit(int i) { return Bitmask{1} << i; }

// Sites strictly between lo and hi.
Bitmask between_mask(int lo, int hi) {
  if (hi - lo < 2) return 0;
  return (bit(hi) - 1) & ~(bit(lo + 1) - 1);
}

std::string single_axes(int qubits, std::initializer_list<std::pair<int, char>> ops) {
  std::string axes(static_cast<std::size_t>(qubits), 'I');
  for (auto [q, c] : ops) axes[static_cast<std::size_t>(q)] = c;
  return axes;
}

}  // namespace

std::string to_string(Statistics s) {
  return s == Statistics::HardcoreBoson ? "hardcore-boson" : "spinless-fermion";
}

Statistics parse_statistics(std::string_view text) {
  if (text == "hardcore-boson" || text == "boson") return Statistics::HardcoreBoson;
  if (text == "spinless-fermion" || text == "fermion") return Statistics::SpinlessFermion;
  throw DomainError("unknown particle statistics '" + std::string(text) + "'");
}

void RingConfig::validate() const {
  if (sites < 3) throw DomainError("ring needs at least 3 sites");
  if (sites > 20) throw DomainError("ring size limited to 20 sites");
  if (electrons <= 0 || electrons >= sites) throw DomainError("electron count must satisfy 0 < Ne < M");
  if (!(hopping > 0.0) || !std::isfinite(hopping)) throw DomainError("hopping must be positive and finite");
  if (!(interaction >= 0.0) || !std::isfinite(interaction))
    throw DomainError("interaction must be non-negative and finite");
}

double chord_distance(int sites, int i, int j) {
  if (sites < 3) throw DomainError("chord distance needs a ring of at least 3 sites");
  if (i < 0 || j < 0 || i >= sites || j >= sites) throw DomainError("site index out of range");
  if (i == j) throw DomainError("chord distance undefined for i == j");
  const int raw = std::abs(i - j);
  const int separation = std::min(raw, sites - raw);
  const double m = static_cast<double>(sites);
  return m / std::numbers::pi * std::sin(std::numbers::pi * separation / m);
}

InteractionMatrix::InteractionMatrix(int sites, std::vector<double> values)
    : sites_(sites), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(sites) * static_cast<std::size_t>(sites))
    throw DomainError("interaction matrix has wrong size");
}

InteractionMatrix build_interaction_matrix(const RingConfig& cfg) {
  cfg.validate();
  const int m = cfg.sites;
  std::vector<double> v(static_cast<std::size_t>(m * m), 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double value = cfg.interaction / chord_distance(m, i, j);
      v[static_cast<std::size_t>(i * m + j)] = value;
      v[static_cast<std::size_t>(j * m + i)] = value;
    }
  }
  return {m, std::move(v)};
}

std::size_t SectorHamiltonian::index_of(Bitmask state) const {
  auto it = std::lower_bound(basis.begin(), basis.end(), state);
  if (it == basis.end() || *it != state) return basis.size();
  return static_cast<std::size_t>(it - basis.begin());
}

SectorHamiltonian build_sector_hamiltonian(const RingConfig& cfg) {
  cfg.validate();
  const auto v = build_interaction_matrix(cfg);
  SectorHamiltonian h;
  h.basis = enumerate_basis(cfg.sites, cfg.electrons);
  const std::size_t dim = h.basis.size();
  h.matrix.assign(dim * dim, 0.0);

  for (std::size_t r = 0; r < dim; ++r) {
    const Bitmask state = h.basis[r];
    double diagonal = 0.0;
    for (int i = 0; i < cfg.sites; ++i) {
      if (!(state & bit(i))) continue;
      for (int j = i + 1; j < cfg.sites; ++j)
        if (state & bit(j)) diagonal += v(i, j);
    }
    h.matrix[r * dim + r] = diagonal;

    for (auto [a, b] : ring_edges(cfg.sites)) {
      const bool occ_a = state & bit(a);
      const bool occ_b = state & bit(b);
      if (occ_a == occ_b) continue;
      const Bitmask target = state ^ bit(a) ^ bit(b);
      double amplitude = -cfg.hopping;
      // Jordan-Wigner ordering by site index: moving a fermion between a and b
      // passes every occupied site strictly between them. For the closing edge
      // (M-1, 0) this is the whole interior of the ring.
      if (cfg.statistics == Statistics::SpinlessFermion) {
        const int crossed = std::popcount(state & between_mask(std::min(a, b), std::max(a, b)));
        if (crossed % 2 == 1) amplitude = -amplitude;
      }
      h.matrix[h.index_of(target) * dim + r] += amplitude;
    }
  }
  return h;
}

PauliMasks PauliMasks::from_axes(std::string_view axes) {
  PauliMasks m;
  for (std::size_t q = 0; q < axes.size(); ++q) {
    const std::uint64_t b = std::uint64_t{1} << q;
    switch (axes[q]) {
      case 'I': break;
      case 'X': m.flip |= b; break;
      case 'Z': m.phase |= b; break;
      case 'Y':
        m.flip |= b;
        m.phase |= b;
        ++m.y_count;
        break;
      default: throw DomainError("invalid Pauli axis '" + std::string(1, axes[q]) + "'");
    }
  }
  return m;
}

PauliHamiltonian::PauliHamiltonian(int qubits) : qubits_(qubits) {
  if (qubits <= 0 || qubits > 20) throw DomainError("qubit count must be in [1, 20]");
}

void PauliHamiltonian::add(double coefficient, std::string_view axes) {
  if (!std::isfinite(coefficient)) throw DomainError("Pauli coefficient must be finite");
  if (axes.size() != static_cast<std::size_t>(qubits_)) throw DomainError("axes length must equal qubit count");
  (void)PauliMasks::from_axes(axes);  // alphabet check

  auto it = std::lower_bound(terms_.begin(), terms_.end(), axes,
                             [](const PauliTerm& t, std::string_view a) { return t.axes < a; });
  if (it != terms_.end() && it->axes == axes) {
    it->coefficient += coefficient;
    if (std::abs(it->coefficient) <= kDropTolerance) terms_.erase(it);
  } else if (std::abs(coefficient) > kDropTolerance) {
    terms_.insert(it, PauliTerm{coefficient, std::string(axes)});
  }
}

PauliHamiltonian& PauliHamiltonian::operator+=(const PauliHamiltonian& other) {
  if (other.qubits_ != qubits_) throw DomainError("qubit count mismatch");
  for (const auto& t : other.terms_) add(t.coefficient, t.axes);
  return *this;
}

PauliHamiltonian PauliHamiltonian::scaled(double factor) const {
  PauliHamiltonian out(qubits_);
  for (const auto& t : terms_) out.add(factor * t.coefficient, t.axes);
  return out;
}

double PauliHamiltonian::norm_bound() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coefficient);
  return s;
}

PauliHamiltonian build_pauli_hamiltonian(const RingConfig& cfg) {
  cfg.validate();
  const int m = cfg.sites;
  const auto v = build_interaction_matrix(cfg);
  PauliHamiltonian h(m);

  // n_i n_j = (I - Z_i - Z_j + Z_i Z_j) / 4
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const double quarter = v(i, j) / 4.0;
      if (quarter == 0.0) continue;
      h.add(quarter, single_axes(m, {}));
      h.add(-quarter, single_axes(m, {{i, 'Z'}}));
      h.add(-quarter, single_axes(m, {{j, 'Z'}}));
      h.add(quarter, single_axes(m, {{i, 'Z'}, {j, 'Z'}}));
    }
  }

  // -t (s+_a s-_b + h.c.) = -(t/2)(X_a X_b + Y_a Y_b). The fermionic closing
  // edge (M-1, 0) additionally carries Z on every site in between.
  const double half_t = cfg.hopping / 2.0;
  for (auto [a, b] : ring_edges(m)) {
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    std::string xx = single_axes(m, {{lo, 'X'}, {hi, 'X'}});
    std::string yy = single_axes(m, {{lo, 'Y'}, {hi, 'Y'}});
    if (cfg.statistics == Statistics::SpinlessFermion) {
      for (int k = lo + 1; k < hi; ++k) {
        xx[static_cast<std::size_t>(k)] = 'Z';
        yy[static_cast<std::size_t>(k)] = 'Z';
      }
    }
    h.add(-half_t, xx);
    h.add(-half_t, yy);
  }
  return h;
}

PauliHamiltonian number_operator(int qubits) {
  PauliHamiltonian n(qubits);
  for (int q = 0; q < qubits; ++q) {
    n.add(0.5, single_axes(qubits, {}));
    n.add(-0.5, single_axes(qubits, {{q, 'Z'}}));
  }
  return n;
}

ThresholdReport analyze_threshold(const RingConfig& cfg) {
  cfg.validate();
  if (cfg.sites % 2 != 0) throw DomainError("antipodal site requires an even ring");
  const auto v = build_interaction_matrix(cfg);
  ThresholdReport r;
  r.v_nearest = v(0, 1);
  r.v_antipodal = v(0, cfg.sites / 2);
  r.bandwidth = 4.0 * cfg.hopping;
  r.localised = cfg.interaction >= kLocalisationThreshold;
  return r;
}

void write_pauli_hamiltonian(std::ostream& os, const PauliHamiltonian& h) {
  char buf[64];
  for (const auto& t : h.terms()) {
    std::snprintf(buf, sizeof buf, "%.12g", t.coefficient);
    os << buf << ' ' << t.axes << '\n';
  }
}

PauliHamiltonian read_pauli_hamiltonian(std::istream& is) {
  std::vector<PauliTerm> terms;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    PauliTerm t;
    if (!(ls >> t.coefficient >> t.axes)) throw DomainError("malformed Pauli term line: " + line);
    terms.push_back(std::move(t));
  }
  if (terms.empty()) throw DomainError("no Pauli terms to read");
  PauliHamiltonian h(static_cast<int>(terms.front().axes.size()));
  for (const auto& t : terms) h.add(t.coefficient, t.axes);
  return h;
}

void write_interaction_matrix(std::ostream& os, const InteractionMatrix& v) {
  char buf[64];
  const int m = v.sites();
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      std::string occ(static_cast<std::size_t>(m), '0');
      occ[static_cast<std::size_t>(i)] = '1';
      occ[static_cast<std::size_t>(j)] = '1';
      std::snprintf(buf, sizeof buf, "%.12g", v(i, j));
      os << buf << ' ' << occ << '\n';
    }
  }
}

}  // namespace wigner
