#include "wigner/vqe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>

#include "wigner/errors.hpp"

namespace wigner {

std::string to_string(AnsatzKind kind) {
  return kind == AnsatzKind::HardwareEfficient ? "hardware-efficient" : "number-preserving";
}

AnsatzKind parse_ansatz_kind(std::string_view text) {
  if (text == "hardware-efficient") return AnsatzKind::HardwareEfficient;
  if (text == "number-preserving") return AnsatzKind::NumberPreserving;
  throw DomainError("unknown ansatz kind '" + std::string(text) + "'");
}

std::size_t AnsatzSpec::parameter_count() const {
  const auto q = static_cast<std::size_t>(qubits);
  const auto l = static_cast<std::size_t>(layers);
  return kind == AnsatzKind::HardwareEfficient ? q * (l + 1) : l * (1 + q / 2);
}

void AnsatzSpec::validate() const {
  if (qubits < 3 || qubits > 20) throw DomainError("ansatz qubit count must be in [3, 20]");
  if (layers < 1) throw DomainError("ansatz needs at least one layer");
  if (kind == AnsatzKind::HardwareEfficient && initial_state != 0)
    throw DomainError("hardware-efficient ansatz starts from |0...0>");
  if (initial_state >= (Bitmask{1} << qubits)) throw DomainError("initial state out of range");
}

namespace {

Bitmask rotate(Bitmask mask, int shift, int m) {
  const Bitmask full = (Bitmask{1} << m) - 1;
  return ((mask << shift) | (mask >> (m - shift))) & full;
}

}  // namespace

int crystal_period(Bitmask mask, int m) {
  const int ne = std::popcount(mask);
  if (ne == 0 || m % ne != 0) return 0;
  const int p = m / ne;
  return rotate(mask, p, m) == mask ? p : 0;
}

void prepare_initial_state(Circuit& c, Bitmask mask) {
  const int m = c.qubits;
  const int p = crystal_period(mask, m);
  if (p == 0) {
    for (int q = 0; q < m; ++q)
      if (mask & (Bitmask{1} << q)) c.add(Gate::x(q));
    return;
  }
  // W state over qubits 0..p-1, phases set so every shift enters with +1,
  // then copy qubit s to s + p, s + 2p, ...
  const int ne = m / p;
  c.add(Gate::x(0));
  for (int k = 0; k + 1 < p; ++k) c.add(Gate::xx_plus_yy(2.0 * std::acos(1.0 / std::sqrt(p - k)), k, k + 1));
  for (int k = 1; k < p; ++k) c.add(Gate::rz(k * std::numbers::pi / 2.0, k));
  for (int k = 0; k < p; ++k)
    for (int j = 1; j < ne; ++j) c.add(Gate::cnot(k, k + j * p));
}

Circuit build_ansatz(const AnsatzSpec& spec, std::span<const double> params) {
  spec.validate();
  if (params.size() != spec.parameter_count()) throw DomainError("parameter vector length does not match the ansatz");
  const int m = spec.qubits;
  Circuit c(m);
  auto theta = [&](int layer, int slot) { return params[static_cast<std::size_t>(layer * m + slot)]; };

  if (spec.kind == AnsatzKind::HardwareEfficient) {
    for (int l = 0; l < spec.layers; ++l) {
      for (int q = 0; q < m; ++q) c.add(Gate::ry(theta(l, q), q));
      for (int q = 0; q < m; ++q) c.add(Gate::cz(q, (q + 1) % m));
    }
    for (int q = 0; q < m; ++q) c.add(Gate::ry(theta(spec.layers, q), q));
    return c;
  }

  prepare_initial_state(c, spec.initial_state);
  const int per_layer = 1 + m / 2;
  const int classes = m / 2 - 1;
  for (int l = 0; l < spec.layers; ++l) {
    const auto base = static_cast<std::size_t>(l * per_layer);
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const int d = std::min(j - i, m - (j - i));
        if (d > classes) continue;
        c.add(Gate::rzz(params[base + 1 + static_cast<std::size_t>(d)], i, j));
      }
    }
    for (int parity : {0, 1})
      for (int e = parity; e < m; e += 2) c.add(Gate::xx_plus_yy(params[base + static_cast<std::size_t>(parity)], e, (e + 1) % m));
  }
  return c;
}

PauliHamiltonian vqe_observable(const RingConfig& cfg, const AnsatzSpec& spec) {
  PauliHamiltonian h = build_pauli_hamiltonian(cfg);
  if (spec.kind == AnsatzKind::NumberPreserving) return h;

  // (N - Ne)^2 = c^2 + M/4 - c sum Z_i + 1/2 sum_{i<j} Z_i Z_j,  c = M/2 - Ne
  const int m = cfg.sites;
  const double c = m / 2.0 - cfg.electrons;
  const double mu = 2.0 * h.norm_bound();
  PauliHamiltonian penalty(m);
  const std::string identity(static_cast<std::size_t>(m), 'I');
  penalty.add(c * c + m / 4.0, identity);
  for (int i = 0; i < m; ++i) {
    std::string z = identity;
    z[static_cast<std::size_t>(i)] = 'Z';
    penalty.add(-c, z);
    for (int j = i + 1; j < m; ++j) {
      std::string zz = z;
      zz[static_cast<std::size_t>(j)] = 'Z';
      penalty.add(0.5, zz);
    }
  }
  h += penalty.scaled(mu);
  return h;
}

namespace {

std::vector<double> initial_parameters(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> x(count);
  for (double& v : x) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = -0.1 + 0.2 * u;
  }
  return x;
}

}  // namespace

VqeResult run_vqe(const RingConfig& cfg, const AnsatzSpec& spec, const OptimizerConfig& opt,
                  const std::optional<NoiseModel>& noise, const std::optional<MitigationConfig>& mitigation) {
  cfg.validate();
  spec.validate();
  if (spec.qubits != cfg.sites) throw DomainError("ansatz qubit count must equal the number of sites");
  if (spec.kind == AnsatzKind::NumberPreserving && std::popcount(spec.initial_state) != cfg.electrons)
    throw DomainError("initial state must hold exactly Ne particles");
  if (noise) noise->validate();
  if (mitigation) mitigation->validate();
  const bool mitigate = noise && mitigation && mitigation->any();

  const PauliHamiltonian observable = vqe_observable(cfg, spec);
  auto energy_of = [&](std::span<const double> theta) {
    const Circuit c = build_ansatz(spec, theta);
    if (!noise) return expectation(apply_circuit(StateVector(c.qubits), c), observable);
    if (mitigate) return mitigated_expectation(c, observable, *noise, *mitigation).value;
    return expectation(apply_circuit_noisy(DensityMatrix(c.qubits), c, *noise), observable);
  };

  const auto opt_result = cobyla_minimize(energy_of, initial_parameters(spec.parameter_count(), opt.seed), opt);

  VqeResult r;
  r.parameters = opt_result.x;
  r.energy = opt_result.f;
  r.converged = opt_result.converged;
  r.evaluations = opt_result.evaluations;
  r.history.reserve(opt_result.history.size());
  for (std::size_t k = 0; k < opt_result.history.size(); ++k)
    r.history.emplace_back(static_cast<int>(k), opt_result.history[k]);
  if (mitigate) r.mitigation = mitigated_expectation(build_ansatz(spec, r.parameters), observable, *noise, *mitigation);
  return r;
}

double relative_error(double measured, double reference) {
  if (reference == 0.0) throw DomainError("relative error undefined for a zero reference");
  return 100.0 * std::abs(measured - reference) / std::abs(reference);
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += fmt17(xs[i]);
  }
  return out;
}

}  // namespace

void write_vqe_result(std::ostream& os, const VqeResult& r) {
  os << "energy = " << fmt17(r.energy) << '\n';
  os << "converged = " << (r.converged ? "true" : "false") << '\n';
  os << "evaluations = " << r.evaluations << '\n';
  os << "parameters = " << join(r.parameters) << '\n';
  if (r.mitigation) {
    std::vector<double> scales(r.mitigation->scale_factors.begin(), r.mitigation->scale_factors.end());
    os << "mitigated_energy = " << fmt17(r.mitigation->value) << '\n';
    os << "scale_factors = " << join(scales) << '\n';
    os << "scaled_energies = " << join(r.mitigation->energies) << '\n';
    os << "fit_coefficients = " << join(r.mitigation->coefficients) << '\n';
  }
}

void write_vqe_history(std::ostream& os, const VqeResult& r) {
  for (auto [k, e] : r.history) os << k << '\t' << fmt17(e) << '\n';
}

}  // namespace wigner
