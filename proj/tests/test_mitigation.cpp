#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "oracle.hpp"
#include "wigner/errors.hpp"
#include "wigner/exact.hpp"
#include "wigner/mitigation.hpp"
#include "wigner/vqe.hpp"

using namespace wigner;

namespace {

int count_kind(const Circuit& c, GateKind k, int qubit = -1) {
  return static_cast<int>(std::count_if(c.gates.begin(), c.gates.end(), [&](const Gate& g) {
    return g.kind == k && (qubit < 0 || g.q0 == qubit);
  }));
}

double pure_energy(const Circuit& c, const PauliHamiltonian& h) {
  return expectation(apply_circuit(StateVector(c.qubits), c), h);
}

double noisy_energy(const Circuit& c, const PauliHamiltonian& h, const NoiseModel& n) {
  return expectation(apply_circuit_noisy(DensityMatrix(c.qubits), c, n), h);
}

struct Optimum {
  RingConfig ring;
  AnsatzSpec spec;
  Circuit circuit;
  double exact = 0.0;
};

// Noiseless VQE optimum at U = 45, shared by the transparency checks.
const Optimum& optimum() {
  static const Optimum o = [] {
    Optimum r;
    r.ring.interaction = 45.0;
    r.spec.kind = AnsatzKind::NumberPreserving;
    r.spec.initial_state = 0b001001;
    const auto v = run_vqe(r.ring, r.spec, {}, std::nullopt, std::nullopt);
    r.circuit = build_ansatz(r.spec, v.parameters);
    r.exact = ground_state(build_sector_hamiltonian(r.ring)).energy;
    return r;
  }();
  return o;
}

// q0 sits in |+> through a four-moment idle window while q1 is busy.
Circuit idle_window_circuit() {
  Circuit c(2);
  c.add(Gate::h(0));
  for (int k = 0; k < 5; ++k) c.add(Gate::x(1));
  c.add(Gate::cz(0, 1)).add(Gate::h(0));
  return c;
}

}  // namespace

TEST_CASE("invert") {
  Circuit a(1);
  a.add(Gate::ry(0.3, 0));
  Circuit ea(1);
  ea.add(Gate::ry(-0.3, 0));
  CHECK(invert(a) == ea);

  Circuit b(2);
  b.add(Gate::x(0)).add(Gate::cz(0, 1));
  Circuit eb(2);
  eb.add(Gate::cz(0, 1)).add(Gate::x(0));
  CHECK(invert(b) == eb);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Circuit c = oracle::random_circuit(5, 50, rng);
    Circuit both = c;
    const Circuit inv = invert(c);
    both.gates.insert(both.gates.end(), inv.gates.begin(), inv.gates.end());
    const auto out = apply_circuit(StateVector(5, 0b10110), both);
    CHECK(std::abs(out.amplitudes()[0b10110] - Complex(1.0, 0.0)) <= 1e-10);
    // dense oracle: U^-1 U = I
    CHECK((oracle::circuit_unitary(inv) * oracle::circuit_unitary(c) - oracle::Mat::Identity(32, 32)).cwiseAbs().maxCoeff() <=
          1e-10);
  }
}

TEST_CASE("global folding") {
  std::mt19937_64 rng(2);
  const Circuit c = oracle::random_circuit(4, 10, rng);
  CHECK(fold_global(c, 1) == c);
  CHECK(fold_global(c, 3).gates.size() == 30);
  CHECK(fold_global(c, 5).gates.size() == 50);
  CHECK_THROWS_AS(fold_global(c, 2), DomainError);
  CHECK_THROWS_AS(fold_global(c, 0), DomainError);

  PauliHamiltonian h(4);
  h.add(0.7, "XZII");
  h.add(-0.2, "IYYZ");
  h.add(1.1, "ZIIZ");
  for (int lambda : {3, 5, 7}) CHECK(pure_energy(fold_global(c, lambda), h) == doctest::Approx(pure_energy(c, h)).epsilon(1e-10));
}

TEST_CASE("extrapolation fits") {
  CHECK(zne_extrapolate({{1, -10}, {3, -8}}, ZneFit::Linear) == doctest::Approx(-11.0).epsilon(1e-14));

  const double a = -4.25, b = 0.8, c = 0.15;
  std::vector<std::pair<double, double>> line, quad;
  for (double l : {1.0, 3.0, 5.0}) {
    line.emplace_back(l, a + b * l);
    quad.emplace_back(l, a + b * l + c * l * l);
  }
  CHECK(std::abs(zne_extrapolate(line, ZneFit::Linear) - a) <= 1e-9);
  CHECK(std::abs(zne_extrapolate(line, ZneFit::Richardson) - a) <= 1e-9);
  CHECK(std::abs(zne_extrapolate(quad, ZneFit::Richardson) - a) <= 1e-9);
  CHECK(std::abs(zne_extrapolate(quad, ZneFit::Linear) - a) > 0.1);

  const auto fit = zne_fit(quad, ZneFit::Richardson);
  REQUIRE(fit.coefficients.size() == 3);
  CHECK(fit.coefficients[1] == doctest::Approx(b).epsilon(1e-9));
  CHECK(fit.coefficients[2] == doctest::Approx(c).epsilon(1e-9));

  CHECK_THROWS_AS(zne_fit({{1, 2}}, ZneFit::Linear), DomainError);
  CHECK_THROWS_AS(zne_fit({{1, 2}, {1, 3}}, ZneFit::Richardson), DomainError);
}

TEST_CASE("Richardson recovers any polynomial of degree below the point count") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int n = 2; n <= 5; ++n) {
    std::vector<double> coef(static_cast<std::size_t>(n));
    for (double& v : coef) v = u(rng);
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k < n; ++k) {
      const double l = 2.0 * k + 1.0;
      double y = 0.0;
      for (int d = n - 1; d >= 0; --d) y = y * l + coef[static_cast<std::size_t>(d)];
      pts.emplace_back(l, y);
    }
    CHECK(std::abs(zne_extrapolate(pts, ZneFit::Richardson) - coef[0]) <= 1e-9);
  }
}

TEST_CASE("linear fit is ordinary least squares") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::vector<std::pair<double, double>> pts;
  Eigen::MatrixXd A(5, 2);
  Eigen::VectorXd y(5);
  for (int k = 0; k < 5; ++k) {
    const double l = 2.0 * k + 1.0;
    pts.emplace_back(l, 3.0 - 0.5 * l + 0.1 * g(rng));
    A(k, 0) = 1.0;
    A(k, 1) = l;
    y(k) = pts.back().second;
  }
  const Eigen::VectorXd ref = A.colPivHouseholderQr().solve(y);
  const auto fit = zne_fit(pts, ZneFit::Linear);
  CHECK(fit.value == doctest::Approx(ref(0)).epsilon(1e-12));
  CHECK(fit.coefficients[1] == doctest::Approx(ref(1)).epsilon(1e-12));
}

TEST_CASE("dynamical decoupling insertion") {
  Circuit dense(2);
  dense.add(Gate::h(0)).add(Gate::h(1)).add(Gate::cz(0, 1)).add(Gate::x(0)).add(Gate::x(1));
  CHECK(insert_dd(dense) == dense);

  // q0 waits exactly two moments for the CZ
  Circuit two(2);
  two.add(Gate::h(0)).add(Gate::x(1)).add(Gate::x(1)).add(Gate::x(1)).add(Gate::cz(0, 1));
  const Circuit dd = insert_dd(two);
  CHECK(count_kind(dd, GateKind::X, 0) == 2);
  CHECK(count_kind(dd, GateKind::X, 1) == 3);
  CHECK(dd.gates.size() == two.gates.size() + 2);
  CHECK(schedule(dd).moments.size() == schedule(two).moments.size());
  CHECK(insert_dd(dd) == dd);

  // a single idle moment gets nothing
  Circuit one(2);
  one.add(Gate::h(0)).add(Gate::x(1)).add(Gate::x(1)).add(Gate::cz(0, 1));
  CHECK(insert_dd(one) == one);
}

TEST_CASE("dynamical decoupling lowers the error under idle dephasing") {
  const Circuit bare = idle_window_circuit();
  const Circuit dd = insert_dd(bare);
  CHECK(count_kind(dd, GateKind::X, 0) >= 2);
  PauliHamiltonian h(2);
  h.add(1.0, "ZI");
  const double ideal = pure_energy(bare, h);
  CHECK(ideal == doctest::Approx(-1.0));
  CHECK(pure_energy(dd, h) == doctest::Approx(ideal).epsilon(1e-12));
  const NoiseModel idle_only{0.0, 0.0, 2e-3};
  const double err_bare = std::abs(noisy_energy(bare, h, idle_only) - ideal);
  const double err_dd = std::abs(noisy_energy(dd, h, idle_only) - ideal);
  CHECK(err_bare > 0.0);
  CHECK(err_dd < err_bare);
}

TEST_CASE("mitigation transforms are transparent without noise") {
  const auto& o = optimum();
  const auto h = build_pauli_hamiltonian(o.ring);
  const double e = pure_energy(o.circuit, h);
  CHECK(std::abs(e - o.exact) <= 1e-4);
  for (int lambda : {1, 3, 5}) {
    const Circuit folded = fold_global(o.circuit, lambda);
    CHECK(std::abs(pure_energy(folded, h) - e) <= 1e-10);
    CHECK(std::abs(pure_energy(insert_dd(folded), h) - e) <= 1e-10);
    CHECK(std::abs(noisy_energy(insert_dd(folded), h, NoiseModel::noiseless()) - e) <= 1e-10);
  }
  CHECK(std::abs(pure_energy(insert_dd(o.circuit), h) - e) <= 1e-10);

  const auto d = mitigated_expectation(o.circuit, h, NoiseModel::noiseless(), MitigationConfig{});
  CHECK(std::abs(d.value - e) <= 1e-9);
}

TEST_CASE("folding raises the error under default noise") {
  const auto& o = optimum();
  const auto h = build_pauli_hamiltonian(o.ring);
  const double e = pure_energy(o.circuit, h);
  double previous = -1.0;
  for (int lambda : {1, 3, 5}) {
    const double err = std::abs(noisy_energy(fold_global(o.circuit, lambda), h, NoiseModel{}) - e);
    CHECK(err >= previous);
    previous = err;
  }
}

TEST_CASE("mitigated expectation diagnostics") {
  const auto& o = optimum();
  const auto h = build_pauli_hamiltonian(o.ring);
  MitigationConfig cfg;
  const auto d = mitigated_expectation(o.circuit, h, NoiseModel{}, cfg);
  CHECK(d.scale_factors == std::vector<int>{1, 3, 5});
  REQUIRE(d.energies.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    Circuit run = insert_dd(fold_global(o.circuit, d.scale_factors[k]));
    CHECK(d.energies[k] == doctest::Approx(noisy_energy(run, h, NoiseModel{})).epsilon(1e-12));
  }
  std::vector<std::pair<double, double>> pts{{1, d.energies[0]}, {3, d.energies[1]}, {5, d.energies[2]}};
  CHECK(d.value == doctest::Approx(zne_extrapolate(pts, ZneFit::Linear)).epsilon(1e-12));
  CHECK(std::abs(d.value - o.exact) < std::abs(d.energies[0] - o.exact));

  MitigationConfig dd_only;
  dd_only.zne_enabled = false;
  const auto e = mitigated_expectation(o.circuit, h, NoiseModel{}, dd_only);
  CHECK(e.scale_factors == std::vector<int>{1});
  CHECK(e.value == e.energies.front());

  MitigationConfig bad;
  bad.scale_factors = {1, 2};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.scale_factors = {3, 5};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  CHECK(parse_zne_fit(to_string(ZneFit::Richardson)) == ZneFit::Richardson);
}
