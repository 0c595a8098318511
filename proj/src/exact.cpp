#include "wigner/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "wigner/errors.hpp"

namespace wigner {

std::vector<Bitmask> enumerate_basis(int sites, int electrons) {
  if (sites > 20) throw DomainError("basis enumeration limited to 20 sites");
  if (electrons <= 0 || electrons >= sites) throw DomainError("basis needs 0 < electrons < sites");
  std::vector<Bitmask> basis;
  const Bitmask end = Bitmask{1} << sites;
  // Gosper's hack walks same-popcount masks in increasing order.
  Bitmask state = (Bitmask{1} << electrons) - 1;
  while (state < end) {
    basis.push_back(state);
    const Bitmask lowest = state & (~state + 1);
    const Bitmask ripple = state + lowest;
    state = (((ripple ^ state) >> 2) / lowest) | ripple;
  }
  return basis;
}

SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n, const JacobiOptions& opts) {
  if (a.size() != n * n) throw DomainError("matrix size does not match dimension");
  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };

  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double frob = 0.0;
  for (double x : a) frob += x * x;
  const double threshold = opts.tolerance * std::max(1.0, std::sqrt(frob));

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        if (r != c) s += at(r, c) * at(r, c);
    return std::sqrt(s);
  };

  int sweep = 0;
  for (; off_norm() > threshold; ++sweep) {
    if (sweep >= opts.max_sweeps)
      throw ConvergenceError("Jacobi eigensolver did not converge", sweep, off_norm());
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double app = at(p, p);
        const double aqq = at(q, q);
        // Rutishauser's rotation: t = tan(phi) is the smaller root of
        // t^2 + 2 theta t - 1 = 0, theta = (aqq - app) / (2 apq).
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = 0.0;
        at(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return at(x, x) < at(y, y); });

  SymmetricEigen out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = at(src, src);
    for (std::size_t r = 0; r < n; ++r) out.vectors[r * n + k] = v[r * n + src];
  }
  return out;
}

GroundState ground_state(const SectorHamiltonian& h) {
  const std::size_t n = h.dimension();
  if (n == 0 || h.matrix.size() != n * n) throw DomainError("malformed sector Hamiltonian");
  const auto eig = jacobi_eigen(h.matrix, n);

  GroundState gs;
  gs.energy = eig.values.front();
  gs.amplitudes.resize(n);
  double norm = 0.0;
  std::size_t largest = 0;
  for (std::size_t r = 0; r < n; ++r) {
    gs.amplitudes[r] = eig.vectors[r * n];
    norm += gs.amplitudes[r] * gs.amplitudes[r];
    if (std::abs(gs.amplitudes[r]) > std::abs(gs.amplitudes[largest])) largest = r;
  }
  // Fix the overall sign so the largest component is positive.
  const double scale = (gs.amplitudes[largest] < 0.0 ? -1.0 : 1.0) / std::sqrt(norm);
  for (double& x : gs.amplitudes) x *= scale;
  return gs;
}

ClassicalMinimum diagonal_minimum(const SectorHamiltonian& h) {
  if (h.dimension() == 0) throw DomainError("empty sector Hamiltonian");
  ClassicalMinimum best{h.basis.front(), h(0, 0)};
  for (std::size_t r = 1; r < h.dimension(); ++r) {
    if (h(r, r) < best.energy) best = {h.basis[r], h(r, r)};
  }
  return best;
}

std::vector<std::pair<double, double>> energy_sweep(const RingConfig& base, const std::vector<double>& interactions) {
  if (interactions.empty()) throw DomainError("energy sweep needs at least one U value");
  std::vector<std::pair<double, double>> out;
  out.reserve(interactions.size());
  for (double u : interactions) {
    if (!(u >= 0.0)) throw DomainError("interaction values must be non-negative");
    RingConfig cfg = base;
    cfg.interaction = u;
    out.emplace_back(u, ground_state(build_sector_hamiltonian(cfg)).energy);
  }
  return out;
}

}  // namespace wigner
