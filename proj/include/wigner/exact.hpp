#pragma once

// Exact-diagonalisation reference for the fixed-particle-number sector.

#include <utility>
#include <vector>

#include "wigner/model.hpp"

namespace wigner {

/// All M-bit masks with `electrons` set bits, in increasing order.
/// Requires 0 < electrons < sites <= 20.
std::vector<Bitmask> enumerate_basis(int sites, int electrons);

struct GroundState {
  double energy = 0.0;
  std::vector<double> amplitudes;  // unit norm, indexed like the sector basis
};

struct ClassicalMinimum {
  Bitmask bitmask = 0;
  double energy = 0.0;
};

/// Full eigendecomposition of a dense real symmetric matrix.
struct SymmetricEigen {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // column k (row-major n x n) pairs with values[k]
  int sweeps = 0;
};

struct JacobiOptions {
  double tolerance = 1e-12;  // off-diagonal Frobenius norm, relative to max(1, |A|_F)
  int max_sweeps = 100;
};

/// Cyclic Jacobi rotations. Throws ConvergenceError past `max_sweeps`.
SymmetricEigen jacobi_eigen(std::vector<double> matrix, std::size_t n, const JacobiOptions& opts = {});

GroundState ground_state(const SectorHamiltonian& h);

/// Basis state with the lowest diagonal energy; ties go to the smallest mask.
ClassicalMinimum diagonal_minimum(const SectorHamiltonian& h);

/// Exact ground energy for each U (template's `interaction` is overridden),
/// returned in input order.
std::vector<std::pair<double, double>> energy_sweep(const RingConfig& base, const std::vector<double>& interactions);

}  // namespace wigner
