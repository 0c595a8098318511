#include "wigner/mitigation.hpp"

#include <algorithm>
#include <cmath>

#include "wigner/errors.hpp"

namespace wigner {

std::string to_string(ZneFit fit) { return fit == ZneFit::Linear ? "linear" : "richardson"; }

ZneFit parse_zne_fit(std::string_view text) {
  if (text == "linear") return ZneFit::Linear;
  if (text == "richardson") return ZneFit::Richardson;
  throw DomainError("unknown extrapolation fit '" + std::string(text) + "'");
}

void MitigationConfig::validate() const {
  if (scale_factors.empty() || scale_factors.front() != 1) throw DomainError("scale factors must start at 1");
  for (std::size_t k = 0; k < scale_factors.size(); ++k) {
    if (scale_factors[k] <= 0 || scale_factors[k] % 2 == 0) throw DomainError("scale factors must be odd and positive");
    if (k > 0 && scale_factors[k] <= scale_factors[k - 1]) throw DomainError("scale factors must be strictly increasing");
  }
  if (zne_enabled && scale_factors.size() < 2) throw DomainError("extrapolation needs at least two scale factors");
}

Circuit invert(const Circuit& c) {
  Circuit out(c.qubits);
  out.gates.reserve(c.gates.size());
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
    Gate g = *it;
    if (is_rotation(g.kind)) g.angle = -g.angle;
    out.gates.push_back(g);
  }
  return out;
}

Circuit fold_global(const Circuit& c, int lambda) {
  if (lambda < 1 || lambda % 2 == 0) throw DomainError("fold factor must be an odd positive integer");
  const Circuit inverse = invert(c);
  Circuit out(c.qubits);
  out.gates.reserve(c.gates.size() * static_cast<std::size_t>(lambda));
  out.gates.insert(out.gates.end(), c.gates.begin(), c.gates.end());
  for (int k = 0; k < (lambda - 1) / 2; ++k) {
    out.gates.insert(out.gates.end(), inverse.gates.begin(), inverse.gates.end());
    out.gates.insert(out.gates.end(), c.gates.begin(), c.gates.end());
  }
  return out;
}

namespace {

// Solves the square system in place by Gaussian elimination with partial pivoting.
std::vector<double> solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == 0.0) throw DomainError("singular extrapolation system");
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      for (std::size_t k = col; k < n; ++k) a[r * n + k] -= factor * a[col * n + k];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = b[r];
    for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
    x[r] = s / a[r * n + r];
  }
  return x;
}

}  // namespace

ZneResult zne_fit(const std::vector<std::pair<double, double>>& points, ZneFit fit) {
  if (points.size() < 2) throw DomainError("extrapolation needs at least two points");
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (points[i].first == points[j].first) throw DomainError("duplicate scale factor in extrapolation data");

  const std::size_t n = points.size();
  ZneResult out;
  if (fit == ZneFit::Linear) {
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (auto [x, y] : points) {
      mean_x += x;
      mean_y += y;
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    for (auto [x, y] : points) {
      sxy += (x - mean_x) * (y - mean_y);
      sxx += (x - mean_x) * (x - mean_x);
    }
    const double slope = sxy / sxx;
    out.value = mean_y - slope * mean_x;
    out.coefficients = {out.value, slope};
    return out;
  }

  // Lagrange form at zero for the value; Vandermonde solve for diagnostics.
  for (std::size_t k = 0; k < n; ++k) {
    double weight = 1.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != k) weight *= points[j].first / (points[j].first - points[k].first);
    out.value += weight * points[k].second;
  }
  std::vector<double> vander(n * n);
  std::vector<double> rhs(n);
  for (std::size_t r = 0; r < n; ++r) {
    double power = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
      vander[r * n + c] = power;
      power *= points[r].first;
    }
    rhs[r] = points[r].second;
  }
  out.coefficients = solve(std::move(vander), std::move(rhs));
  return out;
}

Circuit insert_dd(const Circuit& c) {
  const Schedule s = schedule(c);
  const std::size_t moments = s.moments.size();
  const auto qubits = static_cast<std::size_t>(c.qubits);

  std::vector<std::vector<bool>> occupied(qubits, std::vector<bool>(moments, false));
  for (std::size_t m = 0; m < moments; ++m) {
    for (std::size_t k : s.moments[m]) {
      const Gate& g = c.gates[k];
      occupied[static_cast<std::size_t>(g.q0)][m] = true;
      if (g.arity() == 2) occupied[static_cast<std::size_t>(g.q1)][m] = true;
    }
  }

  std::vector<std::vector<Gate>> inserted(moments);
  for (std::size_t q = 0; q < qubits; ++q) {
    const auto& occ = occupied[q];
    auto first = std::find(occ.begin(), occ.end(), true);
    if (first == occ.end()) continue;
    std::size_t m = static_cast<std::size_t>(first - occ.begin()) + 1;
    while (m < moments) {
      if (occ[m]) {
        ++m;
        continue;
      }
      std::size_t end = m;
      while (end + 1 < moments && !occ[end + 1]) ++end;
      if (end > m) {
        const int qi = static_cast<int>(q);
        inserted[m].push_back(Gate::x(qi));
        for (std::size_t k = m + 1; k < end; ++k) inserted[k].push_back(Gate::idle(qi));
        inserted[end].push_back(Gate::x(qi));
      }
      m = end + 1;
    }
  }

  if (std::all_of(inserted.begin(), inserted.end(), [](const auto& v) { return v.empty(); })) return c;

  Circuit out(c.qubits);
  out.gates.reserve(c.gates.size());
  for (std::size_t m = 0; m < moments; ++m) {
    for (std::size_t k : s.moments[m]) out.gates.push_back(c.gates[k]);
    out.gates.insert(out.gates.end(), inserted[m].begin(), inserted[m].end());
  }
  return out;
}

MitigationDiagnostics mitigated_expectation(const Circuit& c, const PauliHamiltonian& h, const NoiseModel& noise,
                                            const MitigationConfig& cfg) {
  cfg.validate();
  MitigationDiagnostics d;
  d.scale_factors = cfg.zne_enabled ? cfg.scale_factors : std::vector<int>{1};
  const DensityMatrix start(c.qubits);
  for (int lambda : d.scale_factors) {
    Circuit run = fold_global(c, lambda);
    if (cfg.dd_enabled) run = insert_dd(run);
    d.energies.push_back(expectation(apply_circuit_noisy(start, run, noise), h));
  }
  if (cfg.zne_enabled) {
    std::vector<std::pair<double, double>> points;
    for (std::size_t k = 0; k < d.energies.size(); ++k)
      points.emplace_back(static_cast<double>(d.scale_factors[k]), d.energies[k]);
    auto fit = zne_fit(points, cfg.fit);
    d.value = fit.value;
    d.coefficients = std::move(fit.coefficients);
  } else {
    d.value = d.energies.front();
  }
  return d;
}

}  // namespace wigner
