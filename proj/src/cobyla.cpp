#include "wigner/cobyla.hpp"

#include <cmath>
#include <limits>

#include "wigner/errors.hpp"

namespace wigner {

void OptimizerConfig::validate(std::size_t dimension) const {
  if (!(rho_end > 0.0) || !(rho_end < rho_begin) || !std::isfinite(rho_begin))
    throw DomainError("trust radii must satisfy 0 < rho_end < rho_begin");
  if (max_evaluations < 0 || static_cast<std::size_t>(max_evaluations) < dimension + 2)
    throw DomainError("max_evaluations must be at least dimension + 2");
}

namespace {

// Simplex acceptability and step control, as in Powell's code.
constexpr double kAlpha = 0.25;  // min distance of a vertex from its opposite face, in rho
constexpr double kBeta = 2.1;    // max distance of a vertex from the optimal one, in rho
constexpr double kGamma = 0.5;   // geometry-step length, in rho
constexpr double kDelta = 1.1;   // edge length above which a far vertex is preferred for dropping

using Vec = std::vector<double>;

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// Interpolation simplex: vertex j sits at best + dir[j]; inv[j] are the rows
// of the inverse of the matrix whose columns are dir.
class Simplex {
 public:
  Simplex(Vec x0, double f0, double rho) : best_(std::move(x0)), f_best_(f0) {
    const std::size_t n = best_.size();
    dir_.assign(n, Vec(n, 0.0));
    inv_.assign(n, Vec(n, 0.0));
    fval_.assign(n, f0);
    for (std::size_t j = 0; j < n; ++j) {
      dir_[j][j] = rho;
      inv_[j][j] = 1.0 / rho;
    }
  }

  std::size_t size() const { return best_.size(); }
  const Vec& best() const { return best_; }
  double f_best() const { return f_best_; }
  const Vec& direction(std::size_t j) const { return dir_[j]; }
  const Vec& inverse_row(std::size_t j) const { return inv_[j]; }
  double value(std::size_t j) const { return fval_[j]; }

  Vec point(const Vec& step) const {
    Vec x = best_;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += step[i];
    return x;
  }

  void set_value(std::size_t j, double f) { fval_[j] = f; }

  /// Gradient of the linear interpolant.
  Vec gradient() const {
    const std::size_t n = size();
    Vec g(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double df = fval_[j] - f_best_;
      for (std::size_t i = 0; i < n; ++i) g[i] += inv_[j][i] * df;
    }
    return g;
  }

  bool flat() const {
    for (double f : fval_)
      if (f != f_best_) return false;
    return true;
  }

  /// Moves the optimal vertex to the lowest-valued vertex, if one is lower.
  void promote_lowest() {
    std::size_t j = 0;
    for (std::size_t k = 1; k < size(); ++k)
      if (fval_[k] < fval_[j]) j = k;
    if (!(fval_[j] < f_best_)) return;
    const std::size_t n = size();
    const Vec shift = dir_[j];
    for (std::size_t i = 0; i < n; ++i) best_[i] += shift[i];
    std::swap(fval_[j], f_best_);
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      for (std::size_t i = 0; i < n; ++i) dir_[k][i] -= shift[i];
    }
    for (std::size_t i = 0; i < n; ++i) dir_[j][i] = -shift[i];
    Vec row(n, 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i) row[i] -= inv_[k][i];
    inv_[j] = std::move(row);
  }

  /// Replaces vertex j by best + step, with value f (rank-one inverse update).
  void replace(std::size_t j, const Vec& step, double f) {
    const std::size_t n = size();
    dir_[j] = step;
    fval_[j] = f;
    const double denom = dot(inv_[j], step);
    for (double& v : inv_[j]) v /= denom;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      const double c = dot(inv_[k], step);
      for (std::size_t i = 0; i < n; ++i) inv_[k][i] -= c * inv_[j][i];
    }
    if (inverse_error() > 1e-10) reinvert();
  }

 private:
  double inverse_error() const {
    const std::size_t n = size();
    double worst = 0.0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) worst = std::max(worst, std::abs(dot(inv_[r], dir_[c]) - (r == c ? 1.0 : 0.0)));
    return worst;
  }

  void reinvert() {
    const std::size_t n = size();
    // Gauss-Jordan on [D^T | I].
    std::vector<Vec> a(n, Vec(2 * n, 0.0));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) a[r][c] = dir_[c][r];
      a[r][n + r] = 1.0;
    }
    for (std::size_t col = 0; col < n; ++col) {
      std::size_t pivot = col;
      for (std::size_t r = col + 1; r < n; ++r)
        if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
      std::swap(a[col], a[pivot]);
      const double p = a[col][col];
      if (p == 0.0) return;
      for (double& v : a[col]) v /= p;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == col || a[r][col] == 0.0) continue;
        const double factor = a[r][col];
        for (std::size_t k = 0; k < 2 * n; ++k) a[r][k] -= factor * a[col][k];
      }
    }
    // a[:, n:] = (D^T)^-1 = (D^-1)^T, so row j of D^-1 is column j of that block.
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) inv_[j][i] = a[i][n + j];
  }

  Vec best_;
  double f_best_;
  std::vector<Vec> dir_;
  std::vector<Vec> inv_;
  Vec fval_;
};

struct Geometry {
  Vec vsig;  // distance of vertex j from the opposite face
  Vec veta;  // distance of vertex j from the optimal vertex
  bool acceptable = true;
};

Geometry measure(const Simplex& s, double rho) {
  Geometry g;
  const std::size_t n = s.size();
  g.vsig.resize(n);
  g.veta.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    g.vsig[j] = 1.0 / norm(s.inverse_row(j));
    g.veta[j] = norm(s.direction(j));
    if (g.vsig[j] < kAlpha * rho || g.veta[j] > kBeta * rho) g.acceptable = false;
  }
  return g;
}

// Vertex to give up for a new point at best + step; -1 keeps the simplex.
int choose_drop(const Simplex& s, const Geometry& geo, const Vec& step, double reduction, double rho) {
  const std::size_t n = s.size();
  double ratio = reduction <= 0.0 ? 1.0 : 0.0;
  int drop = -1;
  Vec sigbar(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double weight = std::abs(dot(s.inverse_row(j), step));
    if (weight > ratio) {
      drop = static_cast<int>(j);
      ratio = weight;
    }
    sigbar[j] = weight * geo.vsig[j];
  }
  double longest = kDelta * rho;
  int far = -1;
  for (std::size_t j = 0; j < n; ++j) {
    if (sigbar[j] >= kAlpha * rho || sigbar[j] >= geo.vsig[j]) {
      double edge = geo.veta[j];
      if (reduction > 0.0) {
        Vec diff = step;
        for (std::size_t i = 0; i < n; ++i) diff[i] -= s.direction(j)[i];
        edge = norm(diff);
      }
      if (edge > longest) {
        far = static_cast<int>(j);
        longest = edge;
      }
    }
  }
  return far >= 0 ? far : drop;
}

}  // namespace

CobylaResult cobyla_minimize(const Objective& objective, std::vector<double> x0, const OptimizerConfig& cfg) {
  const std::size_t n = x0.size();
  if (n == 0) throw DomainError("cannot optimise over zero parameters");
  cfg.validate(n);
  for (double v : x0)
    if (!std::isfinite(v)) throw DomainError("starting point must be finite");

  CobylaResult res;
  Vec best_x = x0;
  double best_f = std::numeric_limits<double>::infinity();
  auto evaluate = [&](const Vec& x) {
    const double f = objective(x);
    ++res.evaluations;
    res.history.push_back(f);
    if (!std::isfinite(f)) throw OptimizerError("objective returned a non-finite value", x);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
    return f;
  };
  auto budget_left = [&] { return res.evaluations < cfg.max_evaluations; };

  double rho = cfg.rho_begin;
  Simplex simplex(x0, evaluate(x0), rho);
  for (std::size_t j = 0; j < n; ++j) simplex.set_value(j, evaluate(simplex.point(simplex.direction(j))));

  bool converged = false;
  while (true) {
    simplex.promote_lowest();
    Geometry geo = measure(simplex, rho);
    const Vec g = simplex.gradient();
    const double gnorm = norm(g);

    bool progress = false;
    if (gnorm > 0.0) {
      if (!budget_left()) break;
      Vec step(n);
      for (std::size_t i = 0; i < n; ++i) step[i] = -rho * g[i] / gnorm;
      const double predicted = rho * gnorm;
      const double f = evaluate(simplex.point(step));
      const double reduction = simplex.f_best() - f;
      const int drop = choose_drop(simplex, geo, step, reduction, rho);
      if (drop >= 0) simplex.replace(static_cast<std::size_t>(drop), step, f);
      progress = reduction > 0.0 && reduction >= 0.1 * predicted;
    } else if (simplex.flat()) {
      // Exactly level model: probe once on the far side of the centroid.
      if (!budget_left()) break;
      Vec step(n, 0.0);
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) step[i] -= simplex.direction(j)[i];
      const double len = norm(step);
      for (double& v : step) v *= rho / len;
      const double f = evaluate(simplex.point(step));
      if (f == simplex.f_best()) {
        converged = true;
        break;
      }
      const double reduction = simplex.f_best() - f;
      const int drop = choose_drop(simplex, geo, step, reduction, rho);
      if (drop >= 0) simplex.replace(static_cast<std::size_t>(drop), step, f);
      continue;
    }
    if (progress) continue;

    simplex.promote_lowest();
    geo = measure(simplex, rho);
    if (!geo.acceptable) {
      if (!budget_left()) break;
      std::size_t j = 0;
      double worst = kBeta * rho;
      bool too_far = false;
      for (std::size_t k = 0; k < n; ++k) {
        if (geo.veta[k] > worst) {
          worst = geo.veta[k];
          j = k;
          too_far = true;
        }
      }
      if (!too_far) {
        for (std::size_t k = 1; k < n; ++k)
          if (geo.vsig[k] < geo.vsig[j]) j = k;
      }
      // Move vertex j perpendicular to its opposite face, downhill on the model.
      Vec step = simplex.inverse_row(j);
      const double scale = kGamma * rho * geo.vsig[j];
      for (double& v : step) v *= scale;
      const Vec gm = simplex.gradient();
      if (dot(gm, step) > 0.0)
        for (double& v : step) v = -v;
      simplex.replace(j, step, evaluate(simplex.point(step)));
      continue;
    }

    if (rho <= cfg.rho_end) {
      converged = true;
      break;
    }
    rho *= 0.5;
    if (rho <= 1.5 * cfg.rho_end) rho = cfg.rho_end;
  }

  res.x = std::move(best_x);
  res.f = best_f;
  res.converged = converged;
  return res;
}

}  // namespace wigner
