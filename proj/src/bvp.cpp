#include "opkit/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "opkit/dense.hpp"

namespace opkit {

namespace {

Matrix mexp(const Matrix& a) {
  if (a.isZero(0.0)) return Matrix::Identity(a.rows(), a.cols());
  Matrix e = a.exp();
  if (!e.allFinite())
    throw AccuracyError("expm: overflow (||A|| = " + std::to_string(dense::norm2(a)) + ")",
                        dense::norm2(a));
  return e;
}

double ode_scale(const BvpSolution& sol, const BvpProblem& p) {
  const double z1 = dense::norm2(p.factorization.z1.matrix());
  const double z2 = dense::norm2(p.factorization.z2.matrix());
  const double op = std::max({1.0, z1 * z1, z2 * z2, dense::norm2(p.s.matrix())});
  return op * std::max(1.0, sol.x0.norm() + sol.x1.norm());
}

}  // namespace

Operator expm(const Operator& a) { return Operator(mexp(a.matrix())); }

BvpProblem make_bvp_problem(const Operator& t, const Operator& s, const Vector& u0,
                            const Vector& u1, double tol) {
  require_same_dim(t, s, "bvp");
  if (u0.size() != t.dim() || u1.size() != t.dim())
    throw DimensionError("bvp: boundary vectors do not match the operator dimension");
  if (!u0.allFinite() || !u1.allFinite()) throw DimensionError("bvp: non-finite boundary data");
  BvpProblem p{t, s, u0, u1, factorize(QuadraticPencil(t, s))};
  const Matrix& r = p.factorization.sqrt_upsilon.matrix();
  p.commutation_residual = dense::norm2(t.matrix() * r - r * t.matrix());
  p.commutation_tol =
      tol < 0.0 ? 1e-10 * std::max(1.0, dense::norm2(t.matrix()) * dense::norm2(r)) : tol;
  return p;
}

std::vector<double> chebyshev_grid(int points) {
  if (points < 2) throw ParameterError("grid: at least two points are required");
  std::vector<double> g(points);
  const int m = points - 1;
  for (int k = 0; k <= m; ++k) g[k] = 0.5 * (1.0 - std::cos(std::numbers::pi * k / m));
  g.front() = 0.0;
  g.back() = 1.0;
  return g;
}

BvpSolution solve_bvp(const BvpProblem& p, const std::vector<double>& grid, double resonance_tol) {
  if (p.commutation_residual > p.commutation_tol)
    throw HypothesisError("solve-bvp: T does not commute with Upsilon^{1/2} (residual " +
                          std::to_string(p.commutation_residual) + ")");
  if (grid.empty()) throw ParameterError("solve-bvp: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0) || (i > 0 && !(grid[i] > grid[i - 1])))
      throw ParameterError("solve-bvp: grid must be strictly increasing inside [0, 1]");
  }
  const Eigen::Index n = p.t.dim();
  const Matrix id = Matrix::Identity(n, n);
  const Matrix& z1 = p.factorization.z1.matrix();
  const Matrix& z2 = p.factorization.z2.matrix();
  const Matrix& r = p.factorization.sqrt_upsilon.matrix();

  BvpSolution sol;
  const Matrix m = id - mexp(-2.0 * r);
  sol.resonance_margin = dense::sigma_min(m);
  const double rtol = resonance_tol < 0.0 ? 1e-12 * static_cast<double>(n) : resonance_tol;
  if (!(sol.resonance_margin > rtol))
    throw ResonanceError("solve-bvp: I - exp(-2 Upsilon^{1/2}) is singular (sigma_min " +
                         std::to_string(sol.resonance_margin) + ")");

  const Matrix e1 = mexp(-z1);  // e^{-Z1}
  const Matrix e2 = mexp(z2);   // e^{Z2}
  Eigen::PartialPivLU<Matrix> lu(m);
  sol.x0 = lu.solve(Vector(-e2 * p.u0 + p.u1));
  sol.x1 = lu.solve(Vector(p.u0 - e1 * p.u1));

  Matrix block(2 * n, 2 * n);
  block << e1, id, id, e2;
  Vector rhs(2 * n);
  rhs << p.u0, p.u1;
  const Vector xb = Eigen::PartialPivLU<Matrix>(block).solve(rhs);
  Vector xf(2 * n);
  xf << sol.x0, sol.x1;
  sol.block_gap = (xf - xb).norm() / std::max(1.0, xf.norm());
  if (!(sol.block_gap <= 1e-8))
    throw AccuracyError("solve-bvp: closed-form and block boundary solves disagree", sol.block_gap);

  sol.boundary_residual = std::max((e1 * sol.x0 + sol.x1 - p.u0).norm(),
                                   (sol.x0 + e2 * sol.x1 - p.u1).norm());
  sol.boundary_tol = 1e-9 * (1.0 + p.u0.norm() + p.u1.norm());

  sol.grid = grid;
  sol.values.reserve(grid.size());
  for (const double t : grid) sol.values.push_back(bvp_derivative(sol, p, t, 0));
  sol.ode_residual = ode_residual(sol, p, grid);
  sol.derivative_gap = derivative_fd_gap(sol, p, grid);
  return sol;
}

Vector bvp_derivative(const BvpSolution& sol, const BvpProblem& p, double t, int order) {
  const Matrix& z1 = p.factorization.z1.matrix();
  const Matrix& z2 = p.factorization.z2.matrix();
  Vector a = mexp(-(1.0 - t) * z1) * sol.x0;
  Vector b = mexp(t * z2) * sol.x1;
  for (int k = 0; k < order; ++k) {
    a = z1 * a;
    b = z2 * b;
  }
  return a + b;
}

double ode_residual(const BvpSolution& sol, const BvpProblem& p,
                    const std::vector<double>& check_points) {
  const double scale = ode_scale(sol, p);
  double worst = 0.0;
  for (const double t : check_points) {
    const Vector u = bvp_derivative(sol, p, t, 0);
    const Vector du = bvp_derivative(sol, p, t, 1);
    const Vector ddu = bvp_derivative(sol, p, t, 2);
    const Vector res = ddu - 2.0 * (p.t.matrix() * du) - p.s.matrix() * u;
    worst = std::max(worst, res.norm() / scale);
  }
  return worst;
}

double derivative_fd_gap(const BvpSolution& sol, const BvpProblem& p,
                         const std::vector<double>& check_points, double h) {
  const double z = std::max({1.0, dense::norm2(p.factorization.z1.matrix()),
                             dense::norm2(p.factorization.z2.matrix())});
  const double scale = z * z * z * std::max(1.0, sol.x0.norm() + sol.x1.norm());
  double worst = 0.0;
  for (const double t : check_points) {
    const Vector fd =
        (bvp_derivative(sol, p, t + h, 0) - bvp_derivative(sol, p, t - h, 0)) / (2.0 * h);
    worst = std::max(worst, (fd - bvp_derivative(sol, p, t, 1)).norm() / scale);
  }
  return worst;
}

BvpSolution fd_oracle(const BvpProblem& p, int n) {
  if (n < 16) throw ParameterError("fd oracle: at least 16 points are required");
  const Eigen::Index d = p.t.dim();
  const Matrix id = Matrix::Identity(d, d);
  const double h = 1.0 / n;
  const Matrix a = id + h * p.t.matrix();
  const Matrix b = -2.0 * id - h * h * p.s.matrix();
  const Matrix c = id - h * p.t.matrix();

  // Block Thomas sweep over the n - 1 interior unknowns.
  const int m = n - 1;
  std::vector<Eigen::PartialPivLU<Matrix>> diag(m);
  std::vector<Vector> r(m);
  for (int k = 0; k < m; ++k) {
    Vector rhs = Vector::Zero(d);
    if (k == 0) rhs -= a * p.u0;
    if (k == m - 1) rhs -= c * p.u1;
    Matrix dk = b;
    if (k > 0) {
      const Matrix l = diag[k - 1].solve(id);
      const Matrix al = a * l;
      dk -= al * c;
      rhs -= al * r[k - 1];
    }
    diag[k].compute(dk);
    if (!(diag[k].rcond() > 1e-14))
      throw ResonanceError("fd oracle: discrete boundary problem is singular");
    r[k] = rhs;
  }
  std::vector<Vector> u(m);
  u[m - 1] = diag[m - 1].solve(r[m - 1]);
  for (int k = m - 2; k >= 0; --k) u[k] = diag[k].solve(Vector(r[k] - c * u[k + 1]));

  const BvpSolution exact = solve_bvp(p, {0.0, 1.0});
  BvpSolution sol;
  sol.x0 = exact.x0;
  sol.x1 = exact.x1;
  sol.grid.resize(n + 1);
  sol.values.resize(n + 1);
  double gap = 0.0;
  // Exact values by repeated multiplication with the one-step propagators.
  const Matrix step1 = mexp(h * p.factorization.z1.matrix());
  const Matrix step2 = mexp(h * p.factorization.z2.matrix());
  Vector a_part = mexp(-p.factorization.z1.matrix()) * exact.x0;
  Vector b_part = exact.x1;
  for (int k = 0; k <= n; ++k) {
    sol.grid[k] = static_cast<double>(k) * h;
    sol.values[k] = k == 0 ? p.u0 : (k == n ? p.u1 : u[k - 1]);
    if (k > 0) {
      a_part = step1 * a_part;
      b_part = step2 * b_part;
    }
    gap = std::max(gap, (sol.values[k] - (a_part + b_part)).norm());
  }
  sol.oracle_gap = gap;
  sol.boundary_residual = exact.boundary_residual;
  sol.boundary_tol = exact.boundary_tol;
  sol.resonance_margin = exact.resonance_margin;
  return sol;
}

}  // namespace opkit
