#pragma once

#include <optional>
#include <vector>

#include "opkit/operator.hpp"
#include "opkit/pencil.hpp"

namespace opkit {

/// Matrix exponential (scaling and squaring with Pade approximants).
/// Throws AccuracyError if the result overflows.
Operator expm(const Operator& a);

/// u'' - 2T u' - S u = 0 on [0, 1] with u(0) = u0, u(1) = u1.
struct BvpProblem {
  Operator t;
  Operator s;
  Vector u0;
  Vector u1;
  PencilFactorization factorization;
  double commutation_residual = 0.0;  ///< ||T R - R T||, R = Upsilon^{1/2}
  double commutation_tol = 0.0;
};

/// Factorizes the pencil and measures the commutation hypothesis. A negative
/// tol selects 1e-10 * max(1, ||T|| ||R||).
BvpProblem make_bvp_problem(const Operator& t, const Operator& s, const Vector& u0,
                            const Vector& u1, double tol = -1.0);

struct BvpSolution {
  std::vector<double> grid;
  std::vector<Vector> values;
  Vector x0;
  Vector x1;
  /// max(||e^{-Z1}x0 + x1 - u0||, ||x0 + e^{Z2}x1 - u1||)
  double boundary_residual = 0.0;
  double boundary_tol = 0.0;  ///< 1e-9 (1 + ||u0|| + ||u1||)
  /// Relative gap between the closed-form x0, x1 and the block-system solve.
  double block_gap = 0.0;
  double ode_residual = 0.0;
  double derivative_gap = 0.0;
  double resonance_margin = 0.0;  ///< sigma_min(I - e^{-2R})
  std::optional<double> oracle_gap;
};

/// 65 Chebyshev-spaced points t_k = (1 - cos(pi k / 64)) / 2.
std::vector<double> chebyshev_grid(int points = 65);

/// Exponential-formula solution. Throws HypothesisError when T does not
/// commute with Upsilon^{1/2}, ResonanceError when I - e^{-2 Upsilon^{1/2}}
/// is singular (sigma_min <= resonance_tol, default 1e-12 * dim), and
/// AccuracyError when the closed form and the block solve disagree.
BvpSolution solve_bvp(const BvpProblem& p, const std::vector<double>& grid,
                      double resonance_tol = -1.0);

/// Evaluates u, u' or u'' of a computed solution at t.
Vector bvp_derivative(const BvpSolution& sol, const BvpProblem& p, double t, int order);

/// max over check points of ||u'' - 2T u' - S u|| / scale with analytic
/// derivatives.
double ode_residual(const BvpSolution& sol, const BvpProblem& p,
                    const std::vector<double>& check_points);

/// max over check points of ||(u(t+h) - u(t-h)) / 2h - u'(t)||, normalised by
/// max(1, ||Z||)^3 max(1, ||x0|| + ||x1||).
double derivative_fd_gap(const BvpSolution& sol, const BvpProblem& p,
                         const std::vector<double>& check_points, double h = 1e-4);

/// Second-order central differences on t_k = k / n, k = 0..n, solved as one
/// block-tridiagonal system. oracle_gap is the grid max distance to the
/// exponential formula. Throws ParameterError for n < 16 and ResonanceError
/// for a singular discrete system.
BvpSolution fd_oracle(const BvpProblem& p, int n);

}  // namespace opkit
