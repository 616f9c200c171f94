#pragma once

#include <string>
#include <utility>
#include <vector>

#include "opkit/bvp.hpp"
#include "opkit/operator.hpp"
#include "opkit/pinv.hpp"

namespace opkit {

/// Truncated eigenfunction model of u_tt - 2(eta D - i eta1 D^2) u_t - xi u = 0
/// on (0, 1) with the Dirichlet Laplacian D, lambda_j = (j pi)^2.
struct LaplacianModel {
  double eta = 1.0;
  double eta1 = 0.0;
  Complex xi = 0.1;
  int n_modes = 16;

  std::vector<double> eigenvalues() const;
  /// t_j = (eta + i eta1 lambda_j) lambda_j, oriented so that Re t_j >= 0.
  std::vector<Complex> t_diagonal() const;
};

/// Names of the violated feasibility screens; empty when the model is usable.
std::vector<std::string> feasibility_violations(const LaplacianModel& m);

/// T = diag(t_j), S = xi I. Throws ModelError listing violated screens.
std::pair<Operator, Operator> build_operators(const LaplacianModel& m);

struct ConditionCheck {
  bool holds = false;
  double sum = 0.0;    ///< partial sum plus an upper bound for the tail
  double bound = 0.0;  ///< 1 / |xi|
  int terms = 0;
};

/// sum_j 1 / (|eta + i eta1 lambda_j|^2 lambda_j^2) < 1/|xi| over all modes,
/// not just the retained ones. Throws PreconditionError for eta = eta1 = 0 or
/// xi = 0.
ConditionCheck condition_check(const LaplacianModel& m);

/// Mode-by-mode closed form from the scalar roots t_j +- sqrt(t_j^2 + xi).
/// Throws ResonanceError when a scalar boundary system is singular.
BvpSolution per_mode_oracle(const LaplacianModel& m, const Vector& u0, const Vector& u1,
                            const std::vector<double>& grid);

struct FieldSample {
  double t = 0.0;
  double x = 0.0;
  Complex u;
};

struct DemoResult {
  LaplacianModel model;
  ConditionCheck condition;
  PerturbationCertificate certificate;  ///< on (T^2, S)
  double commutation_residual = 0.0;
  double separation = 0.0;
  BvpSolution solution;
  BvpSolution oracle;
  double oracle_gap = 0.0;  ///< max over the grid of ||u - u_oracle|| / max(1, ||u_oracle||)
  std::vector<FieldSample> field;
};

/// Default boundary data: u0_j = 1 / j^2, u1_j = (-1)^j / (2 j^2).
std::pair<Vector, Vector> default_boundary_data(int n_modes);

/// build -> factorize -> solve -> oracle, then u(t, x) = sum_j u_j(t) sqrt(2) sin(j pi x)
/// on x_k = k / (x_samples - 1). Errors keep their type and gain a stage prefix.
DemoResult demo(const LaplacianModel& m, const Vector& u0, const Vector& u1,
                const std::vector<double>& grid, int x_samples);

}  // namespace opkit
