#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opkit/dense.hpp"
#include "opkit/operator.hpp"

namespace opkit {

/// Q(lambda) = lambda^2 I - 2 lambda T - S. Hypotheses on T and S are
/// tracked by the factorization, not enforced here.
class QuadraticPencil {
 public:
  QuadraticPencil(Operator t, Operator s);

  const Operator& t() const noexcept { return t_; }
  const Operator& s() const noexcept { return s_; }
  Eigen::Index dim() const noexcept { return t_.dim(); }

 private:
  Operator t_;
  Operator s_;
};

/// Upsilon = T^2 + S.
Operator build_upsilon(const Operator& t, const Operator& s);

/// Default cutoff used to split off the kernel before taking roots and
/// powers: 1e-12 * dim * max(1, ||U||).
double default_kernel_tol(const Operator& u);

/// Principal square root. Accretive singular inputs are split on
/// range(U) (+) ker(U), the root is taken on the invertible range block and
/// the kernel is annihilated exactly. Throws NoPrincipalRootError for an
/// eigenvalue on the open negative real axis, PreconditionError for a
/// singular input whose range and kernel are not orthogonal complements.
Operator accretive_sqrt(const Operator& u, double kernel_tol = -1.0);

/// Composite Gauss-Legendre settings for the fractional-power integral.
struct QuadratureSpec {
  int initial_panels = 24;
  int nodes = 16;
  double rel_tol = 1e-8;  ///< stop when successive refinements differ by less
  int max_refinements = 8;
  double tail_cut = 1e-10;  ///< truncation relative to sigma_min / sigma_max
};

struct FractionalPowerResult {
  Operator value;
  double refinement_change = 0.0;  ///< relative change of the last doubling
  int panels = 0;
};

/// T^alpha for accretive T by the integral representation
/// (sin(pi alpha)/pi) int_0^inf lambda^{alpha-1} T (lambda + T)^{-1} d lambda,
/// after the substitution lambda = e^u. Singular accretive inputs are split
/// on range/kernel first. Throws ParameterError for alpha outside (0, 1),
/// PreconditionError for non-accretive T, AccuracyError if the refinements
/// do not settle.
FractionalPowerResult balakrishnan_power(const Operator& t, double alpha,
                                         const QuadratureSpec& quad = {});

/// V diag(mu_i^alpha) V^{-1} with the principal branch; requires T
/// diagonalizable. Independent route used to check the quadrature.
Operator spectral_power(const Operator& t, double alpha);

struct PencilFactorization {
  Operator upsilon;
  Operator sqrt_upsilon;
  Operator z1;  ///< T + Upsilon^{1/2}
  Operator z2;  ///< T - Upsilon^{1/2}
  double sqrt_residual = 0.0;  ///< ||(Upsilon^{1/2})^2 - Upsilon||
  std::optional<double> sqrt_sector_angle;
  /// Informational half-angle of Z1; not asserted to be pi/4.
  std::optional<double> z1_sector_angle;
  double commutator_norm = 0.0;  ///< ||TS - ST||
  bool commuting = false;
  std::vector<Complex> spectra_z1;
  std::vector<Complex> spectra_z2;
  double separation = 0.0;  ///< min |mu - nu| over sigma(Z1) x sigma(Z2)
  double upsilon_delta = 0.0;  ///< lambda_min(Re Upsilon)
  /// Strong regime: Upsilon strictly accretive, where disjoint spectra are
  /// asserted.
  bool strong_regime = false;
  bool separated = false;
  bool t_accretive = false;
  bool t2_accretive = false;
  bool s_accretive = false;
  bool upsilon_accretive = false;
  double tolerance = 0.0;
  std::vector<std::string> warnings;
};

/// Builds Upsilon, its principal root and the two factors. Hypothesis
/// violations are downgraded to warnings; a failing square root propagates.
PencilFactorization factorize(const QuadraticPencil& p, double tol = -1.0);

Operator eval_pencil(const QuadraticPencil& p, Complex lambda);

struct FactorizationResiduals {
  /// max over lambda of ||Q - (1/2)[(l-Z1)(l-Z2) + (l-Z2)(l-Z1)]|| / ((1+|l|^2) scale)
  double symmetric = 0.0;
  /// same for the one-sided product (l-Z1)(l-Z2)
  double one_sided = 0.0;
  double scale = 0.0;
};

FactorizationResiduals factorization_residuals(const PencilFactorization& f,
                                               const QuadraticPencil& p,
                                               const std::vector<Complex>& lambdas);

/// ||Z1^2 - T Z1 - Z1 T - S|| / scale.
double root_identity_residual(const PencilFactorization& f, const QuadraticPencil& p);

/// Eigenvalues of the companion linearisation [[0, I], [S, 2T]].
std::vector<Complex> pencil_spectrum(const QuadraticPencil& p);

/// sigma(Z1) (+) sigma(Z2) against the companion spectrum.
dense::SpectrumMatch spectrum_agreement(const PencilFactorization& f, const QuadraticPencil& p);

struct VandermondeReport {
  double vandermonde_sigma_min = 0.0;
  double sqrt_sigma_min = 0.0;
  bool vandermonde_invertible = false;
  bool sqrt_invertible = false;
  bool agree = false;
};

/// Invertibility of [[I, I], [Z1, Z2]] against invertibility of Upsilon^{1/2}.
VandermondeReport vandermonde_check(const PencilFactorization& f, double tol = 1e-8);

struct RelativeBoundReport {
  bool feasible = false;  ///< some (rho1, rho2) on the grid gives nu2 < 1
  double rho1 = 0.0;
  double rho2 = 0.0;
  double nu1 = 0.0;
  double nu2 = 0.0;
  int samples = 0;
  int violations = 0;
  double worst_slack = 0.0;  ///< min of nu1||x||^2 + nu2||T^2x||^2 - ||Z_i x||^2
};

/// Exhibits constants with ||Z_i x||^2 <= nu1 ||x||^2 + nu2 ||T^2 x||^2 and
/// nu2 < 1 (nu1 = 2(rho1 + rho2 + 2||S||^2/rho2), nu2 = 2(1/rho1 + 2/rho2)),
/// then verifies the inequality on sampled unit vectors.
RelativeBoundReport relative_bound_check(const QuadraticPencil& p, int samples, std::uint64_t seed);

}  // namespace opkit
