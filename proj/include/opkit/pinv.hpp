#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "opkit/operator.hpp"

namespace opkit {

/// SVD-truncated Moore-Penrose inverse and the data it was built from.
struct PinvResult {
  Operator pinv;
  Eigen::Index rank = 0;
  RealVector singular_values;  ///< descending
  /// Reduced minimum modulus: smallest retained singular value
  /// (+infinity for the zero operator).
  double gamma = 0.0;
  double rank_tol = 0.0;
};

/// Moore-Penrose inverse with singular values <= rank_tol discarded.
/// rank_tol < 0 selects dim * eps * sigma_max; rank_tol == 0 is rejected.
PinvResult pseudoinverse(const Operator& t, double rank_tol = -1.0);

/// Residuals of the four Penrose identities.
struct PenroseResiduals {
  double tpt = 0.0;   ///< ||T T+ T - T||
  double ptp = 0.0;   ///< ||T+ T T+ - T+||
  double tp_herm = 0.0;  ///< ||T T+ - (T T+)*||
  double pt_herm = 0.0;  ///< ||T+ T - (T+ T)*||

  double max() const;
};

PenroseResiduals penrose_residuals(const Operator& t, const Operator& pinv);

/// ||T T+ - T+ T||.
double ep_residual(const Operator& t, const Operator& pinv);

/// EP (equal projections) test: ||T T+ - T+ T|| <= tol.
bool is_ep(const Operator& t, double tol = 1e-10);

/// True iff lambda_min(Re(T+)) >= -tol. Throws PreconditionError when T
/// itself is not accretive.
bool accretive_pinv_check(const Operator& t, double tol = 1e-10);

enum class UnitaryStatus { unitary, not_unitary, hypotheses_unmet };

const char* to_string(UnitaryStatus s);

struct UnitaryOnRangeReport {
  UnitaryStatus status = UnitaryStatus::hypotheses_unmet;
  double w_t = 0.0;       ///< numerical radius of T
  double w_pinv = 0.0;    ///< numerical radius of T+
  bool t_accretive = false;
  double unitarity_residual = 0.0;  ///< max(||A*A - I||, ||AA* - I||) on range(T)
};

/// Checks whether the compression of T to range(T) is unitary, provided T
/// is accretive and both W(T), W(T+) lie in the closed unit disk.
UnitaryOnRangeReport unitary_on_range_check(const Operator& t, double tol = 1e-10);

enum class CertificateMode { range_side, kernel_side, both, fail };

const char* to_string(CertificateMode m);

/// Checkable hypotheses of the Moore-Penrose perturbation formulas.
struct PerturbationCertificate {
  double range_inclusion_residual = 0.0;   ///< ||(I - T T+) S||
  double kernel_inclusion_residual = 0.0;  ///< ||S (I - T+ T)||
  double contraction_TdS = 0.0;            ///< ||T+ S||
  double contraction_STd = 0.0;            ///< ||S T+||
  CertificateMode mode = CertificateMode::fail;
  bool t_accretive = false;
  bool s_accretive = false;
  /// Sectorial half-angle of S when it is below pi/2.
  std::optional<double> theta;
  double tolerance = 0.0;
  /// Rank cutoff used for T+; reused by perturbed_pinv.
  double rank_tol = 0.0;
};

/// tol < 0 selects 1e-10 * max(1, ||S||); rank_tol < 0 selects the default
/// pseudoinverse cutoff.
PerturbationCertificate perturbation_certificate(const Operator& t, const Operator& s,
                                                 double tol = -1.0, double rank_tol = -1.0);

/// Which algebraic route to use for the perturbed inverse.
enum class PerturbationSide { automatic, range_side, kernel_side };

/// (T+S)+ = (I + T+ S)^{-1} T+ (range side) or T+ (I + S T+)^{-1} (kernel
/// side). `automatic` picks the range side whenever the certificate allows
/// it and, in `both` mode, checks that the kernel side agrees.
/// Throws HypothesisError when the certificate is `fail` or T, S are not
/// accretive.
Operator perturbed_pinv(const Operator& t, const Operator& s, const PerturbationCertificate& cert,
                        PerturbationSide side = PerturbationSide::automatic);

/// Everything that can be measured about one certified perturbation.
struct PerturbationAudit {
  PerturbationCertificate certificate;
  Operator formula;
  Operator direct;
  double formula_gap = 0.0;   ///< ||formula - pinv(T+S)||
  double pinv_norm = 0.0;     ///< ||T+||
  Eigen::Index rank_t = 0;
  Eigen::Index rank_sum = 0;
  double range_distance = 0.0;   ///< principal-angle distance range(T+S) vs range(T)
  double kernel_distance = 0.0;  ///< same for kernels
  double error_norm = 0.0;       ///< ||(T+S)+ - T+||
  double error_bound = 0.0;      ///< ||S|| ||T+||^2 / (1 - contraction)
  double sum_pinv_norm = 0.0;    ///< ||(T+S)+||
  std::optional<double> theta_bound;  ///< 2||T+|| + (1 + tan theta)^2 ||T+||^2
  /// Informational, not asserted: ||S|| < 1 / gamma(T) as literally stated
  /// for the norm-size variant, and ||S|| < gamma(T), which is what actually
  /// implies ||T+ S|| < 1.
  bool literal_norm_condition = false;
  bool sufficient_norm_condition = false;
};

/// Runs certificate, formula and direct pseudoinverse and measures every
/// preserved quantity. `rank_tol` is used for all rank and subspace
/// decisions (negative selects the default cutoff).
PerturbationAudit audit_perturbation(const Operator& t, const Operator& s,
                                     PerturbationSide side = PerturbationSide::automatic,
                                     double tol = -1.0, double rank_tol = -1.0);

/// ||(I + T+ S)^{-1} T+ - sum_{n=0}^{k} (-T+ S)^n T+||. Throws
/// PreconditionError when ||T+ S|| >= 1.
double neumann_identity_check(const Operator& t, const Operator& s, int k);

/// Closed-form bound for neumann_identity_check: c^{k+1} ||T+|| / (1 - c).
double neumann_tail_bound(const Operator& t, const Operator& s, int k);

struct SquarePerturbation {
  Operator value;                    ///< (I + (T+)^2 S)^{-1} (T+)^2 (or the kernel-side form)
  Operator direct;                   ///< pinv(T^2 + S)
  double formula_gap = 0.0;
  double square_identity_gap = 0.0;  ///< ||(T^2)+ - (T+)^2||
  PerturbationCertificate certificate;  ///< certificate of (T^2, S)
};

/// Perturbation formula for T^2 + S using (T^2)+ = (T+)^2. Throws
/// HypothesisError when T, T^2 or S is not accretive or the certificate
/// fails.
SquarePerturbation square_pinv_identities(const Operator& t, const Operator& s,
                                          double tol = -1.0);

struct SecondPowerReport {
  double gamma_t = 0.0;
  double gamma_t2 = 0.0;
  double gamma_slack = 0.0;     ///< gamma(T^2) - gamma(T)^2 / 2
  double interpolation_worst_slack = 0.0;  ///< min of nu||x||^2 + ||T^2x||^2/nu - ||Tx||^2
  double landau_worst_slack = 0.0;         ///< min of 2||T^2x|| ||x|| - ||Tx||^2
  int samples = 0;
  int violations = 0;
};

/// Samples unit vectors and checks the two interpolation inequalities for
/// nu in {0.5, 1, 2} together with gamma(T^2) >= gamma(T)^2 / 2.
SecondPowerReport second_power_inequalities(const Operator& t, int samples, std::uint64_t seed);

}  // namespace opkit
