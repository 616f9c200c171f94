#include "opkit/pinv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "opkit/dense.hpp"
#include "opkit/linops.hpp"
#include "opkit/random.hpp"

namespace opkit {

namespace {

Matrix identity_like(const Operator& t) { return Matrix::Identity(t.dim(), t.dim()); }

bool accretive(const Operator& t) {
  const Matrix re = dense::hermitian_part(t.matrix());
  return dense::hermitian_min_eigenvalue(re) >= -default_accretivity_tol(t);
}

/// (I + A)^{-1} B with an explicit invertibility guard.
Matrix solve_shifted(const Matrix& a, const Matrix& b, const char* what) {
  const Matrix lhs = Matrix::Identity(a.rows(), a.cols()) + a;
  Eigen::PartialPivLU<Matrix> lu(lhs);
  Matrix x = lu.solve(b);
  if (!x.allFinite() || dense::sigma_min(lhs) <= 1e-14 * std::max(1.0, dense::norm2(lhs))) {
    throw AccuracyError(std::string(what) + ": I + A is numerically singular despite contraction < 1",
                        dense::sigma_min(lhs));
  }
  return x;
}

/// X (I + A)^{-1}, computed as ((I + A)^{-*} X*)*.
Matrix solve_shifted_right(const Matrix& x, const Matrix& a, const char* what) {
  return solve_shifted(Matrix(a.adjoint()), Matrix(x.adjoint()), what).adjoint();
}

}  // namespace

PinvResult pseudoinverse(const Operator& t, double rank_tol) {
  if (rank_tol == 0.0 || std::isnan(rank_tol)) {
    throw ParameterError("pseudoinverse: rank_tol must be positive (negative selects the default)");
  }
  const Matrix& m = t.matrix();
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  PinvResult r;
  r.singular_values = svd.singularValues();
  r.rank_tol = rank_tol < 0.0 ? dense::default_rank_tol(m) : rank_tol;
  r.rank = static_cast<Eigen::Index>((r.singular_values.array() > r.rank_tol).count());
  Matrix p = Matrix::Zero(m.cols(), m.rows());
  for (Eigen::Index i = 0; i < r.rank; ++i) {
    p += (svd.matrixV().col(i) / r.singular_values(i)) * svd.matrixU().col(i).adjoint();
  }
  r.pinv = Operator(std::move(p));
  r.gamma = r.rank == 0 ? std::numeric_limits<double>::infinity() : r.singular_values(r.rank - 1);
  return r;
}

double PenroseResiduals::max() const { return std::max({tpt, ptp, tp_herm, pt_herm}); }

PenroseResiduals penrose_residuals(const Operator& t, const Operator& pinv) {
  require_same_dim(t, pinv, "penrose_residuals");
  const Matrix& a = t.matrix();
  const Matrix& p = pinv.matrix();
  const Matrix ap = a * p;
  const Matrix pa = p * a;
  PenroseResiduals r;
  r.tpt = dense::norm2(ap * a - a);
  r.ptp = dense::norm2(pa * p - p);
  r.tp_herm = dense::norm2(ap - ap.adjoint());
  r.pt_herm = dense::norm2(pa - pa.adjoint());
  return r;
}

double ep_residual(const Operator& t, const Operator& pinv) {
  require_same_dim(t, pinv, "ep_residual");
  return dense::norm2(t.matrix() * pinv.matrix() - pinv.matrix() * t.matrix());
}

bool is_ep(const Operator& t, double tol) { return ep_residual(t, pseudoinverse(t).pinv) <= tol; }

bool accretive_pinv_check(const Operator& t, double tol) {
  if (!accretive(t)) throw PreconditionError("accretive_pinv_check: T is not accretive");
  const Matrix re = dense::hermitian_part(pseudoinverse(t).pinv.matrix());
  return dense::hermitian_min_eigenvalue(re) >= -tol;
}

const char* to_string(UnitaryStatus s) {
  switch (s) {
    case UnitaryStatus::unitary:
      return "unitary";
    case UnitaryStatus::not_unitary:
      return "not-unitary";
    case UnitaryStatus::hypotheses_unmet:
      return "hypotheses-unmet";
  }
  return "unknown";
}

UnitaryOnRangeReport unitary_on_range_check(const Operator& t, double tol) {
  UnitaryOnRangeReport r;
  const PinvResult p = pseudoinverse(t);
  r.t_accretive = accretive(t);
  r.w_t = numerical_radius(t);
  r.w_pinv = numerical_radius(p.pinv);
  if (!r.t_accretive || r.w_t > 1.0 + tol || r.w_pinv > 1.0 + tol) {
    r.status = UnitaryStatus::hypotheses_unmet;
    return r;
  }
  const Matrix q = dense::range_split(t.matrix(), p.rank_tol).range_basis();
  const Matrix a = q.adjoint() * t.matrix() * q;
  const Matrix id = Matrix::Identity(a.rows(), a.cols());
  r.unitarity_residual = std::max(dense::norm2(a.adjoint() * a - id), dense::norm2(a * a.adjoint() - id));
  r.status = r.unitarity_residual <= tol ? UnitaryStatus::unitary : UnitaryStatus::not_unitary;
  return r;
}

const char* to_string(CertificateMode m) {
  switch (m) {
    case CertificateMode::range_side:
      return "range-side";
    case CertificateMode::kernel_side:
      return "kernel-side";
    case CertificateMode::both:
      return "both";
    case CertificateMode::fail:
      return "fail";
  }
  return "unknown";
}

PerturbationCertificate perturbation_certificate(const Operator& t, const Operator& s, double tol,
                                                 double rank_tol) {
  require_same_dim(t, s, "perturbation_certificate");
  const Matrix& a = t.matrix();
  const Matrix& b = s.matrix();
  const PinvResult pr = pseudoinverse(t, rank_tol);
  const Matrix& p = pr.pinv.matrix();
  const Matrix id = identity_like(t);

  PerturbationCertificate c;
  c.rank_tol = pr.rank_tol;
  c.tolerance = tol < 0.0 ? 1e-10 * std::max(1.0, dense::norm2(b)) : tol;
  c.range_inclusion_residual = dense::norm2((id - a * p) * b);
  c.kernel_inclusion_residual = dense::norm2(b * (id - p * a));
  c.contraction_TdS = dense::norm2(p * b);
  c.contraction_STd = dense::norm2(b * p);
  c.t_accretive = accretive(t);

  const AccretivityReport sr = accretivity_report(s);
  c.s_accretive = sr.is_accretive;
  if (sr.omega && (sr.status == SectorStatus::strict || sr.status == SectorStatus::singular_sectorial)) {
    c.theta = *sr.omega;
  }

  const bool range_ok = c.range_inclusion_residual <= c.tolerance && c.contraction_TdS < 1.0;
  const bool kernel_ok = c.kernel_inclusion_residual <= c.tolerance && c.contraction_STd < 1.0;
  if (range_ok && kernel_ok) {
    c.mode = CertificateMode::both;
  } else if (range_ok) {
    c.mode = CertificateMode::range_side;
  } else if (kernel_ok) {
    c.mode = CertificateMode::kernel_side;
  } else {
    c.mode = CertificateMode::fail;
  }
  return c;
}

Operator perturbed_pinv(const Operator& t, const Operator& s, const PerturbationCertificate& cert,
                        PerturbationSide side) {
  require_same_dim(t, s, "perturbed_pinv");
  if (cert.mode == CertificateMode::fail) {
    throw HypothesisError("perturbed_pinv: neither range-side nor kernel-side hypotheses hold");
  }
  if (!cert.t_accretive || !cert.s_accretive) {
    throw HypothesisError("perturbed_pinv: T and S must both be accretive");
  }
  const bool range_allowed = cert.mode == CertificateMode::range_side || cert.mode == CertificateMode::both;
  const bool kernel_allowed = cert.mode == CertificateMode::kernel_side || cert.mode == CertificateMode::both;
  if (side == PerturbationSide::range_side && !range_allowed) {
    throw HypothesisError("perturbed_pinv: range-side hypotheses not certified");
  }
  if (side == PerturbationSide::kernel_side && !kernel_allowed) {
    throw HypothesisError("perturbed_pinv: kernel-side hypotheses not certified");
  }

  const Matrix p = pseudoinverse(t, cert.rank_tol > 0.0 ? cert.rank_tol : -1.0).pinv.matrix();
  const Matrix& b = s.matrix();
  auto range_form = [&] { return solve_shifted(Matrix(p * b), p, "perturbed_pinv"); };
  auto kernel_form = [&] { return solve_shifted_right(p, Matrix(b * p), "perturbed_pinv"); };

  if (side == PerturbationSide::kernel_side ||
      (side == PerturbationSide::automatic && !range_allowed)) {
    return Operator(kernel_form());
  }
  Matrix x = range_form();
  if (side == PerturbationSide::automatic && kernel_allowed) {
    const double gap = dense::norm2(x - kernel_form());
    const double scale = std::max(1.0, dense::norm2(p));
    if (gap > 1e-8 * scale) {
      throw AccuracyError("perturbed_pinv: range-side and kernel-side formulas disagree", gap);
    }
  }
  return Operator(std::move(x));
}

PerturbationAudit audit_perturbation(const Operator& t, const Operator& s, PerturbationSide side,
                                     double tol, double rank_tol) {
  PerturbationAudit a;
  a.certificate = perturbation_certificate(t, s, tol, rank_tol);
  const Operator sum = t + s;
  const PinvResult pt = pseudoinverse(t, rank_tol);
  const PinvResult ps = pseudoinverse(sum, rank_tol);

  a.formula = perturbed_pinv(t, s, a.certificate, side);
  a.direct = ps.pinv;
  a.formula_gap = dense::norm2(a.formula.matrix() - a.direct.matrix());
  a.pinv_norm = dense::norm2(pt.pinv.matrix());
  a.rank_t = pt.rank;
  a.rank_sum = ps.rank;
  a.range_distance = dense::subspace_distance(dense::range_projector(t.matrix(), pt.rank_tol),
                                              dense::range_projector(sum.matrix(), ps.rank_tol));
  a.kernel_distance = dense::subspace_distance(dense::kernel_projector(t.matrix(), pt.rank_tol),
                                               dense::kernel_projector(sum.matrix(), ps.rank_tol));
  a.error_norm = dense::norm2(a.direct.matrix() - pt.pinv.matrix());

  const auto mode = a.certificate.mode;
  const bool range_used = side == PerturbationSide::range_side ||
                          (side == PerturbationSide::automatic && mode != CertificateMode::kernel_side);
  const double c = range_used ? a.certificate.contraction_TdS : a.certificate.contraction_STd;
  const double s_norm = dense::norm2(s.matrix());
  a.error_bound = s_norm * a.pinv_norm * a.pinv_norm / (1.0 - c);
  a.sum_pinv_norm = dense::norm2(a.direct.matrix());
  if (a.certificate.theta) {
    const double g = 1.0 + std::tan(*a.certificate.theta);
    a.theta_bound = 2.0 * a.pinv_norm + g * g * a.pinv_norm * a.pinv_norm;
  }
  a.literal_norm_condition = s_norm * pt.gamma < 1.0;
  a.sufficient_norm_condition = s_norm < pt.gamma;
  return a;
}

double neumann_identity_check(const Operator& t, const Operator& s, int k) {
  require_same_dim(t, s, "neumann_identity_check");
  if (k < 0) throw ParameterError("neumann_identity_check: k must be >= 0");
  const Matrix p = pseudoinverse(t).pinv.matrix();
  const Matrix ps = p * s.matrix();
  const double c = dense::norm2(ps);
  if (c >= 1.0) {
    throw PreconditionError("neumann_identity_check: ||T+ S|| = " + std::to_string(c) + " >= 1");
  }
  const Matrix exact = solve_shifted(ps, p, "neumann_identity_check");
  Matrix term = p;
  Matrix partial = p;
  for (int n = 1; n <= k; ++n) {
    term = -ps * term;
    partial += term;
  }
  return dense::norm2(exact - partial);
}

double neumann_tail_bound(const Operator& t, const Operator& s, int k) {
  const Matrix p = pseudoinverse(t).pinv.matrix();
  const double c = dense::norm2(p * s.matrix());
  return std::pow(c, k + 1) * dense::norm2(p) / (1.0 - c);
}

SquarePerturbation square_pinv_identities(const Operator& t, const Operator& s, double tol) {
  require_same_dim(t, s, "square_pinv_identities");
  const Operator t2 = t * t;
  if (!accretive(t)) throw HypothesisError("square_pinv_identities: T is not accretive");
  if (!accretive(t2)) throw HypothesisError("square_pinv_identities: T^2 is not accretive");
  if (!accretive(s)) throw HypothesisError("square_pinv_identities: S is not accretive");

  const Matrix p = pseudoinverse(t).pinv.matrix();
  const Matrix p2 = p * p;
  SquarePerturbation out{Operator::zero(t.dim()), pseudoinverse(t2 + s).pinv, 0.0, 0.0,
                         perturbation_certificate(t2, s, tol)};
  out.square_identity_gap = dense::norm2(pseudoinverse(t2).pinv.matrix() - p2);
  const auto mode = out.certificate.mode;
  if (mode == CertificateMode::fail) {
    throw HypothesisError("square_pinv_identities: hypotheses fail for (T^2, S)");
  }
  const Matrix& b = s.matrix();
  if (mode == CertificateMode::kernel_side) {
    out.value = Operator(solve_shifted_right(p2, Matrix(b * p2), "square_pinv_identities"));
  } else {
    out.value = Operator(solve_shifted(Matrix(p2 * b), p2, "square_pinv_identities"));
  }
  out.formula_gap = dense::norm2(out.value.matrix() - out.direct.matrix());
  return out;
}

SecondPowerReport second_power_inequalities(const Operator& t, int samples, std::uint64_t seed) {
  if (!accretive(t)) throw PreconditionError("second_power_inequalities: T is not accretive");
  if (samples < 1) throw ParameterError("second_power_inequalities: samples must be >= 1");
  const Matrix& a = t.matrix();
  const Matrix a2 = a * a;
  const Operator t2(a2);
  const PinvResult p1 = pseudoinverse(t);
  const PinvResult p2 = pseudoinverse(t2);

  SecondPowerReport r;
  r.samples = samples;
  r.gamma_t = p1.gamma;
  r.gamma_t2 = p2.gamma;
  r.gamma_slack = p1.rank == 0 ? std::numeric_limits<double>::infinity()
                               : r.gamma_t2 - 0.5 * r.gamma_t * r.gamma_t;
  const double scale = std::max(1.0, dense::norm2(a) * dense::norm2(a));
  if (r.gamma_slack < -1e-12 * scale) ++r.violations;

  // Projector onto ker(T^2)^perp = range((T^2)*).
  const Matrix coker = p2.pinv.matrix() * a2;
  Rng rng(seed);
  r.interpolation_worst_slack = std::numeric_limits<double>::infinity();
  r.landau_worst_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const Vector x = sample::unit_vector(rng, t.dim());
    const double tx2 = (a * x).squaredNorm();
    const double t2x2 = (a2 * x).squaredNorm();
    for (const double nu : {0.5, 1.0, 2.0}) {
      const double slack = nu + t2x2 / nu - tx2;
      r.interpolation_worst_slack = std::min(r.interpolation_worst_slack, slack);
      if (slack < -1e-12 * scale) ++r.violations;
    }
    Vector y = coker * x;
    const double yn = y.norm();
    if (yn <= 1e-8) continue;
    y /= yn;
    const double slack = 2.0 * (a2 * y).norm() - (a * y).squaredNorm();
    r.landau_worst_slack = std::min(r.landau_worst_slack, slack);
    if (slack < -1e-12 * scale) ++r.violations;
  }
  return r;
}

}  // namespace opkit
