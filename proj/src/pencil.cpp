#include "opkit/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "opkit/linops.hpp"
#include "opkit/random.hpp"

namespace opkit {

namespace {

// Principal root of an upper triangular matrix (Bjorck-Hammarling
// recurrence). Diagonal entries must not be on the closed negative axis
// except for isolated zeros that are handled by the caller.
Matrix triangular_sqrt(const Matrix& t) {
  const Eigen::Index n = t.rows();
  Matrix r = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    r(j, j) = std::sqrt(t(j, j));
    for (Eigen::Index i = j - 1; i >= 0; --i) {
      Complex s = 0.0;
      for (Eigen::Index k = i + 1; k < j; ++k) s += r(i, k) * r(k, j);
      const Complex d = r(i, i) + r(j, j);
      if (std::abs(d) == 0.0)
        throw NoPrincipalRootError("square root: repeated zero eigenvalue in a non-trivial block");
      r(i, j) = (t(i, j) - s) / d;
    }
  }
  return r;
}

void reject_negative_axis(const Vector& mu, double tol) {
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const Complex z = mu(i);
    if (z.real() < -tol && std::abs(z.imag()) <= 1e-14 * std::abs(z))
      throw NoPrincipalRootError("square root: eigenvalue on the negative real axis");
  }
}

Matrix schur_sqrt(const Matrix& u, double tol) {
  Eigen::ComplexSchur<Matrix> cs(u);
  const Matrix& t = cs.matrixT();
  reject_negative_axis(t.diagonal(), tol);
  const Matrix q = cs.matrixU();
  return q * triangular_sqrt(t) * q.adjoint();
}

// Splits an EP matrix on range (+) kernel. Returns the orthonormal range
// basis and the compressed invertible block; throws if the kernel does not
// decouple.
struct EpSplit {
  Matrix range;
  Matrix block;
  Eigen::Index rank = 0;
};

EpSplit ep_split(const Matrix& u, double kernel_tol, const char* what) {
  const dense::RangeSplit rs = dense::range_split(u, kernel_tol);
  EpSplit out;
  out.rank = rs.rank;
  out.range = rs.range_basis();
  out.block = out.range.adjoint() * u * out.range;
  const double leak = dense::norm2(u - out.range * out.block * out.range.adjoint());
  if (leak > 1e-8 * std::max(1.0, dense::norm2(u)))
    throw PreconditionError(std::string(what) + ": singular input whose kernel does not split off");
  return out;
}

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
GaussRule gauss_legendre(int n) {
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    g.x[i] = -z;
    g.x[n - 1 - i] = z;
    g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return g;
}

// int_{ulo}^{uhi} e^{alpha u} A (e^u + A)^{-1} du on `panels` equal panels.
Matrix integrate_panels(const Matrix& a, double alpha, double ulo, double uhi, int panels,
                        const GaussRule& g) {
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix acc = Matrix::Zero(n, n);
  const double h = (uhi - ulo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = ulo + (p + 0.5) * h;
    for (std::size_t k = 0; k < g.x.size(); ++k) {
      const double u = mid + 0.5 * h * g.x[k];
      const double lam = std::exp(u);
      Eigen::PartialPivLU<Matrix> lu(lam * id + a);
      acc += (0.5 * h * g.w[k] * std::exp(alpha * u)) * lu.solve(a);
    }
  }
  return acc;
}

Matrix balakrishnan_block(const Matrix& a, double alpha, const QuadratureSpec& q, double& change,
                          int& panels) {
  const Eigen::Index n = a.rows();
  const Matrix id = Matrix::Identity(n, n);
  const RealVector sv = dense::singular_values(a);
  const double smax = sv(0);
  const double smin = sv(n - 1);
  if (!(smin > 0.0)) throw PreconditionError("fractional power: singular block after splitting");
  const double lo = q.tail_cut * smin;
  const double hi = smax / q.tail_cut;
  const double ulo = std::log(lo);
  const double uhi = std::log(hi);

  // Tails from the first two terms of the expansions of A(lambda + A)^{-1}
  // at 0 and at infinity.
  const Matrix ainv = Eigen::PartialPivLU<Matrix>(a).solve(id);
  const Matrix tails = (std::pow(lo, alpha) / alpha) * id -
                       (std::pow(lo, alpha + 1.0) / (alpha + 1.0)) * ainv +
                       (std::pow(hi, alpha - 1.0) / (1.0 - alpha)) * a -
                       (std::pow(hi, alpha - 2.0) / (2.0 - alpha)) * (a * a);

  const GaussRule g = gauss_legendre(q.nodes);
  const double c = std::sin(std::numbers::pi * alpha) / std::numbers::pi;
  panels = q.initial_panels;
  Matrix prev = c * (integrate_panels(a, alpha, ulo, uhi, panels, g) + tails);
  change = std::numeric_limits<double>::infinity();
  for (int r = 0; r < q.max_refinements; ++r) {
    panels *= 2;
    Matrix cur = c * (integrate_panels(a, alpha, ulo, uhi, panels, g) + tails);
    const double scale = std::max(dense::norm2(cur), std::numeric_limits<double>::min());
    change = dense::norm2(cur - prev) / scale;
    if (!std::isfinite(change)) break;
    if (change < q.rel_tol) return cur;
    prev = std::move(cur);
  }
  throw AccuracyError("fractional power: quadrature refinements did not settle", change);
}

}  // namespace

QuadraticPencil::QuadraticPencil(Operator t, Operator s) : t_(std::move(t)), s_(std::move(s)) {
  require_same_dim(t_, s_, "quadratic pencil");
}

Operator build_upsilon(const Operator& t, const Operator& s) {
  require_same_dim(t, s, "upsilon");
  return t * t + s;
}

double default_kernel_tol(const Operator& u) {
  return 1e-12 * static_cast<double>(u.dim()) * std::max(1.0, dense::norm2(u.matrix()));
}

Operator accretive_sqrt(const Operator& u, double kernel_tol) {
  const double ktol = kernel_tol < 0.0 ? default_kernel_tol(u) : kernel_tol;
  const Eigen::Index n = u.dim();
  const Eigen::Index rank = dense::numerical_rank(u.matrix(), ktol);
  if (rank == n) return Operator(schur_sqrt(u.matrix(), ktol));
  if (rank == 0) return Operator::zero(n);
  const EpSplit sp = ep_split(u.matrix(), ktol, "square root");
  const Matrix root = schur_sqrt(sp.block, ktol);
  return Operator(Matrix(sp.range * root * sp.range.adjoint()));
}

FractionalPowerResult balakrishnan_power(const Operator& t, double alpha,
                                         const QuadratureSpec& quad) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("fractional power: alpha must lie in (0, 1)");
  if (quad.initial_panels < 1 || quad.nodes < 2 || quad.max_refinements < 1 ||
      !(quad.rel_tol > 0.0) || !(quad.tail_cut > 0.0 && quad.tail_cut < 1.0))
    throw ParameterError("fractional power: invalid quadrature settings");
  const Matrix re = dense::hermitian_part(t.matrix());
  if (dense::hermitian_min_eigenvalue(re) < -default_accretivity_tol(t))
    throw PreconditionError("fractional power: operator is not accretive");

  const Eigen::Index n = t.dim();
  const double ktol = default_kernel_tol(t);
  FractionalPowerResult out;
  const Eigen::Index rank = dense::numerical_rank(t.matrix(), ktol);
  if (rank == 0) {
    out.value = Operator::zero(n);
    return out;
  }
  if (rank == n) {
    out.value = Operator(balakrishnan_block(t.matrix(), alpha, quad, out.refinement_change, out.panels));
    return out;
  }
  const EpSplit sp = ep_split(t.matrix(), ktol, "fractional power");
  const Matrix block = balakrishnan_block(sp.block, alpha, quad, out.refinement_change, out.panels);
  out.value = Operator(Matrix(sp.range * block * sp.range.adjoint()));
  return out;
}

Operator spectral_power(const Operator& t, double alpha) {
  Eigen::ComplexEigenSolver<Matrix> es(t.matrix());
  if (es.info() != Eigen::Success) throw AccuracyError("spectral power: eigensolver failed", 0.0);
  const Matrix& v = es.eigenvectors();
  const double smin = dense::sigma_min(v);
  if (!(smin > 1e-10 * dense::norm2(v)))
    throw PreconditionError("spectral power: operator is not safely diagonalizable");
  const double ktol = default_kernel_tol(t);
  Vector d(t.dim());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const Complex mu = es.eigenvalues()(i);
    d(i) = std::abs(mu) <= ktol ? Complex(0.0) : std::pow(mu, alpha);
  }
  return Operator(Matrix(v * d.asDiagonal() * v.inverse()));
}

PencilFactorization factorize(const QuadraticPencil& p, double tol) {
  const Matrix& t = p.t().matrix();
  const Matrix& s = p.s().matrix();
  const double tn = dense::norm2(t);
  const double sn = dense::norm2(s);
  PencilFactorization f;
  f.tolerance = tol < 0.0 ? 1e-10 * std::max({1.0, tn * tn, sn}) : tol;

  const auto accretive = [&](const Matrix& m) {
    return dense::hermitian_min_eigenvalue(dense::hermitian_part(m)) >=
           -1e-10 * std::max(1.0, dense::norm2(m));
  };
  f.t_accretive = accretive(t);
  f.t2_accretive = accretive(t * t);
  f.s_accretive = accretive(s);
  if (!f.t_accretive) f.warnings.emplace_back("T is not accretive");
  if (!f.t2_accretive) f.warnings.emplace_back("T^2 is not accretive");
  if (!f.s_accretive) f.warnings.emplace_back("S is not accretive");

  f.upsilon = build_upsilon(p.t(), p.s());
  f.upsilon_delta = dense::hermitian_min_eigenvalue(dense::hermitian_part(f.upsilon.matrix()));
  f.upsilon_accretive = f.upsilon_delta >= -f.tolerance;
  if (!f.upsilon_accretive) f.warnings.emplace_back("Upsilon is not accretive");
  f.strong_regime = f.upsilon_delta > f.tolerance;

  f.sqrt_upsilon = accretive_sqrt(f.upsilon);
  f.sqrt_residual = dense::norm2(f.sqrt_upsilon.matrix() * f.sqrt_upsilon.matrix() - f.upsilon.matrix());
  f.z1 = p.t() + f.sqrt_upsilon;
  f.z2 = p.t() - f.sqrt_upsilon;

  const AccretivityReport rs = accretivity_report(f.sqrt_upsilon);
  f.sqrt_sector_angle = rs.omega;
  const AccretivityReport rz = accretivity_report(f.z1);
  f.z1_sector_angle = rz.omega;

  f.commutator_norm = dense::norm2(t * s - s * t);
  f.commuting = f.commutator_norm <= f.tolerance;

  f.spectra_z1 = dense::to_std(dense::eigenvalues(f.z1.matrix()));
  f.spectra_z2 = dense::to_std(dense::eigenvalues(f.z2.matrix()));
  f.separation = std::numeric_limits<double>::infinity();
  for (const Complex a : f.spectra_z1)
    for (const Complex b : f.spectra_z2) f.separation = std::min(f.separation, std::abs(a - b));
  const double zscale =
      std::max({1.0, dense::norm2(f.z1.matrix()), dense::norm2(f.z2.matrix())});
  f.separated = f.separation > 1e-8 * zscale;
  if (f.strong_regime && !f.separated)
    f.warnings.emplace_back("spectra of Z1 and Z2 are not separated");
  return f;
}

Operator eval_pencil(const QuadraticPencil& p, Complex lambda) {
  const Eigen::Index n = p.dim();
  const Matrix id = Matrix::Identity(n, n);
  return Operator(Matrix(lambda * lambda * id - 2.0 * lambda * p.t().matrix() - p.s().matrix()));
}

FactorizationResiduals factorization_residuals(const PencilFactorization& f,
                                               const QuadraticPencil& p,
                                               const std::vector<Complex>& lambdas) {
  const Eigen::Index n = p.dim();
  const Matrix id = Matrix::Identity(n, n);
  FactorizationResiduals r;
  const double tn = dense::norm2(p.t().matrix());
  const double z1 = dense::norm2(f.z1.matrix());
  const double z2 = dense::norm2(f.z2.matrix());
  r.scale = std::max({1.0, tn * tn, dense::norm2(p.s().matrix()), z1 * z1, z2 * z2});
  for (const Complex lam : lambdas) {
    const Matrix q = eval_pencil(p, lam).matrix();
    const Matrix a = lam * id - f.z1.matrix();
    const Matrix b = lam * id - f.z2.matrix();
    const double w = (1.0 + std::norm(lam)) * r.scale;
    r.symmetric = std::max(r.symmetric, dense::norm2(q - 0.5 * (a * b + b * a)) / w);
    r.one_sided = std::max(r.one_sided, dense::norm2(q - a * b) / w);
  }
  return r;
}

double root_identity_residual(const PencilFactorization& f, const QuadraticPencil& p) {
  const Matrix& t = p.t().matrix();
  const Matrix& z = f.z1.matrix();
  const double tn = dense::norm2(t);
  const double zn = dense::norm2(z);
  const double scale = std::max({1.0, tn * tn, dense::norm2(p.s().matrix()), zn * zn});
  return dense::norm2(z * z - t * z - z * t - p.s().matrix()) / scale;
}

std::vector<Complex> pencil_spectrum(const QuadraticPencil& p) {
  const Eigen::Index n = p.dim();
  Matrix c = Matrix::Zero(2 * n, 2 * n);
  c.topRightCorner(n, n) = Matrix::Identity(n, n);
  c.bottomLeftCorner(n, n) = p.s().matrix();
  c.bottomRightCorner(n, n) = 2.0 * p.t().matrix();
  return dense::to_std(dense::eigenvalues(c));
}

dense::SpectrumMatch spectrum_agreement(const PencilFactorization& f, const QuadraticPencil& p) {
  std::vector<Complex> both = f.spectra_z1;
  both.insert(both.end(), f.spectra_z2.begin(), f.spectra_z2.end());
  return dense::match_multisets(both, pencil_spectrum(p));
}

VandermondeReport vandermonde_check(const PencilFactorization& f, double tol) {
  const Eigen::Index n = f.z1.dim();
  Matrix v(2 * n, 2 * n);
  v << Matrix::Identity(n, n), Matrix::Identity(n, n), f.z1.matrix(), f.z2.matrix();
  VandermondeReport r;
  r.vandermonde_sigma_min = dense::sigma_min(v);
  r.sqrt_sigma_min = dense::sigma_min(f.sqrt_upsilon.matrix());
  const double scale = std::max({1.0, dense::norm2(f.z1.matrix()), dense::norm2(f.z2.matrix())});
  r.vandermonde_invertible = r.vandermonde_sigma_min > tol * scale;
  r.sqrt_invertible = r.sqrt_sigma_min > tol * scale;
  r.agree = r.vandermonde_invertible == r.sqrt_invertible;
  return r;
}

RelativeBoundReport relative_bound_check(const QuadraticPencil& p, int samples, std::uint64_t seed) {
  if (samples < 1) throw ParameterError("relative bound: samples must be positive");
  const PencilFactorization f = factorize(p);
  const double sn = dense::norm2(p.s().matrix());
  RelativeBoundReport r;
  r.nu1 = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 80; ++i) {
    const double rho1 = std::pow(10.0, -2.0 + 0.1 * i);
    for (int j = 0; j <= 80; ++j) {
      const double rho2 = std::pow(10.0, -2.0 + 0.1 * j);
      const double nu2 = 2.0 * (1.0 / rho1 + 2.0 / rho2);
      if (nu2 >= 1.0) continue;
      const double nu1 = 2.0 * (rho1 + rho2 + 2.0 * sn * sn / rho2);
      if (nu1 < r.nu1) {
        r.feasible = true;
        r.rho1 = rho1;
        r.rho2 = rho2;
        r.nu1 = nu1;
        r.nu2 = nu2;
      }
    }
  }
  if (!r.feasible) return r;

  Rng rng(seed);
  const Matrix t2 = p.t().matrix() * p.t().matrix();
  r.worst_slack = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Vector x = sample::unit_vector(rng, p.dim());
    const double rhs = r.nu1 + r.nu2 * (t2 * x).squaredNorm();
    for (const Operator* z : {&f.z1, &f.z2}) {
      const double slack = rhs - (z->matrix() * x).squaredNorm();
      r.worst_slack = std::min(r.worst_slack, slack);
      if (slack < -1e-10 * std::max(1.0, rhs)) ++r.violations;
    }
    ++r.samples;
  }
  return r;
}

}  // namespace opkit
