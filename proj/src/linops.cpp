#include "opkit/linops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "opkit/dense.hpp"

namespace opkit {

namespace {

constexpr Complex kI{0.0, 1.0};

Matrix rotated_real_part(const Matrix& t, double theta) {
  return dense::hermitian_part(std::polar(1.0, theta) * t);
}

double top_rotated_eigenvalue(const Matrix& t, double theta) {
  return dense::hermitian_max_eigenvalue(rotated_real_part(t, theta));
}

/// Golden-section maximisation of f on [a, b].
template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

/// Pseudo-inverse square root of a Hermitian positive semidefinite matrix,
/// discarding eigenvalues at or below `cutoff`.
Matrix psd_inverse_sqrt(const Matrix& h, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  RealVector d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = d(i) > cutoff ? 1.0 / std::sqrt(d(i)) : 0.0;
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

double cross(Complex o, Complex a, Complex b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) -
         (a.imag() - o.imag()) * (b.real() - o.real());
}

double segment_distance(Complex a, Complex b, Complex z) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  const double s = std::clamp(((z - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
  return std::abs(z - (a + s * ab));
}

}  // namespace

CartesianParts cartesian_parts(const Operator& t) {
  const Matrix& m = t.matrix();
  Matrix re = (m + m.adjoint()) * 0.5;
  Matrix im = (m - m.adjoint()) / (2.0 * kI);
  // Diagonal of a Hermitian matrix is real; drop rounding residue.
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    re(i, i) = re(i, i).real();
    im(i, i) = im(i, i).real();
  }
  return {Operator(std::move(re)), Operator(std::move(im))};
}

double numerical_radius(const Operator& t, const RotationOptions& opts) {
  if (opts.n_angles < 3) throw ParameterError("numerical_radius: n_angles must be >= 3");
  const Matrix& m = t.matrix();
  const double step = 2.0 * std::numbers::pi / opts.n_angles;
  double best = -std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  for (int k = 0; k < opts.n_angles; ++k) {
    const double theta = k * step;
    const double v = top_rotated_eigenvalue(m, theta);
    if (v > best) {
      best = v;
      best_theta = theta;
    }
  }
  const auto [theta, refined] =
      golden_max([&](double th) { return top_rotated_eigenvalue(m, th); }, best_theta - step,
                 best_theta + step, opts.angle_tol);
  (void)theta;
  return std::max({best, refined, 0.0});
}

std::vector<Complex> numerical_range_boundary(const Operator& t, int n_angles) {
  if (n_angles < 3) throw ParameterError("numerical_range_boundary: n_angles must be >= 3");
  const Matrix& m = t.matrix();
  std::vector<Complex> pts;
  pts.reserve(static_cast<std::size_t>(n_angles));
  for (int k = 0; k < n_angles; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n_angles;
    Eigen::SelfAdjointEigenSolver<Matrix> es(rotated_real_part(m, theta));
    const Vector x = es.eigenvectors().col(m.rows() - 1);
    pts.push_back(x.dot(m * x));  // dot() conjugates its left argument
  }
  return pts;
}

const char* to_string(SectorStatus s) {
  switch (s) {
    case SectorStatus::strict:
      return "strict";
    case SectorStatus::singular_sectorial:
      return "singular-sectorial";
    case SectorStatus::half_plane:
      return "half-plane";
    case SectorStatus::not_accretive:
      return "not-accretive";
  }
  return "unknown";
}

double default_accretivity_tol(const Operator& t) {
  return 1e-10 * std::max(1.0, dense::norm2(t.matrix()));
}

AccretivityReport accretivity_report(const Operator& t, double tol, const RotationOptions& opts) {
  const Matrix& m = t.matrix();
  AccretivityReport r;
  r.tolerance = tol < 0.0 ? default_accretivity_tol(t) : tol;
  r.operator_norm = dense::norm2(m);
  r.spectral_radius = dense::spectral_radius(m);
  r.numerical_radius = numerical_radius(t, opts);

  const auto parts = cartesian_parts(t);
  const Matrix& re = parts.re_part.matrix();
  const Matrix& im = parts.im_part.matrix();
  r.delta = dense::hermitian_min_eigenvalue(re);
  r.is_accretive = r.delta >= -r.tolerance;

  if (!r.is_accretive) {
    r.status = SectorStatus::not_accretive;
    return r;
  }

  if (r.delta > r.tolerance) {
    const Matrix k = psd_inverse_sqrt(re, 0.0);
    const double tan_omega = dense::norm2(k * im * k);
    r.status = SectorStatus::strict;
    r.lambda0_modulus = tan_omega;
    r.omega = std::atan(tan_omega);
    const double ratio = r.operator_norm / r.delta;
    r.bound_rhs = std::sqrt(std::max(0.0, ratio * ratio - 1.0));
    return r;
  }

  // Singular real part: sectorial iff range(T) lies inside range(Re T).
  Matrix stacked(m.rows(), 2 * m.cols());
  stacked << re, m;
  const Eigen::Index rank_re = dense::numerical_rank(re, r.tolerance);
  const Eigen::Index rank_stacked = dense::numerical_rank(stacked, r.tolerance);
  if (rank_stacked > rank_re) {
    r.status = SectorStatus::half_plane;
    r.omega = std::numbers::pi / 2.0;
    return r;
  }
  const Matrix k = psd_inverse_sqrt(re, r.tolerance);
  const double tan_omega = dense::norm2(k * im * k);
  r.status = SectorStatus::singular_sectorial;
  r.lambda0_modulus = tan_omega;
  r.omega = std::atan(tan_omega);
  return r;
}

Operator kato_representation(const Operator& t, double tol) {
  const double cutoff = tol < 0.0 ? default_accretivity_tol(t) : tol;
  const auto parts = cartesian_parts(t);
  const Matrix& re = parts.re_part.matrix();
  const double delta = dense::hermitian_min_eigenvalue(re);
  if (!(delta > cutoff)) {
    throw PreconditionError("kato_representation: Re(T) is not positive definite (delta = " +
                            std::to_string(delta) + ")");
  }
  const Matrix k = psd_inverse_sqrt(re, 0.0);
  return Operator(dense::hermitian_part(k * parts.im_part.matrix() * k));
}

bool spectral_inclusion_check(const Operator& t, double tol, int n_angles) {
  const double cutoff = tol < 0.0 ? 1e-8 * std::max(1.0, dense::norm2(t.matrix())) : tol;
  const auto hull = convex_hull(numerical_range_boundary(t, n_angles));
  const Vector ev = dense::eigenvalues(t.matrix());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (distance_to_hull(hull, ev(i)) > cutoff) return false;
  }
  return true;
}

std::vector<Complex> convex_hull(std::vector<Complex> pts) {
  auto less = [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  };
  std::sort(pts.begin(), pts.end(), less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Complex> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Complex& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double distance_to_hull(const std::vector<Complex>& hull, Complex z) {
  if (hull.empty()) return std::numeric_limits<double>::infinity();
  if (hull.size() == 1) return std::abs(z - hull[0]);
  if (hull.size() == 2) return segment_distance(hull[0], hull[1], z);
  bool inside = true;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Complex a = hull[i];
    const Complex b = hull[(i + 1) % hull.size()];
    if (cross(a, b, z) < 0.0) inside = false;
    best = std::min(best, segment_distance(a, b, z));
  }
  return inside ? 0.0 : best;
}

}  // namespace opkit
