#pragma once

#include <optional>
#include <vector>

#include "opkit/operator.hpp"

namespace opkit {

/// T = re_part + i * im_part with both parts Hermitian.
struct CartesianParts {
  Operator re_part;
  Operator im_part;
};

CartesianParts cartesian_parts(const Operator& t);

/// Options for the rotation method used by the numerical range routines.
struct RotationOptions {
  int n_angles = 720;
  /// Angular tolerance for the golden-section refinement around the best
  /// grid angle.
  double angle_tol = 1e-10;
};

/// w(T) = max over theta of lambda_max(Re(e^{i theta} T)).
double numerical_radius(const Operator& t, const RotationOptions& opts = {});

/// Boundary points of W(T): for each of `n_angles` equally spaced angles the
/// top eigenvector x of Re(e^{i theta} T) gives the support point <Tx, x>.
/// Their convex hull approximates W(T) from inside. Throws ParameterError
/// if n_angles < 3.
std::vector<Complex> numerical_range_boundary(const Operator& t, int n_angles);

/// How much of the sectorial picture could be established.
enum class SectorStatus {
  /// Re(T) >= delta I with delta > tol; omega < pi/2 from the Kato form.
  strict,
  /// Re(T) singular but accretive with range(T) inside range(Re T);
  /// omega < pi/2 from the pseudoinverse route.
  singular_sectorial,
  /// Accretive, but range(T) is not inside range(Re T): omega = pi/2.
  half_plane,
  /// lambda_min(Re T) < -tol: no sector exists.
  not_accretive,
};

const char* to_string(SectorStatus s);

struct AccretivityReport {
  double delta = 0.0;  ///< lambda_min(Re T)
  bool is_accretive = false;
  SectorStatus status = SectorStatus::not_accretive;
  /// Sectorial half-angle in [0, pi/2]; absent when not accretive.
  std::optional<double> omega;
  /// |lambda_0| = spectral radius of Im(T) Re(T)^{-1} (or the pseudoinverse
  /// variant) = tan(omega). Absent when the half-angle is pi/2 or undefined.
  std::optional<double> lambda0_modulus;
  /// sqrt(||T||^2 / delta^2 - 1), only when delta > tol.
  std::optional<double> bound_rhs;
  double numerical_radius = 0.0;
  double operator_norm = 0.0;
  double spectral_radius = 0.0;
  double tolerance = 0.0;
};

/// Default accretivity tolerance: 1e-10 * max(1, ||T||).
double default_accretivity_tol(const Operator& t);

/// Certifies accretivity and computes the sectorial half-angle. A
/// non-accretive input is reported through `status`, never thrown.
/// A negative `tol` selects default_accretivity_tol.
AccretivityReport accretivity_report(const Operator& t, double tol = -1.0,
                                     const RotationOptions& opts = {});

/// Hermitian T~ with T = Re(T)^{1/2} (I + i T~) Re(T)^{1/2}; ||T~|| = tan(omega).
/// Throws PreconditionError when Re(T) is not positive definite.
Operator kato_representation(const Operator& t, double tol = -1.0);

/// True iff every eigenvalue of T lies within `tol` of the convex hull of
/// the sampled numerical-range boundary. A negative tol selects
/// 1e-8 * max(1, ||T||).
bool spectral_inclusion_check(const Operator& t, double tol = -1.0, int n_angles = 720);

/// Convex hull (counter-clockwise) of a point cloud.
std::vector<Complex> convex_hull(std::vector<Complex> pts);

/// Distance from z to a convex polygon given counter-clockwise; zero inside.
double distance_to_hull(const std::vector<Complex>& hull, Complex z);

}  // namespace opkit
