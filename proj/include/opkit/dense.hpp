#pragma once

// Small dense linear-algebra helpers shared by the modules. All functions
// work on plain Eigen matrices so they can be used on intermediate results
// (rectangular blocks, projectors) that are not Operators.

#include <vector>

#include "opkit/operator.hpp"

namespace opkit::dense {

/// Spectral norm (largest singular value). Zero for empty input.
double norm2(const Matrix& m);

/// Singular values in descending order.
RealVector singular_values(const Matrix& m);

/// Smallest singular value of a square matrix.
double sigma_min(const Matrix& m);

/// (m + m*) / 2, Hermitian to the last bit.
Matrix hermitian_part(const Matrix& m);

/// Eigenvalues of a Hermitian matrix in ascending order.
RealVector hermitian_eigenvalues(const Matrix& h);

double hermitian_min_eigenvalue(const Matrix& h);
double hermitian_max_eigenvalue(const Matrix& h);

/// Eigenvalues of a general square matrix (Schur based).
Vector eigenvalues(const Matrix& m);

/// Largest eigenvalue modulus.
double spectral_radius(const Matrix& m);

/// Standard cutoff: dim * machine epsilon * sigma_max.
double default_rank_tol(const Matrix& m);

/// Count of singular values strictly above `tol`.
Eigen::Index numerical_rank(const Matrix& m, double tol);

/// Unitary Q whose first `rank` columns span range(m) and whose remaining
/// columns span range(m)^perp.
struct RangeSplit {
  Matrix basis;
  Eigen::Index rank = 0;

  Matrix range_basis() const { return basis.leftCols(rank); }
  Matrix complement_basis() const { return basis.rightCols(basis.cols() - rank); }
};

RangeSplit range_split(const Matrix& m, double tol);

/// Orthogonal projector onto the span of the orthonormal columns of `q`.
Matrix projector(const Matrix& q);

/// Orthogonal projector onto range(m) / onto ker(m).
Matrix range_projector(const Matrix& m, double tol);
Matrix kernel_projector(const Matrix& m, double tol);

/// Sine of the largest principal angle between two subspaces given by their
/// orthogonal projectors: ||P1 - P2||_2. Subspaces of unequal dimension
/// give 1.
double subspace_distance(const Matrix& p1, const Matrix& p2);

/// Result of matching two eigenvalue multisets.
struct SpectrumMatch {
  double max_distance = 0.0;
  /// Number of times the greedy pass had to fall back to a partner that was
  /// not the nearest one because that one was already taken.
  int collisions = 0;
  bool sizes_equal = true;
};

/// Greedy nearest-neighbour matching of two multisets of complex numbers.
SpectrumMatch match_multisets(const std::vector<Complex>& a, const std::vector<Complex>& b);

std::vector<Complex> to_std(const Vector& v);

}  // namespace opkit::dense
