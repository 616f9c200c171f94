#include "opkit/dense.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace opkit::dense {

double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m)(0);
}

RealVector singular_values(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

double sigma_min(const Matrix& m) {
  const RealVector s = singular_values(m);
  return s.size() == 0 ? 0.0 : s(s.size() - 1);
}

Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

RealVector hermitian_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double hermitian_min_eigenvalue(const Matrix& h) { return hermitian_eigenvalues(h)(0); }

double hermitian_max_eigenvalue(const Matrix& h) {
  const RealVector ev = hermitian_eigenvalues(h);
  return ev(ev.size() - 1);
}

Vector eigenvalues(const Matrix& m) {
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  return es.eigenvalues();
}

double spectral_radius(const Matrix& m) { return eigenvalues(m).cwiseAbs().maxCoeff(); }

double default_rank_tol(const Matrix& m) {
  return static_cast<double>(std::max(m.rows(), m.cols())) *
         std::numeric_limits<double>::epsilon() * norm2(m);
}

Eigen::Index numerical_rank(const Matrix& m, double tol) {
  const RealVector s = singular_values(m);
  return static_cast<Eigen::Index>((s.array() > tol).count());
}

RangeSplit range_split(const Matrix& m, double tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU);
  RangeSplit out;
  out.basis = svd.matrixU();
  out.rank = static_cast<Eigen::Index>((svd.singularValues().array() > tol).count());
  return out;
}

Matrix projector(const Matrix& q) { return q * q.adjoint(); }

Matrix range_projector(const Matrix& m, double tol) {
  return projector(range_split(m, tol).range_basis());
}

Matrix kernel_projector(const Matrix& m, double tol) {
  // ker(m) = range(m*)^perp
  const Matrix a = m.adjoint();
  return Matrix::Identity(m.cols(), m.cols()) - range_projector(a, tol);
}

double subspace_distance(const Matrix& p1, const Matrix& p2) { return norm2(p1 - p2); }

SpectrumMatch match_multisets(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  SpectrumMatch out;
  out.sizes_equal = a.size() == b.size();
  if (!out.sizes_equal) {
    out.max_distance = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<bool> used(b.size(), false);
  for (const Complex& x : a) {
    std::size_t nearest = 0;
    double nearest_d = std::numeric_limits<double>::infinity();
    std::size_t best = b.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = std::abs(x - b[j]);
      if (d < nearest_d) {
        nearest_d = d;
        nearest = j;
      }
      if (!used[j] && d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best != nearest) ++out.collisions;
    used[best] = true;
    out.max_distance = std::max(out.max_distance, best_d);
  }
  return out;
}

std::vector<Complex> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace opkit::dense
