#include "opkit/random.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "opkit/dense.hpp"

namespace opkit {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

int Rng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(engine_() % span);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

namespace sample {

Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.complex_normal();
  return m;
}

Vector unit_vector(Rng& rng, Eigen::Index n) {
  Vector v = gaussian(rng, n, 1).col(0);
  return v / v.norm();
}

Matrix unitary(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(rng, n, n));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phases so the distribution is Haar.
  for (Eigen::Index j = 0; j < n; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0.0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

Matrix hermitian(Rng& rng, Eigen::Index n) {
  return dense::hermitian_part(gaussian(rng, n, n));
}

Operator with_rank(Rng& rng, Eigen::Index n, Eigen::Index rank, double lo, double hi) {
  const Matrix u = unitary(rng, n);
  const Matrix v = unitary(rng, n);
  RealVector s = RealVector::Zero(n);
  for (Eigen::Index i = 0; i < rank; ++i) s(i) = std::exp(rng.uniform(std::log(lo), std::log(hi)));
  return Operator(Matrix(u * s.cast<Complex>().asDiagonal() * v.adjoint()));
}

Operator accretive(Rng& rng, Eigen::Index n, double delta) {
  const Matrix m = gaussian(rng, n, n);
  Matrix re = m.adjoint() * m + delta * Matrix::Identity(n, n);
  re = dense::hermitian_part(re);
  const Matrix im = hermitian(rng, n);
  return Operator(Matrix(re + Complex(0.0, 1.0) * im));
}

Operator accretive_with_rank(Rng& rng, Eigen::Index n, Eigen::Index rank, double delta) {
  Matrix block = Matrix::Zero(n, n);
  if (rank > 0) block.topLeftCorner(rank, rank) = accretive(rng, rank, delta).matrix();
  const Matrix q = unitary(rng, n);
  return Operator(Matrix(q * block * q.adjoint()));
}

Operator sectorial(Rng& rng, Eigen::Index n, double tan_half_angle) {
  const Matrix m = gaussian(rng, n, n);
  const Matrix r = dense::hermitian_part(m.adjoint() * m + 0.5 * Matrix::Identity(n, n));
  Eigen::SelfAdjointEigenSolver<Matrix> es(r);
  const Matrix half = es.operatorSqrt();
  Matrix k = hermitian(rng, n);
  const double kn = dense::norm2(k);
  if (kn > 0.0) k *= tan_half_angle / kn;
  const Matrix core = Matrix::Identity(n, n) + Complex(0.0, 1.0) * k;
  return Operator(Matrix(half * core * half));
}

}  // namespace sample

}  // namespace opkit
