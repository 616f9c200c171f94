#pragma once

#include <complex>
#include <initializer_list>

#include <Eigen/Dense>

#include "opkit/errors.hpp"

namespace opkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// A dense complex square matrix standing in for a closed, densely defined
/// operator. Construction validates shape and finiteness; afterwards the
/// value is immutable.
class Operator {
 public:
  Operator() = default;

  /// Throws DimensionError if `m` is empty, not square, or has NaN/Inf.
  explicit Operator(Matrix m);

  /// Row-major nested initializer, e.g. Operator{{1, 1}, {-1, 1}}.
  Operator(std::initializer_list<std::initializer_list<Complex>> rows);

  static Operator identity(Eigen::Index dim);
  static Operator zero(Eigen::Index dim);
  static Operator diagonal(const Vector& diag);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix& matrix() const noexcept { return m_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

  Operator adjoint() const { return Operator(Matrix(m_.adjoint())); }

  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(Complex s, const Operator& a);
  friend Vector operator*(const Operator& a, const Vector& x);

 private:
  Matrix m_;
};

/// Throws DimensionError unless both operators have the same size.
void require_same_dim(const Operator& a, const Operator& b, const char* what);

}  // namespace opkit
