#include "opkit/operator.hpp"

#include <string>

namespace opkit {

Operator::Operator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw DimensionError("operator must be a non-empty square matrix, got " +
                         std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
  }
  if (!m_.allFinite()) throw DimensionError("operator has non-finite entries");
}

Operator::Operator(std::initializer_list<std::initializer_list<Complex>> rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw DimensionError("ragged initializer: row " + std::to_string(r) + " has " +
                           std::to_string(row.size()) + " entries, expected " + std::to_string(n));
    }
    Eigen::Index c = 0;
    for (const auto& v : row) m(r, c++) = v;
    ++r;
  }
  *this = Operator(std::move(m));
}

Operator Operator::identity(Eigen::Index dim) { return Operator(Matrix::Identity(dim, dim)); }

Operator Operator::zero(Eigen::Index dim) { return Operator(Matrix::Zero(dim, dim)); }

Operator Operator::diagonal(const Vector& diag) { return Operator(Matrix(diag.asDiagonal())); }

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
  }
}

Operator operator+(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "operator+");
  return Operator(Matrix(a.m_ + b.m_));
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "operator-");
  return Operator(Matrix(a.m_ - b.m_));
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "operator*");
  return Operator(Matrix(a.m_ * b.m_));
}

Operator operator*(Complex s, const Operator& a) { return Operator(Matrix(s * a.m_)); }

Vector operator*(const Operator& a, const Vector& x) {
  if (x.size() != a.dim()) throw DimensionError("operator*vector: dimension mismatch");
  return a.m_ * x;
}

}  // namespace opkit
