#pragma once

#include <cstdint>
#include <random>

#include "opkit/operator.hpp"

namespace opkit {

/// Seeded generator used by every sampling check and test-matrix factory.
/// Normal deviates come from Box-Muller on the raw 64-bit stream so a given
/// seed yields the same matrices with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  ///< in [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi);  ///< inclusive
  double normal();
  Complex complex_normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

namespace sample {

Matrix gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols);
Vector unit_vector(Rng& rng, Eigen::Index n);
Matrix unitary(Rng& rng, Eigen::Index n);
Matrix hermitian(Rng& rng, Eigen::Index n);

/// U diag(s) V* with `rank` singular values drawn log-uniformly in [lo, hi].
Operator with_rank(Rng& rng, Eigen::Index n, Eigen::Index rank, double lo = 0.1, double hi = 10.0);

/// Re = M*M + delta I, Im Hermitian. delta = 0 gives a singular real part.
Operator accretive(Rng& rng, Eigen::Index n, double delta);

/// Q diag(T1, 0) Q* with T1 a strongly accretive rank x rank block, so the
/// kernel is exact up to the rounding of the unitary change of basis.
Operator accretive_with_rank(Rng& rng, Eigen::Index n, Eigen::Index rank, double delta = 0.2);

/// R^{1/2} (I + i K) R^{1/2} with R positive definite and ||K|| = tan_half_angle,
/// i.e. a strongly accretive operator of exact half-angle atan(tan_half_angle).
Operator sectorial(Rng& rng, Eigen::Index n, double tan_half_angle);

}  // namespace sample

}  // namespace opkit
