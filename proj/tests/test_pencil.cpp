#include "doctest.h"

#include <cmath>
#include <numbers>

#include "opkit/dense.hpp"
#include "opkit/linops.hpp"
#include "opkit/pencil.hpp"
#include "opkit/pinv.hpp"
#include "opkit/random.hpp"
#include "oracles.hpp"

using namespace opkit;
using std::numbers::pi;

namespace {
const Complex I1{0.0, 1.0};

double gap(const Operator& a, const Operator& b) { return oracle::norm2(a.matrix() - b.matrix()); }
Operator diag(std::initializer_list<Complex> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (Complex z : d) v(i++) = z;
  return Operator::diagonal(v);
}

// Commuting accretive pair: both diagonal in one random unitary basis.
std::pair<Operator, Operator> commuting_pair(Rng& rng, Eigen::Index n) {
  const Matrix q = sample::unitary(rng, n);
  Vector dt(n), ds(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    dt(i) = Complex(rng.uniform(0.2, 2.0), rng.uniform(-0.15, 0.15));
    ds(i) = Complex(rng.uniform(0.1, 3.0), rng.uniform(-0.5, 0.5));
  }
  return {Operator(Matrix(q * dt.asDiagonal() * q.adjoint())),
          Operator(Matrix(q * ds.asDiagonal() * q.adjoint()))};
}

std::vector<Complex> unit_circle(int n) {
  std::vector<Complex> out;
  for (int k = 0; k < n; ++k) out.push_back(std::polar(1.0, 2.0 * pi * k / n));
  return out;
}
}  // namespace

TEST_CASE("build upsilon") {
  CHECK(gap(build_upsilon(diag({1, 2}), diag({3, 5})), diag({4, 9})) == 0.0);
  CHECK(gap(build_upsilon(Operator::zero(2), Operator::identity(2)), Operator::identity(2)) == 0.0);
  CHECK_THROWS_AS(build_upsilon(Operator::identity(2), Operator::identity(3)), DimensionError);
}

TEST_CASE("accretive square root") {
  CHECK(gap(accretive_sqrt(diag({4, 9})), diag({2, 3})) <= 1e-15);
  CHECK(gap(accretive_sqrt(diag({4, 0})), diag({2, 0})) <= 1e-15);
  const double r2 = std::sqrt(2.0);
  CHECK(gap(accretive_sqrt(Operator{{2, 1}, {0, 2}}), Operator{{r2, 1.0 / (2.0 * r2)}, {0, r2}}) <= 1e-14);
  CHECK_THROWS_AS(accretive_sqrt(diag({-1, 1})), NoPrincipalRootError);

  SUBCASE("matches an independent Schur root on random accretive input") {
    Rng rng(1);
    for (int trial = 0; trial < 30; ++trial) {
      const Operator u = sample::accretive(rng, rng.uniform_int(2, 10), rng.uniform(0.05, 1.0));
      const Operator r = accretive_sqrt(u);
      const double scale = std::max(1.0, oracle::norm2(u.matrix()));
      CHECK(oracle::norm2(r.matrix() - oracle::eigen_sqrt(u.matrix())) <= 1e-10 * scale);
      CHECK(gap(r * r, u) <= 1e-10 * scale);
      for (Complex z : dense::to_std(dense::eigenvalues(r.matrix())))
        CHECK(std::abs(std::arg(z)) <= pi / 4 + 1e-8);
      CHECK(*accretivity_report(r).omega <= pi / 4 + 1e-8);
    }
  }
  SUBCASE("singular accretive input keeps its kernel") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::Index n = rng.uniform_int(3, 8);
      const Operator u = sample::accretive_with_rank(rng, n, rng.uniform_int(1, static_cast<int>(n) - 1));
      const Operator r = accretive_sqrt(u);
      CHECK(gap(r * r, u) <= 1e-10 * std::max(1.0, oracle::norm2(u.matrix())));
      CHECK(dense::subspace_distance(dense::kernel_projector(r.matrix(), 1e-8),
                                     dense::kernel_projector(u.matrix(), 1e-8)) <= 1e-8);
    }
  }
}

TEST_CASE("fractional powers") {
  CHECK(gap(balakrishnan_power(Operator::identity(3), 0.3).value, Operator::identity(3)) <= 1e-8);
  CHECK(gap(balakrishnan_power(diag({1, 4}), 0.5).value, diag({1, 2})) <= 1e-8);
  CHECK_THROWS_AS(balakrishnan_power(Operator::identity(2), 0.0), ParameterError);
  CHECK_THROWS_AS(balakrishnan_power(Operator::identity(2), 1.0), ParameterError);
  CHECK_THROWS_AS(balakrishnan_power(Operator::identity(2), -0.5), ParameterError);
  CHECK_THROWS_AS(balakrishnan_power(diag({-1, 1}), 0.5), PreconditionError);

  SUBCASE("refinement budget exhausted") {
    QuadratureSpec q;
    q.rel_tol = 1e-30;
    q.max_refinements = 1;
    bool thrown = false;
    try {
      balakrishnan_power(diag({1, 4}), 0.5, q);
    } catch (const AccuracyError& e) {
      thrown = true;
      CHECK(e.achieved() >= 0.0);
    }
    CHECK(thrown);
  }
  SUBCASE("agrees with the eigen-decomposition power") {
    Rng rng(3);
    for (double alpha : {0.25, 0.5, 0.75}) {
      for (int trial = 0; trial < 4; ++trial) {
        const Operator t = sample::accretive(rng, 6, 0.2);
        const Operator q = balakrishnan_power(t, alpha).value;
        const Operator s = spectral_power(t, alpha);
        CHECK(gap(q, s) <= 1e-8 * std::max(1.0, oracle::norm2(s.matrix())));
      }
    }
  }
  SUBCASE("half power squares back") {
    Rng rng(4);
    const Operator t = sample::accretive(rng, 5, 0.3);
    const Operator h = balakrishnan_power(t, 0.5).value;
    CHECK(gap(h * h, t) <= 1e-7 * oracle::norm2(t.matrix()));
    CHECK(gap(h, Operator(oracle::eigen_sqrt(t.matrix()))) <= 1e-8 * oracle::norm2(h.matrix()));
  }
  SUBCASE("sector of T^alpha is within alpha times the sector of T") {
    Rng rng(5);
    for (int trial = 0; trial < 8; ++trial) {
      const Operator t = sample::sectorial(rng, 5, rng.uniform(0.2, 3.0));
      const double omega = *accretivity_report(t).omega;
      for (double alpha : {0.3, 0.6}) {
        const auto rep = accretivity_report(balakrishnan_power(t, alpha).value);
        REQUIRE(rep.omega.has_value());
        CHECK(*rep.omega <= alpha * omega + 1e-6);
      }
    }
  }
  SUBCASE("singular EP input") {
    Rng rng(6);
    const Operator t = sample::accretive_with_rank(rng, 6, 3);
    const Operator q = balakrishnan_power(t, 0.5).value;
    CHECK(gap(q, spectral_power(t, 0.5)) <= 1e-7 * std::max(1.0, oracle::norm2(q.matrix())));
  }
}

TEST_CASE("factorization") {
  SUBCASE("diagonal pencil") {
    const QuadraticPencil p(diag({1, 2}), diag({3, 5}));
    const auto f = factorize(p);
    CHECK(gap(f.sqrt_upsilon, diag({2, 3})) <= 1e-14);
    CHECK(gap(f.z1, diag({3, 5})) <= 1e-14);
    CHECK(gap(f.z2, diag({-1, -1})) <= 1e-14);
    CHECK(f.separation == doctest::Approx(4.0));
    CHECK(f.commuting);
    CHECK(f.strong_regime);
    CHECK(f.separated);
  }
  SUBCASE("pure potential") {
    const auto f = factorize(QuadraticPencil(Operator::zero(2), Operator::identity(2)));
    CHECK(gap(f.z1, Operator::identity(2)) <= 1e-15);
    CHECK(gap(f.z2, Complex(-1.0) * Operator::identity(2)) <= 1e-15);
    CHECK(f.separation == doctest::Approx(2.0));
  }
  SUBCASE("structural identities on random commuting pairs") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const auto [t, s] = commuting_pair(rng, rng.uniform_int(2, 8));
      const QuadraticPencil p(t, s);
      const auto f = factorize(p);
      const double scale = std::max({1.0, oracle::norm2(t.matrix()), oracle::norm2(s.matrix())});
      CHECK(gap(f.z1 + f.z2, Complex(2.0) * t) <= 1e-12 * scale);
      CHECK(gap(f.z1 - f.z2, Complex(2.0) * f.sqrt_upsilon) <= 1e-12 * scale);
      CHECK(root_identity_residual(f, p) <= 1e-10);

      const auto r = factorization_residuals(f, p, unit_circle(16));
      CHECK(r.symmetric <= 1e-10);
      CHECK(r.one_sided <= 1e-10);

      std::vector<Complex> joined = f.spectra_z1;
      joined.insert(joined.end(), f.spectra_z2.begin(), f.spectra_z2.end());
      CHECK(oracle::sorted_gap(joined, pencil_spectrum(p)) <= 1e-8 * scale);
      CHECK(spectrum_agreement(f, p).max_distance <= 1e-8 * scale);
    }
  }
  SUBCASE("non-commuting pair only satisfies the symmetric form") {
    const QuadraticPencil p(Operator{{1, 1}, {0, 1}}, Operator{{1, 0}, {1, 1}});
    const auto f = factorize(p);
    CHECK_FALSE(f.commuting);
    const auto r = factorization_residuals(f, p, unit_circle(16));
    CHECK(r.symmetric <= 1e-10);
    CHECK(r.one_sided > 1e-6);
  }
  SUBCASE("hypothesis violations become warnings") {
    const auto f = factorize(QuadraticPencil(diag({-1, 1}), diag({3, 3})));
    CHECK_FALSE(f.t_accretive);
    CHECK_FALSE(f.warnings.empty());
  }
}

TEST_CASE("pencil evaluation and spectrum") {
  const QuadraticPencil p(diag({1, 2}), diag({3, 5}));
  CHECK(gap(eval_pencil(p, 0.0), diag({-3, -5})) == 0.0);
  CHECK(gap(eval_pencil(p, 1.0), diag({-4, -8})) == 0.0);
  CHECK(gap(eval_pencil(p, 3.0), diag({0, -8})) == 0.0);

  CHECK(oracle::sorted_gap(pencil_spectrum(p), {3, -1, 5, -1}) <= 1e-12);
  CHECK(oracle::sorted_gap(pencil_spectrum(QuadraticPencil(Operator::zero(2), Operator::identity(2))),
                           {1, -1, 1, -1}) <= 1e-12);
  CHECK(oracle::sorted_gap(pencil_spectrum(QuadraticPencil(Operator::identity(2), Operator::zero(2))),
                           {0, 2, 0, 2}) <= 1e-12);

  Rng rng(8);
  const Operator t = sample::accretive(rng, 5, 0.2);
  const Operator s = sample::accretive(rng, 5, 0.2);
  const QuadraticPencil q(t, s);
  const double scale = std::max({1.0, oracle::norm2(t.matrix()) * oracle::norm2(t.matrix()),
                                 oracle::norm2(s.matrix())});
  const auto spec = pencil_spectrum(q);
  CHECK(spec.size() == 10);
  for (Complex lambda : spec)
    CHECK(dense::sigma_min(eval_pencil(q, lambda).matrix()) <= 1e-6 * scale * (1 + std::norm(lambda)));
}

TEST_CASE("block vandermonde") {
  const auto good = vandermonde_check(factorize(QuadraticPencil(diag({1, 2}), diag({3, 5}))));
  CHECK(good.vandermonde_invertible);
  CHECK(good.sqrt_invertible);
  CHECK(good.agree);
  const auto sing = vandermonde_check(factorize(QuadraticPencil(diag({1, 0}), Operator::zero(2))));
  CHECK_FALSE(sing.vandermonde_invertible);
  CHECK_FALSE(sing.sqrt_invertible);
  CHECK(sing.agree);

  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [t, s] = commuting_pair(rng, 4);
    CHECK(vandermonde_check(factorize(QuadraticPencil(t, s))).agree);
  }
}

TEST_CASE("relative bound") {
  const auto d = relative_bound_check(QuadraticPencil(diag({1, 2}), diag({3, 5})), 200, 1);
  CHECK(d.feasible);
  CHECK(d.nu2 < 1.0);
  CHECK(d.violations == 0);
  CHECK(relative_bound_check(QuadraticPencil(Operator::zero(2), Operator::identity(2)), 50, 2).feasible);

  Rng rng(10);
  int violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto [t, s] = commuting_pair(rng, 5);
    const auto r = relative_bound_check(QuadraticPencil(t, s), 40, 100 + trial);
    if (r.feasible) violations += r.violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("singular structure of the factors") {
  // T singular EP and S acting on range(T) only: the roots, Z1 and Z2 share
  // T's rank and kernel and stay EP.
  Rng rng(11);
  for (int trial = 0; trial < 15; ++trial) {
    const Eigen::Index n = rng.uniform_int(3, 7);
    const Eigen::Index k = rng.uniform_int(1, static_cast<int>(n) - 1);
    const Matrix q = sample::unitary(rng, n);
    Vector dt = Vector::Zero(n), ds = Vector::Zero(n);
    for (Eigen::Index i = 0; i < k; ++i) {
      dt(i) = Complex(rng.uniform(0.5, 2.0), rng.uniform(-0.2, 0.2));
      ds(i) = Complex(rng.uniform(0.5, 2.0), rng.uniform(-0.3, 0.3));
    }
    const Operator t(Matrix(q * dt.asDiagonal() * q.adjoint()));
    const Operator s(Matrix(q * ds.asDiagonal() * q.adjoint()));
    const auto f = factorize(QuadraticPencil(t, s));
    const Matrix kt = dense::kernel_projector(t.matrix(), 1e-8);
    for (const Operator* m : {&f.sqrt_upsilon, &f.z1, &f.z2}) {
      CHECK(dense::numerical_rank(m->matrix(), 1e-8) == k);
      CHECK(dense::subspace_distance(dense::kernel_projector(m->matrix(), 1e-8), kt) <= 1e-8);
      CHECK(is_ep(*m, 1e-8));
    }
  }
}
