#include "doctest.h"

#include <cmath>
#include <numbers>

#include "opkit/dense.hpp"
#include "opkit/linops.hpp"
#include "opkit/pinv.hpp"
#include "opkit/random.hpp"
#include "oracles.hpp"

using namespace opkit;

namespace {
const Complex I1{0.0, 1.0};

double gap(const Operator& a, const Operator& b) { return oracle::norm2(a.matrix() - b.matrix()); }
Operator diag(std::initializer_list<Complex> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (Complex z : d) v(i++) = z;
  return Operator::diagonal(v);
}
}  // namespace

TEST_CASE("pseudoinverse basics") {
  CHECK(gap(pseudoinverse(diag({2, 0})).pinv, diag({0.5, 0})) == 0.0);
  const auto z = pseudoinverse(Operator::zero(3));
  CHECK(z.pinv.matrix().norm() == 0.0);
  CHECK(z.rank == 0);
  CHECK(std::isinf(z.gamma));
  CHECK_THROWS_AS(pseudoinverse(Operator::identity(2), 0.0), ParameterError);
  CHECK_THROWS_AS(pseudoinverse(Operator::identity(2), NAN), ParameterError);
}

TEST_CASE("pseudoinverse against a complete orthogonal decomposition") {
  Rng rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = rng.uniform_int(2, 9);
    const Eigen::Index rank = rng.uniform_int(1, static_cast<int>(n));
    const Operator t = sample::with_rank(rng, n, rank);
    const auto p = pseudoinverse(t);
    CHECK(p.rank == rank);
    const Matrix ref = oracle::cod_pinv(t.matrix(), 1e-8);
    CHECK(oracle::norm2(p.pinv.matrix() - ref) <= 1e-10 * std::max(1.0, oracle::norm2(ref)));

    const double scale = std::max({1.0, oracle::norm2(t.matrix()), oracle::norm2(p.pinv.matrix())});
    CHECK(penrose_residuals(t, p.pinv).max() <= 1e-10 * scale);
    CHECK(p.gamma == doctest::Approx(1.0 / oracle::norm2(p.pinv.matrix())).epsilon(1e-12));
    CHECK(gap(pseudoinverse(p.pinv).pinv, t) <= 1e-10 * scale);
  }
}

TEST_CASE("EP test") {
  CHECK(is_ep(diag({1, I1, 0})));
  CHECK(is_ep(Operator{{1, 1}, {-1, 1}}));
  CHECK_FALSE(is_ep(Operator{{0, 1}, {0, 0}}));
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial)
    CHECK(is_ep(sample::accretive_with_rank(rng, 6, rng.uniform_int(1, 5))));
}

TEST_CASE("pseudoinverse of an accretive operator is accretive") {
  CHECK(accretive_pinv_check(Operator::identity(3)));
  CHECK(accretive_pinv_check(diag({1, I1, 0})));
  CHECK(gap(pseudoinverse(diag({1, I1, 0})).pinv, diag({1, -I1, 0})) <= 1e-15);
  CHECK_THROWS_AS(accretive_pinv_check(diag({-1, 1})), PreconditionError);

  Rng rng(5);
  int failures = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Eigen::Index n = rng.uniform_int(2, 16);
    const Operator t = rng.uniform() < 0.5 ? sample::accretive(rng, n, rng.uniform(0.0, 1.0))
                                           : sample::accretive_with_rank(rng, n, rng.uniform_int(1, static_cast<int>(n)));
    if (!accretive_pinv_check(t)) ++failures;
  }
  CHECK(failures == 0);
}

TEST_CASE("unitary on range") {
  CHECK(unitary_on_range_check(Operator::identity(3)).status == UnitaryStatus::unitary);
  CHECK(unitary_on_range_check(diag({1, 0})).status == UnitaryStatus::unitary);
  CHECK(unitary_on_range_check(diag({std::polar(1.0, std::numbers::pi / 4), 0})).status ==
        UnitaryStatus::unitary);
  CHECK(unitary_on_range_check(diag({-1, 1})).status == UnitaryStatus::hypotheses_unmet);
  // w(T) = 2 > 1
  CHECK(unitary_on_range_check(diag({2, 0})).status == UnitaryStatus::hypotheses_unmet);
}

TEST_CASE("perturbation certificate") {
  SUBCASE("aligned diagonal perturbation satisfies both sides") {
    const auto c = perturbation_certificate(diag({1, 0}), diag({0.3, 0}));
    CHECK(c.mode == CertificateMode::both);
    CHECK(c.contraction_TdS == doctest::Approx(0.3));
    CHECK(c.range_inclusion_residual <= 1e-15);
  }
  SUBCASE("perturbation on the kernel fails") {
    const auto c = perturbation_certificate(diag({1, 0}), diag({0, 0.3}));
    CHECK(c.mode == CertificateMode::fail);
    CHECK(c.range_inclusion_residual == doctest::Approx(0.3));
  }
  SUBCASE("scaled copy") {
    Rng rng(8);
    const Operator t = sample::accretive_with_rank(rng, 5, 3);
    const auto c = perturbation_certificate(t, Complex(0.1) * t);
    CHECK(c.mode == CertificateMode::both);
    CHECK(c.contraction_TdS <= 0.1 + 1e-10);
  }
  SUBCASE("only one contraction below one") {
    // T = diag(1, 10, 0), S = diag(B, 0) with ||T+ S|| < 1 < ||S T+||.
    Matrix s = Matrix::Zero(3, 3);
    s(0, 0) = 0.9;
    s(1, 0) = 1.0;
    s(1, 1) = 9.0;
    const Operator t = diag({1, 10, 0});
    const auto c = perturbation_certificate(t, Operator(s));
    CHECK(c.contraction_TdS < 1.0);
    CHECK(c.contraction_STd > 1.0);
    CHECK(c.mode == CertificateMode::range_side);
    CHECK_THROWS_AS(perturbed_pinv(t, Operator(s), c, PerturbationSide::kernel_side), HypothesisError);
    const Operator f = perturbed_pinv(t, Operator(s), c, PerturbationSide::range_side);
    CHECK(gap(f, pseudoinverse(t + Operator(s)).pinv) <= 1e-12);
  }
}

TEST_CASE("perturbed pseudoinverse") {
  Rng rng(9);
  const Operator t = sample::accretive_with_rank(rng, 6, 4);
  const Operator tp = pseudoinverse(t).pinv;

  const Operator zero = Operator::zero(6);
  CHECK(gap(perturbed_pinv(t, zero, perturbation_certificate(t, zero)), tp) <= 1e-12);

  const double eps = 0.25;
  const Operator s = Complex(eps) * t;
  CHECK(gap(perturbed_pinv(t, s, perturbation_certificate(t, s)), Complex(1.0 / (1.0 + eps)) * tp) <=
        1e-10 * oracle::norm2(tp.matrix()));

  const Operator f = perturbed_pinv(diag({1, 0}), diag({0.3, 0}),
                                    perturbation_certificate(diag({1, 0}), diag({0.3, 0})));
  CHECK(gap(f, diag({1.0 / 1.3, 0})) <= 1e-15);

  const auto bad = perturbation_certificate(diag({1, 0}), diag({0, 0.3}));
  CHECK_THROWS_AS(perturbed_pinv(diag({1, 0}), diag({0, 0.3}), bad), HypothesisError);
  const auto nonacc = perturbation_certificate(diag({1, 0}), diag({-0.3, 0}));
  CHECK_THROWS_AS(perturbed_pinv(diag({1, 0}), diag({-0.3, 0}), nonacc), HypothesisError);
}

TEST_CASE("perturbation audit preserves range, kernel and rank") {
  Rng rng(10);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = rng.uniform_int(3, 8);
    const Eigen::Index rank = rng.uniform_int(1, static_cast<int>(n) - 1);
    const Operator t = sample::accretive_with_rank(rng, n, rank);
    // S = P B P restricted to range(T), scaled to contraction 0.5
    const Matrix p = dense::range_projector(t.matrix(), 1e-8);
    Matrix b = p * sample::accretive(rng, n, 0.1).matrix() * p;
    const double c = oracle::norm2(pseudoinverse(t).pinv.matrix() * b);
    b *= 0.5 / c;
    const auto a = audit_perturbation(t, Operator(b));
    REQUIRE(a.certificate.mode != CertificateMode::fail);
    CHECK(a.formula_gap <= 1e-8 * std::max(1.0, oracle::norm2(a.direct.matrix())));
    CHECK(a.rank_sum == a.rank_t);
    CHECK(a.range_distance <= 1e-8);
    CHECK(a.kernel_distance <= 1e-8);
    CHECK(a.error_norm <= a.error_bound * (1 + 1e-8) + 1e-12);
  }
}

TEST_CASE("sector bound on the perturbed inverse can fail at large angles") {
  // Scalar witness: T = 100i, S of half-angle theta with tan(theta) = 10 and
  // |T+ S| = 0.995. |(T+S)+| is about 0.1005 while the bound gives about 0.032.
  const double theta = std::atan(10.0);
  const Operator t{{Complex(0.0, 100.0)}};
  const Operator s{{std::polar(99.5, -theta)}};
  const auto a = audit_perturbation(t, s);
  REQUIRE(a.certificate.mode != CertificateMode::fail);
  CHECK(a.certificate.contraction_TdS == doctest::Approx(0.995));
  REQUIRE(a.certificate.theta.has_value());
  CHECK(*a.certificate.theta == doctest::Approx(theta).epsilon(1e-10));
  REQUIRE(a.theta_bound.has_value());
  CHECK(*a.theta_bound == doctest::Approx(0.0321).epsilon(1e-3));
  CHECK(a.sum_pinv_norm == doctest::Approx(1.0 / std::abs(Complex(0.0, 100.0) + std::polar(99.5, -theta))));
  CHECK(a.sum_pinv_norm > *a.theta_bound);
}

TEST_CASE("neumann series") {
  CHECK(neumann_identity_check(diag({1, 0}), Operator::zero(2), 5) <= 1e-15);
  const Operator one{{1.0}};
  const Operator half{{0.5}};
  CHECK(neumann_identity_check(one, half, 3) == doctest::Approx(1.0 / 1.5 - (1 - 0.5 + 0.25 - 0.125)).epsilon(1e-12));
  CHECK(neumann_identity_check(one, half, 3) == doctest::Approx(0.041666666666666).epsilon(1e-10));
  CHECK_THROWS_AS(neumann_identity_check(one, Operator{{1.5}}, 3), PreconditionError);

  Rng rng(12);
  const Operator t = sample::accretive_with_rank(rng, 5, 5, 0.5);
  const Operator s = Complex(0.3 / oracle::norm2(pseudoinverse(t).pinv.matrix() * t.matrix())) * t;
  const double e = neumann_identity_check(t, s, 20);
  CHECK(e <= 1e-6);
  CHECK(e <= neumann_tail_bound(t, s, 20) * (1 + 1e-8) + 1e-14);
}

TEST_CASE("square pseudoinverse identities") {
  const auto a = square_pinv_identities(diag({1, 2}), Operator::zero(2));
  CHECK(gap(a.value, diag({1, 0.25})) <= 1e-15);
  const auto b = square_pinv_identities(diag({1, 0}), diag({0.3, 0}));
  CHECK(gap(b.value, diag({1.0 / 1.3, 0})) <= 1e-15);

  Rng rng(13);
  int checked = 0;
  for (int trial = 0; trial < 60 && checked < 20; ++trial) {
    const Operator t = sample::accretive_with_rank(rng, 5, 3);
    if (dense::hermitian_min_eigenvalue(dense::hermitian_part((t * t).matrix())) < -1e-10) continue;
    const Operator s = Complex(0.2) * t * t;
    const auto r = square_pinv_identities(t, s);
    CHECK(r.square_identity_gap <= 1e-10 * std::max(1.0, oracle::norm2(r.direct.matrix())));
    CHECK(r.formula_gap <= 1e-8 * std::max(1.0, oracle::norm2(r.direct.matrix())));
    ++checked;
  }
  CHECK(checked > 0);
  CHECK_THROWS_AS(square_pinv_identities(diag({I1, 1}), Operator::zero(2)), HypothesisError);
}

TEST_CASE("second power inequalities") {
  const auto d = second_power_inequalities(diag({1, 0.5}), 200, 1);
  CHECK(d.gamma_t == doctest::Approx(0.5));
  CHECK(d.gamma_t2 == doctest::Approx(0.25));
  CHECK(d.violations == 0);
  const auto id = second_power_inequalities(Operator::identity(3), 50, 2);
  CHECK(id.gamma_slack == doctest::Approx(0.5));
  CHECK(id.violations == 0);

  Rng rng(14);
  int violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Operator t = sample::accretive_with_rank(rng, 12, rng.uniform_int(1, 12));
    violations += second_power_inequalities(t, 20, 1000 + trial).violations;
  }
  CHECK(violations == 0);
}
