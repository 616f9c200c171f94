#include "doctest.h"

#include <cmath>
#include <numbers>

#include "opkit/dense.hpp"
#include "opkit/linops.hpp"
#include "opkit/random.hpp"
#include "oracles.hpp"

using namespace opkit;
using std::numbers::pi;

namespace {
const Complex I1{0.0, 1.0};

double gap(const Operator& a, const Operator& b) { return oracle::norm2(a.matrix() - b.matrix()); }
}  // namespace

TEST_CASE("operator construction validates shape and entries") {
  CHECK_THROWS_AS(Operator(Matrix(2, 3)), DimensionError);
  CHECK_THROWS_AS(Operator(Matrix(0, 0)), DimensionError);
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = Complex(NAN, 0.0);
  CHECK_THROWS_AS(Operator{m}, DimensionError);
  m(0, 1) = Complex(0.0, INFINITY);
  CHECK_THROWS_AS(Operator{m}, DimensionError);
  CHECK_THROWS_AS(Operator::identity(2) + Operator::identity(3), DimensionError);
}

TEST_CASE("cartesian parts") {
  SUBCASE("hermitian input has zero imaginary part") {
    const Operator h{{2, 1.0 + I1}, {1.0 - I1, 3}};
    const auto [re, im] = cartesian_parts(h);
    CHECK(gap(re, h) == 0.0);
    CHECK(im.matrix().norm() == 0.0);
  }
  SUBCASE("skew-hermitian input has zero real part") {
    const Operator k{{I1, 1}, {-1, 2.0 * I1}};
    const auto [re, im] = cartesian_parts(k);
    CHECK(re.matrix().norm() == 0.0);
    CHECK(gap(im, Operator(Matrix(-I1 * k.matrix()))) == 0.0);
  }
  SUBCASE("rotation-scaling matrix") {
    const auto [re, im] = cartesian_parts(Operator{{1, 1}, {-1, 1}});
    CHECK(gap(re, Operator::identity(2)) == 0.0);
    CHECK(gap(im, Operator{{0, -I1}, {I1, 0}}) < 1e-15);
  }
  SUBCASE("reconstruction on random input") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const Operator t(sample::gaussian(rng, 7, 7));
      const auto [re, im] = cartesian_parts(t);
      CHECK((re.matrix() - re.matrix().adjoint()).norm() == 0.0);
      CHECK((im.matrix() - im.matrix().adjoint()).norm() == 0.0);
      CHECK(oracle::norm2(re.matrix() + I1 * im.matrix() - t.matrix()) <=
            1e-14 * oracle::norm2(t.matrix()));
    }
  }
}

TEST_CASE("numerical radius") {
  CHECK(numerical_radius(Operator::identity(3)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(numerical_radius(Operator{{0, 1}, {0, 0}}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(numerical_radius(Operator::diagonal(Vector{{1.0, I1}})) ==
        doctest::Approx(1.0).epsilon(1e-12));

  SUBCASE("agrees with an unrefined angle sweep and bounds random samples") {
    Rng rng(11);
    for (int trial = 0; trial < 15; ++trial) {
      const Operator t(sample::gaussian(rng, 5, 5));
      const double w = numerical_radius(t);
      const double swept = oracle::swept_numerical_radius(t.matrix(), 20000);
      CHECK(w >= swept - 1e-12 * w);
      CHECK(w - swept <= 1e-7 * w);
      CHECK(w >= oracle::sampled_numerical_radius(t.matrix(), 2000, 100 + trial) - 1e-12 * w);
    }
  }
  SUBCASE("norm chain r <= w <= ||T|| <= 2w") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
      const Operator t(sample::gaussian(rng, 6, 6));
      const double w = numerical_radius(t);
      const double nt = oracle::norm2(t.matrix());
      const double r = dense::spectral_radius(t.matrix());
      CHECK(r <= w + 1e-10 * nt);
      CHECK(w <= nt + 1e-10 * nt);
      CHECK(nt <= 2.0 * w + 1e-10 * nt);
    }
  }
}

TEST_CASE("numerical range boundary") {
  SUBCASE("diagonal gives the segment between the eigenvalues") {
    for (Complex z : numerical_range_boundary(Operator::diagonal(Vector{{0.0, 1.0}}), 64)) {
      CHECK(std::abs(z.imag()) < 1e-14);
      CHECK(z.real() >= -1e-14);
      CHECK(z.real() <= 1.0 + 1e-14);
    }
  }
  SUBCASE("identity collapses to a point") {
    for (Complex z : numerical_range_boundary(Operator::identity(3), 16))
      CHECK(std::abs(z - 1.0) < 1e-14);
  }
  SUBCASE("nilpotent Jordan block gives the disk of radius 1/2") {
    for (Complex z : numerical_range_boundary(Operator{{0, 1}, {0, 0}}, 90))
      CHECK(std::abs(z) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("fewer than three angles is rejected") {
    CHECK_THROWS_AS(numerical_range_boundary(Operator::identity(2), 2), ParameterError);
  }
  SUBCASE("refinement grows the hull") {
    Rng rng(5);
    const Operator t(sample::gaussian(rng, 5, 5));
    const auto area = [](const std::vector<Complex>& h) {
      double a = 0.0;
      for (std::size_t i = 0; i < h.size(); ++i) {
        const Complex p = h[i], q = h[(i + 1) % h.size()];
        a += p.real() * q.imag() - q.real() * p.imag();
      }
      return 0.5 * a;
    };
    const double a360 = area(convex_hull(numerical_range_boundary(t, 360)));
    const double a720 = area(convex_hull(numerical_range_boundary(t, 720)));
    CHECK(a720 >= a360 - 1e-12);
  }
  SUBCASE("random quadratic forms land inside the hull") {
    Rng rng(6);
    const Operator t(sample::gaussian(rng, 6, 6));
    const auto hull = convex_hull(numerical_range_boundary(t, 720));
    for (int k = 0; k < 1000; ++k) {
      const Vector x = sample::unit_vector(rng, 6);
      CHECK(distance_to_hull(hull, x.dot(t * x)) <= 1e-10);
    }
  }
}

TEST_CASE("accretivity report") {
  SUBCASE("identity") {
    const auto r = accretivity_report(Operator::identity(3));
    CHECK(r.is_accretive);
    CHECK(r.status == SectorStatus::strict);
    CHECK(r.delta == doctest::Approx(1.0));
    CHECK(*r.omega == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.numerical_radius == doctest::Approx(1.0));
  }
  SUBCASE("rotation-scaling witness") {
    const auto r = accretivity_report(Operator{{1, 1}, {-1, 1}});
    CHECK(r.delta == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.operator_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(*r.omega - pi / 4) <= 1e-10);
    CHECK(*r.bound_rhs == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(*r.lambda0_modulus == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("diag(1, 1+i) sits on the pi/4 ray") {
    const auto r = accretivity_report(Operator::diagonal(Vector{{1.0, 1.0 + I1}}));
    CHECK(r.status == SectorStatus::strict);
    CHECK(std::abs(*r.omega - pi / 4) <= 1e-10);
  }
  SUBCASE("singular real part with range outside it gives the half plane") {
    const auto r = accretivity_report(Operator::diagonal(Vector{{1.0, I1}}));
    CHECK(r.is_accretive);
    CHECK(r.status == SectorStatus::half_plane);
    CHECK(*r.omega == doctest::Approx(pi / 2));
    CHECK_FALSE(r.lambda0_modulus.has_value());
  }
  SUBCASE("singular real part with compatible range stays sectorial") {
    const auto r = accretivity_report(Operator::diagonal(Vector{{1.0, 0.0}}));
    CHECK(r.status == SectorStatus::singular_sectorial);
    CHECK(*r.omega == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("not accretive") {
    const auto r = accretivity_report(Operator::diagonal(Vector{{-1.0, 1.0}}));
    CHECK_FALSE(r.is_accretive);
    CHECK(r.status == SectorStatus::not_accretive);
    CHECK_FALSE(r.omega.has_value());
    CHECK(r.delta == doctest::Approx(-1.0));
  }
  SUBCASE("random invariants") {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
      const Operator t(sample::gaussian(rng, 4, 4) +
                       rng.uniform(0.0, 4.0) * Matrix::Identity(4, 4));
      const auto r = accretivity_report(t);
      const double tol = r.tolerance;
      CHECK(r.spectral_radius <= r.numerical_radius + tol);
      CHECK(r.numerical_radius <= r.operator_norm + tol);
      CHECK(r.is_accretive == (r.delta >= -tol));
      if (r.status == SectorStatus::strict) {
        CHECK(*r.omega < pi / 2);
        CHECK(*r.omega <= std::atan(*r.bound_rhs) + 1e-10);
        CHECK(std::tan(*r.omega) == doctest::Approx(*r.lambda0_modulus).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("sectorial samples have the prescribed half-angle") {
  Rng rng(31);
  for (double tan_half : {0.0, 0.3, 1.0, 5.0}) {
    const Operator t = sample::sectorial(rng, 6, tan_half);
    CHECK(std::abs(*accretivity_report(t).omega - std::atan(tan_half)) <= 1e-10);
  }
}

TEST_CASE("kato representation") {
  CHECK(kato_representation(Operator::identity(3)).matrix().norm() <= 1e-15);
  const Operator k = kato_representation(Operator{{1, 1}, {-1, 1}});
  CHECK(gap(k, Operator{{0, -I1}, {I1, 0}}) <= 1e-14);
  CHECK(oracle::norm2(k.matrix()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(kato_representation(Operator::diagonal(Vector{{1.0, I1}})), PreconditionError);

  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Operator t = sample::accretive(rng, 6, 0.3);
    const Operator tk = kato_representation(t);
    const auto [re, im] = cartesian_parts(t);
    const Matrix half = oracle::eigen_sqrt(re.matrix());
    const Matrix rebuilt = half * (Matrix::Identity(6, 6) + I1 * tk.matrix()) * half;
    CHECK(oracle::norm2(rebuilt - t.matrix()) <= 1e-12 * oracle::norm2(t.matrix()));
    CHECK(std::abs(std::tan(*accretivity_report(t).omega) - oracle::norm2(tk.matrix())) <= 1e-10);
  }
}

TEST_CASE("spectral inclusion") {
  CHECK(spectral_inclusion_check(Operator::diagonal(Vector{{1.0, I1, -2.0}})));
  CHECK(spectral_inclusion_check(Operator{{0, 1}, {0, 0}}));
  Rng rng(51);
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial)
    if (!spectral_inclusion_check(Operator(sample::gaussian(rng, 8, 8)))) ++failures;
  CHECK(failures == 0);
}
