#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "deul/damping.hpp"
#include "deul/quadrature.hpp"

using namespace deul;

TEST_CASE("coefficient closed forms") {
  DampingLaw l20(2.0, 0.0);
  CHECK(eval_b(l20, 7.0) == doctest::Approx(2.0).epsilon(1e-15));

  DampingLaw l2h(2.0, 0.5);
  CHECK(eval_b(l2h, 3.0) == doctest::Approx(1.0).epsilon(1e-15));

  DampingLaw l1h(1.0, 0.5);
  CHECK(eval_b(l1h, 0.0) == doctest::Approx(1.0));
  CHECK(eval_db(l1h, 0.0) == doctest::Approx(-0.5));
  CHECK(eval_d2b(l1h, 0.0) == doctest::Approx(0.75));
}

TEST_CASE("construction and domain guards") {
  CHECK_THROWS_AS(DampingLaw(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(DampingLaw(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(DampingLaw(1.0, -0.2), std::invalid_argument);
  DampingLaw l(1.0, 0.5);
  CHECK_THROWS_AS(eval_b(l, -1.0), std::domain_error);
  CHECK_THROWS_AS(integral_b(l, 2.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(integral_inv_b(l, -1.0, 1.0), std::domain_error);
}

TEST_CASE("b is positive, non-increasing, convex") {
  for (double lam : {0.0, 0.3, 0.7, 0.99}) {
    DampingLaw l(1.7, lam);
    for (double t : {0.0, 0.5, 3.0, 44.0, 1e4}) {
      CHECK(eval_b(l, t) > 0.0);
      CHECK(eval_db(l, t) <= 0.0);
      CHECK(eval_d2b(l, t) >= 0.0);
    }
  }
}

TEST_CASE("integral of b") {
  CHECK(integral_b(DampingLaw(2.0, 0.0), 0.0, 5.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(integral_b(DampingLaw(2.0, 0.5), 0.0, 3.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(integral_b(DampingLaw(3.0, 0.8), 2.5, 2.5) == 0.0);
}

TEST_CASE("integral of 1/b") {
  CHECK(integral_inv_b(DampingLaw(2.0, 0.5), 0.0, 3.0) == doctest::Approx(7.0 / 3.0).epsilon(1e-14));
  CHECK(integral_inv_b(DampingLaw(1.0, 0.0), 2.0, 6.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(integral_inv_b(DampingLaw(1.0, 0.9), 4.0, 4.0) == 0.0);
}

TEST_CASE("envelope values") {
  auto e = envelope(DampingLaw(1.0, 0.0), 0.0, 3.0);
  CHECK(e.gamma == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(e.theta == doctest::Approx(0.5).epsilon(1e-15));

  auto id = envelope(DampingLaw(2.0, 0.7), 9.0, 9.0);
  CHECK(id.gamma == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(id.theta == doctest::Approx(std::pow(10.0, -0.7)).epsilon(1e-14));
}

TEST_CASE("envelope long-time slopes") {
  DampingLaw l(1.0, 0.5);
  auto slope = [&](auto f, double t) {
    const double h = 1e-3;
    return (std::log(f(t * (1 + h))) - std::log(f(t))) / std::log1p(h);
  };
  // From s=0 both envelopes ride the Gamma branch; Theta's (1+t)^(-lambda)
  // branch is active when s tracks t.
  auto g = [&](double t) { return envelope(l, 0.0, t).gamma; };
  auto th_near = [&](double t) { return envelope(l, t - 1.0, t).theta; };
  for (double t : {1e3, 1e4}) {
    CHECK(slope(g, t) == doctest::Approx(-0.75).epsilon(0.01));
    CHECK(slope(th_near, t) == doctest::Approx(-0.5).epsilon(0.01));
  }
}

TEST_CASE("semigroup additivity of integral_b") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 50.0);
  for (double lam : {0.0, 0.25, 0.5, 0.9}) {
    DampingLaw l(1.3, lam);
    for (int i = 0; i < 200; ++i) {
      double a = U(rng), b = U(rng), c = U(rng);
      if (a > b) std::swap(a, b);
      if (b > c) std::swap(b, c);
      if (a > b) std::swap(a, b);
      const double lhs = integral_b(l, a, b) + integral_b(l, b, c);
      const double rhs = integral_b(l, a, c);
      CHECK(std::abs(lhs - rhs) <= 1e-13 * (1.0 + std::abs(rhs)));
    }
  }
}

TEST_CASE("envelope ordering and half-time bracket") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double lam : {0.0, 0.5, 0.8}) {
    DampingLaw l(1.0, lam);
    for (int i = 0; i < 300; ++i) {
      const double t = 1.0 + 1e4 * U(rng);
      const double s = U(rng) * t;
      const auto e = envelope(l, s, t);
      CHECK(e.theta <= e.gamma + 1e-16);
      if (s <= 0.5 * t) {
        // Gamma(t,s) ~ (1+t)^(-(1+lambda)/2) for s <= t/2; the sweep-determined
        // bracket is [1, sqrt(2)] for every lambda in [0,1).
        const double ref = std::pow(1.0 + t, -0.5 * (1.0 + lam));
        const double ratio = e.gamma / ref;
        CHECK(ratio >= 1.0 - 1e-12);
        CHECK(ratio <= std::sqrt(2.0) + 1e-12);
      }
    }
  }
}

TEST_CASE("vorticity factor against quadrature oracle") {
  CHECK(vorticity_factor(DampingLaw(2.0, 0.0), 0.0, 1.0) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(vorticity_factor(DampingLaw(1.0, 0.3), 4.0, 4.0) == 1.0);
  CHECK(vorticity_factor(DampingLaw(1.0, 0.5), 0.0, 3.0) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-14));

  for (double lam : {0.0, 0.4, 0.85}) {
    DampingLaw l(1.9, lam);
    for (auto [s, t] : {std::pair{0.0, 7.0}, {2.0, 31.0}, {10.0, 10.5}}) {
      const double oracle =
          std::exp(-integrate_adaptive([&](double x) { return eval_b(l, x); }, s, t, 1e-14));
      CHECK(std::abs(vorticity_factor(l, s, t) - oracle) <= 1e-12 * oracle);
    }
  }
}
