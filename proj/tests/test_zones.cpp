#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "deul/zones.hpp"

using namespace deul;

TEST_CASE("symbol values") {
  CHECK(symbol(Family::V, DampingLaw(2.0, 0.0), 13.0, 1.0).m == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(symbol(Family::V, DampingLaw(2.0, 0.5), 0.0, 0.0).m == doctest::Approx(-0.5));
  CHECK(symbol(Family::U, DampingLaw(2.0, 0.5), 0.0, 0.0).m == doctest::Approx(-1.5));
}

TEST_CASE("sqrt consistency and derivative by finite differences") {
  DampingLaw l(1.3, 0.6);
  for (double t : {1.0, 9.0, 120.0}) {
    for (double k : {0.0, 0.01, 0.4, 3.0}) {
      for (Family f : {Family::V, Family::U}) {
        const auto sv = symbol(f, l, t, k);
        CHECK(sv.sqrt_abs_m * sv.sqrt_abs_m == doctest::Approx(std::abs(sv.m)).epsilon(1e-12));
        if (std::abs(sv.m) > 1e-6) {
          const double h = 1e-5 * (1.0 + t);
          const double fd =
              (symbol(f, l, t + h, k).sqrt_abs_m - symbol(f, l, t - h, k).sqrt_abs_m) / (2.0 * h);
          CHECK(sv.d_sqrt_abs_m == doctest::Approx(fd).epsilon(1e-5));
        }
      }
    }
  }
}

TEST_CASE("classification examples") {
  DampingLaw l(2.0, 0.0);
  ZoneConfig cfg(0.1, 2.0, 0.0, 4.0);
  CHECK(classify(Family::V, l, cfg, 5.0, 10.0) == Zone::Hyperbolic);
  CHECK(classify(Family::V, l, cfg, 5.0, 0.5) == Zone::Elliptic);
  CHECK(classify(Family::V, l, cfg, 5.0, 1.0) == Zone::Reduced);
}

TEST_CASE("partition: exactly one tag, stable under small perturbations off-boundary") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  DampingLaw l(1.0, 0.5);
  const ZoneConfig cfg = default_zone_config(l);
  for (int i = 0; i < 2000; ++i) {
    const double t = 1e3 * U(rng);
    const double k = 3.0 * U(rng);
    const Zone z = classify(Family::V, l, cfg, t, k);
    // stability away from boundary curves: perturb k by 1e-7 and require the
    // same tag unless the point sits within 1e-6 of a boundary in k.
    const Zone zp = classify(Family::V, l, cfg, t, k + 1e-7);
    const Zone zm = classify(Family::V, l, cfg, t, std::max(0.0, k - 1e-7));
    if (zp == zm) CHECK(z == zp);
  }
}

TEST_CASE("t_xi special cases") {
  DampingLaw l20(2.0, 0.0);
  ZoneConfig cfg(0.1, 2.0, 0.0, 4.0);
  auto unbounded = t_xi(Family::V, l20, cfg, 0.5);
  REQUIRE(unbounded.has_value());
  CHECK(std::isinf(*unbounded));

  DampingLaw l(1.0, 0.5);
  ZoneConfig cfg10(0.1, 2.0, 10.0, 2.0);
  CHECK(!t_xi(Family::V, l, cfg10, 0.9).has_value());
}

TEST_CASE("t_xi bisection against grid-scan oracle") {
  DampingLaw l(1.0, 0.5);
  ZoneConfig cfg(0.1, 2.0, 10.0, 2.0);
  const double k = 0.01;
  auto res = t_xi(Family::V, l, cfg, k);
  REQUIRE(res.has_value());
  REQUIRE(std::isfinite(*res));
  // brute-force scan with step 1e-4 around the reported boundary
  const double tstar = *res;
  double last_inside = -1.0;
  for (double t = std::max(cfg.t_ell, tstar - 2.0); t <= tstar + 2.0; t += 1e-4) {
    if (classify(Family::V, l, cfg, t, k) == Zone::Elliptic) last_inside = t;
  }
  CHECK(std::abs(last_inside - tstar) <= 2e-4);
  // boundary consistency
  const double d = 1e-6 * (1.0 + tstar);
  CHECK(classify(Family::V, l, cfg, tstar - d, k) == Zone::Elliptic);
  CHECK(classify(Family::V, l, cfg, tstar + d, k) != Zone::Elliptic);
}

TEST_CASE("t_xi monotone in k on its finite domain") {
  DampingLaw l(1.0, 0.5);
  ZoneConfig cfg(0.1, 2.0, 10.0, 2.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double k : {0.002, 0.005, 0.01, 0.02, 0.05}) {
    auto r = t_xi(Family::V, l, cfg, k);
    REQUIRE(r.has_value());
    CHECK(*r <= prev + 1e-6);
    prev = *r;
  }
}

TEST_CASE("xi_t closed-form case and scaling") {
  DampingLaw l(2.0, 0.0);
  ZoneConfig cfg(0.1, 2.0, 0.0, 4.0);
  auto cap = xi_t(Family::V, l, cfg, 5.0);
  REQUIRE(cap.has_value());
  // solve k^2 = b^2/4 - eps^2 b^2 with b = 2, b' = 0
  CHECK(*cap == doctest::Approx(std::sqrt(0.96)).epsilon(1e-10));

  // xi_t ~ (1+t)^(-lambda): fitted bracket over t in [1e2, 1e4]
  DampingLaw lh(1.0, 0.5);
  const ZoneConfig cfgh = default_zone_config(lh);
  double lo = 1e300, hi = 0.0;
  for (double t : {1e2, 3e2, 1e3, 3e3, 1e4}) {
    auto c = xi_t(Family::V, lh, cfgh, t);
    REQUIRE(c.has_value());
    const double r = *c * std::pow(1.0 + t, lh.lambda);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(lo > 0.3);
  CHECK(hi < 0.7);
  const double ratio = xi_t(Family::V, lh, cfgh, 100.0).value() / std::pow(101.0, -0.5);
  CHECK(ratio > 0.3);
  CHECK(ratio < 0.7);

  CHECK(!xi_t(Family::V, lh, ZoneConfig(0.1, 2.0, 10.0, 2.0), 5.0).has_value());
}

TEST_CASE("elliptic bound certification, family V") {
  DampingLaw l(1.0, 0.5);
  const ZoneConfig cfg = default_zone_config(l);
  std::vector<double> tg;
  for (int i = 0; i <= 24; ++i) tg.push_back(1e2 * std::pow(1e3, i / 24.0));
  const std::vector<double> fr = {0.0, 0.1, 0.2, 0.35, 0.5};
  const auto rep = certify_ell_bounds(Family::V, l, cfg, tg, fr);
  CHECK(rep.violations == 0);
  CHECK(rep.min_slack_upper >= -1e-12);
  CHECK(rep.min_slack_lower >= -1e-12);
  CHECK(rep.constant_lower == doctest::Approx(2.5));  // 2 + lambda/mu
  CHECK(rep.remainder_slope == doctest::Approx(-(2.0 - l.lambda)).epsilon(0.07));
}

TEST_CASE("elliptic bound certification, family U with fitted constants") {
  DampingLaw l(1.0, 0.5);
  const ZoneConfig cfg = default_zone_config(l);
  std::vector<double> tg;
  for (int i = 0; i <= 24; ++i) tg.push_back(1e2 * std::pow(1e3, i / 24.0));
  const std::vector<double> fr = {0.0, 0.1, 0.2, 0.35, 0.5};
  const auto rep = certify_ell_bounds(Family::U, l, cfg, tg, fr);
  CHECK(rep.violations == 0);
  CHECK(rep.constant_upper > 0.0);
  CHECK(rep.constant_lower >= rep.constant_upper);
  CHECK(rep.remainder_slope == doctest::Approx(-(2.0 - l.lambda)).epsilon(0.07));
}

TEST_CASE("time-independent symbol: exact certification at lambda=0, k=0") {
  DampingLaw l(1.0, 0.0);
  const ZoneConfig cfg = default_zone_config(l);
  const auto rep = certify_ell_bounds(Family::V, l, cfg, {1.0, 5.0, 25.0}, {0.0});
  CHECK(rep.violations == 0);
  for (const auto& p : rep.points) {
    CHECK(std::abs(p.lhs) <= 1e-14);
    CHECK(p.remainder == 0.0);
  }
}
