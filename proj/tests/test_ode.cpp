#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "deul/ode.hpp"

using namespace deul;
using Eigen::Vector2d;

TEST_CASE("exponential decay") {
  auto rhs = [](double, const Vector2d& y) { return Vector2d(-y[0], -2.0 * y[1]); };
  auto solver = make_dopri5<Vector2d>(rhs, OdeTol{1e-11, 1e-13});
  const Vector2d y = solver.integrate_to(0.0, Vector2d(1.0, 1.0), 3.0);
  CHECK(y[0] == doctest::Approx(std::exp(-3.0)).epsilon(1e-10));
  CHECK(y[1] == doctest::Approx(std::exp(-6.0)).epsilon(1e-10));
}

TEST_CASE("harmonic oscillator over many periods") {
  const double w = 5.0;
  auto rhs = [w](double, const Vector2d& y) { return Vector2d(y[1], -w * w * y[0]); };
  auto solver = make_dopri5<Vector2d>(rhs, OdeTol{1e-10, 1e-12});
  const double T = 40.0;
  const Vector2d y = solver.integrate_to(0.0, Vector2d(1.0, 0.0), T);
  CHECK(y[0] == doctest::Approx(std::cos(w * T)).epsilon(1e-7));
  CHECK(y[1] == doctest::Approx(-w * std::sin(w * T)).epsilon(1e-7));
}

TEST_CASE("path output hits requested times exactly") {
  auto rhs = [](double t, const Vector2d& y) { return Vector2d(y[1], -y[0] / (1.0 + t)); };
  auto solver = make_dopri5<Vector2d>(rhs);
  std::vector<double> tout = {0.0, 0.5, 1.0, 2.0, 7.0, 19.0};
  std::vector<double> seen;
  solver.integrate_path(0.0, Vector2d(1.0, 0.0), tout,
                        [&](std::size_t, double t, const Vector2d&) { seen.push_back(t); });
  REQUIRE(seen.size() == tout.size());
  for (std::size_t i = 0; i < tout.size(); ++i) CHECK(seen[i] == tout[i]);
}

TEST_CASE("fifth order convergence on a smooth problem") {
  // integrate y' = cos(t) y with fixed tolerances scaled down; compare the
  // achieved error against the analytic solution e^{sin t}.
  auto rhs = [](double t, const Eigen::Matrix<double, 1, 1>& y) {
    return Eigen::Matrix<double, 1, 1>(std::cos(t) * y[0]);
  };
  using V1 = Eigen::Matrix<double, 1, 1>;
  double prev_err = 0.0;
  for (int p = 0; p < 2; ++p) {
    const double rtol = (p == 0) ? 1e-6 : 1e-9;
    auto solver = make_dopri5<V1>(rhs, OdeTol{rtol, 1e-14});
    const V1 y = solver.integrate_to(0.0, V1(1.0), 10.0);
    const double err = std::abs(y[0] - std::exp(std::sin(10.0)));
    if (p == 1) CHECK(err < prev_err);
    CHECK(err <= 50.0 * rtol);
    prev_err = err;
  }
}

TEST_CASE("complex state") {
  using V1c = Eigen::Matrix<std::complex<double>, 1, 1>;
  const std::complex<double> i(0.0, 1.0);
  auto rhs = [i](double, const V1c& y) { return V1c(i * y[0]); };
  auto solver = make_dopri5<V1c>(rhs, OdeTol{1e-11, 1e-13});
  const V1c y = solver.integrate_to(0.0, V1c(1.0), 2.0);
  CHECK(std::abs(y[0] - std::exp(i * 2.0)) <= 1e-9);
}
