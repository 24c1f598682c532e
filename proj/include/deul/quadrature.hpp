#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace deul {

/// 8-point Gauss-Legendre rule on [-1,1].
struct Gauss8 {
  static constexpr std::array<double, 8> nodes = {
      -0.9602898564975362316835609, -0.7966664774136267395915539,
      -0.5255324099163289858177390, -0.1834346424956498049394761,
      0.1834346424956498049394761,  0.5255324099163289858177390,
      0.7966664774136267395915539,  0.9602898564975362316835609};
  static constexpr std::array<double, 8> weights = {
      0.1012285362903762591525314, 0.2223810344533744705443560,
      0.3137066458778872873379622, 0.3626837833783619829651504,
      0.3626837833783619829651504, 0.3137066458778872873379622,
      0.2223810344533744705443560, 0.1012285362903762591525314};
};

/// 4-point Gauss-Legendre rule on [-1,1].
struct Gauss4 {
  static constexpr std::array<double, 4> nodes = {
      -0.8611363115940525752239465, -0.3399810435848562648026658,
      0.3399810435848562648026658, 0.8611363115940525752239465};
  static constexpr std::array<double, 4> weights = {
      0.3478548451374538573730639, 0.6521451548625461426269361,
      0.6521451548625461426269361, 0.3478548451374538573730639};
};

namespace detail {

template <class F>
double gauss_kronrod_15(F&& f, double a, double b, double& err) {
  // Kronrod 15 nodes/weights with embedded Gauss 7.
  static const double xk[8] = {0.0,
                               0.2077849550078984676006894,
                               0.4058451513773971669066064,
                               0.5860872354676911302941448,
                               0.7415311855993944398638648,
                               0.8648644233597690727897128,
                               0.9491079123427585245261897,
                               0.9914553711208126392068547};
  static const double wk[8] = {0.2094821410847278280129992, 0.2044329400752988924141620,
                               0.1903505780647854099132564, 0.1690047266392679028265834,
                               0.1406532597155259187451896, 0.1047900103222501838398763,
                               0.0630920926299785532907007, 0.0229353220105292249637320};
  static const double wg[4] = {0.4179591836734693877551020, 0.3818300505051189449503698,
                               0.2797053914892766679014678, 0.1294849661688696932706114};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = wk[0] * fc;
  double resg = wg[0] * fc;
  for (int j = 1; j < 8; ++j) {
    const double fv = f(c - h * xk[j]) + f(c + h * xk[j]);
    resk += wk[j] * fv;
    if (j % 2 == 0) resg += wg[j / 2] * fv;
  }
  err = std::abs(resk - resg) * h;
  return resk * h;
}

template <class F>
double adapt(F&& f, double a, double b, double tol, int depth) {
  double err;
  const double whole = gauss_kronrod_15(f, a, b, err);
  if (err <= tol || depth > 48) return whole;
  const double m = 0.5 * (a + b);
  return adapt(f, a, m, tol * 0.5, depth + 1) + adapt(f, m, b, tol * 0.5, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod quadrature of f over [a,b].
template <class F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-12) {
  if (!(b >= a)) throw std::domain_error("integrate_adaptive: need a <= b");
  if (a == b) return 0.0;
  return detail::adapt(f, a, b, tol * std::max(1.0, b - a), 0);
}

/// Pairwise (cascade) summation; deterministic for a fixed index order.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace deul
