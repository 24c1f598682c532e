#include "deul/propagator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace deul {

namespace {

using Eigen::Matrix2d;
using Eigen::Vector4d;

// Rescaling y -> e^{(1/2) int b} y removes the first-order term; safe only
// when the rescaled amplitude stays bounded, i.e. when the symbol is
// hyperbolic along the whole ray. k^2 >= N^2 b(s)^2 + b(s)^2/4 + |b'(s)|/2
// guarantees m_{v,u}(tau,k) >= N^2 b(tau)^2 for all tau >= s.
constexpr double kHypN = 2.0;

bool use_rescaled(const DampingLaw& law, double k, double s) {
  const double b = eval_b(law, s);
  const double db = std::abs(eval_db(law, s));
  return k * k >= (kHypN * kHypN + 0.25) * b * b + 0.5 * db;
}

template <class Rhs, class Sink>
void integrate_columns(Rhs&& rhs, double s, const Vector4d& y0, std::span<const double> t_grid,
                       OdeTol tol, double k, Sink&& sink) {
  auto solver = make_dopri5<Vector4d>(std::forward<Rhs>(rhs), tol);
  try {
    solver.integrate_path(s, y0, t_grid, std::forward<Sink>(sink));
  } catch (const OdeError& e) {
    throw OdeError(std::string(e.what()) + " (k=" + std::to_string(k) + ")", e.t);
  }
}

void check_grid(double s, std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("propagator: empty time grid");
  if (!(s >= 0.0)) throw std::domain_error("propagator: s must be nonnegative");
  double prev = s;
  for (double t : t_grid) {
    if (t < prev) throw std::invalid_argument("propagator: time grid must be increasing, >= s");
    prev = t;
  }
}

}  // namespace

Multipliers solve_multipliers(Family family, const DampingLaw& law, double k, double s,
                              std::span<const double> t_grid, OdeTol tol) {
  if (!(k >= 0.0)) throw std::domain_error("solve_multipliers: k must be nonnegative");
  check_grid(s, t_grid);

  Multipliers out;
  out.family = family;
  out.k = k;
  out.s = s;
  out.t.assign(t_grid.begin(), t_grid.end());
  const std::size_t n = out.t.size();
  out.phi1.resize(n);
  out.dphi1.resize(n);
  out.phi2.resize(n);
  out.dphi2.resize(n);

  const double kk = k * k;
  if (use_rescaled(law, k, s)) {
    auto rhs = [&law, kk, family](double t, const Vector4d& y) {
      const double b = eval_b(law, t);
      const double db = eval_db(law, t);
      const double sgn = (family == Family::V) ? -1.0 : 1.0;
      const double m = kk - 0.25 * b * b + 0.5 * sgn * db;
      return Vector4d(y[1], -m * y[0], y[3], -m * y[2]);
    };
    const double bs = eval_b(law, s);
    const Vector4d y0(1.0, 0.5 * bs, 0.0, 1.0);
    integrate_columns(rhs, s, y0, t_grid, tol, k, [&](std::size_t i, double t, const Vector4d& y) {
      const double E = std::exp(-0.5 * integral_b(law, s, t));
      const double bt = eval_b(law, t);
      out.phi1[i] = E * y[0];
      out.dphi1[i] = E * (y[1] - 0.5 * bt * y[0]);
      out.phi2[i] = E * y[2];
      out.dphi2[i] = E * (y[3] - 0.5 * bt * y[2]);
    });
  } else {
    auto rhs = [&law, kk, family](double t, const Vector4d& y) {
      const double b = eval_b(law, t);
      const double c = kk + ((family == Family::U) ? eval_db(law, t) : 0.0);
      return Vector4d(y[1], -c * y[0] - b * y[1], y[3], -c * y[2] - b * y[3]);
    };
    const Vector4d y0(1.0, 0.0, 0.0, 1.0);
    integrate_columns(rhs, s, y0, t_grid, tol, k, [&](std::size_t i, double, const Vector4d& y) {
      out.phi1[i] = y[0];
      out.dphi1[i] = y[1];
      out.phi2[i] = y[2];
      out.dphi2[i] = y[3];
    });
  }
  return out;
}

std::vector<GreenMatrix> green_path(const DampingLaw& law, double k, double s,
                                    std::span<const double> t_grid, OdeTol tol) {
  if (!(k >= 0.0)) throw std::domain_error("green_path: k must be nonnegative");
  check_grid(s, t_grid);
  std::vector<GreenMatrix> out(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    out[i].k = k;
    out[i].s = s;
    out[i].t = t_grid[i];
  }
  if (use_rescaled(law, k, s)) {
    // traceless rescaled system d/dt Gt = [[b/2, -k], [k, -b/2]] Gt
    auto rhs = [&law, k](double t, const Vector4d& y) {
      const double h = 0.5 * eval_b(law, t);
      return Vector4d(h * y[0] - k * y[1], k * y[0] - h * y[1], h * y[2] - k * y[3],
                      k * y[2] - h * y[3]);
    };
    const Vector4d y0(1.0, 0.0, 0.0, 1.0);  // columns (v,u) of the identity
    integrate_columns(rhs, s, y0, t_grid, tol, k, [&](std::size_t i, double t, const Vector4d& y) {
      const double E = std::exp(-0.5 * integral_b(law, s, t));
      out[i].g << E * y[0], E * y[2], E * y[1], E * y[3];
    });
  } else {
    auto rhs = [&law, k](double t, const Vector4d& y) {
      const double b = eval_b(law, t);
      return Vector4d(-k * y[1], k * y[0] - b * y[1], -k * y[3], k * y[2] - b * y[3]);
    };
    const Vector4d y0(1.0, 0.0, 0.0, 1.0);
    integrate_columns(rhs, s, y0, t_grid, tol, k, [&](std::size_t i, double, const Vector4d& y) {
      out[i].g << y[0], y[2], y[1], y[3];
    });
  }
  return out;
}

GreenMatrix green(const DampingLaw& law, double k, double s, double t, OdeTol tol) {
  const double ts[1] = {t};
  return green_path(law, k, s, std::span<const double>(ts, 1), tol)[0];
}

GreenMatrix reconstruct_green(const Multipliers& mult_v, const Multipliers& mult_u,
                              const DampingLaw& law, std::size_t sample) {
  if (mult_v.family != Family::V || mult_u.family != Family::U)
    throw std::invalid_argument("reconstruct_green: need a (V,U) pair");
  if (mult_v.k != mult_u.k || mult_v.s != mult_u.s)
    throw std::invalid_argument("reconstruct_green: multiplier records disagree on (k,s)");
  if (sample >= mult_v.size() || sample >= mult_u.size() || mult_v.t[sample] != mult_u.t[sample])
    throw std::invalid_argument("reconstruct_green: multiplier records disagree on t");

  const double k = mult_v.k;
  const double bs = eval_b(law, mult_v.s);
  GreenMatrix G;
  G.k = k;
  G.s = mult_v.s;
  G.t = mult_v.t[sample];
  G.g << mult_v.phi1[sample], -k * mult_v.phi2[sample], k * mult_u.phi2[sample],
      mult_u.phi1[sample] - bs * mult_u.phi2[sample];
  return G;
}

double translation_probe(const DampingLaw& law, double k, double s, double t, OdeTol tol) {
  detail::require_interval(s, t);
  const Matrix2d a = green(law, k, s, t, tol).g;
  const Matrix2d b = green(law, k, 0.0, t - s, tol).g;
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace deul
