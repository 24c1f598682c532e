#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace deul {

struct OdeTol {
  double rel = 1e-10;
  double abs = 1e-12;
};

struct OdeError : std::runtime_error {
  double t;
  OdeError(const std::string& what, double t_) : std::runtime_error(what), t(t_) {}
};

/// Embedded Dormand-Prince 5(4) pair. Output times are hit exactly by
/// clipping the step, so sampled values carry the full integration accuracy.
/// State is any fixed-size Eigen vector (real or complex scalar).
template <class State, class Rhs>
class Dopri5 {
 public:
  explicit Dopri5(Rhs rhs, OdeTol tol = {}) : rhs_(std::move(rhs)), tol_(tol) {}

  /// Integrate from t0 (y = y0) and invoke sink(i, tout[i], y) at each
  /// requested time. tout must be increasing with tout[0] >= t0.
  template <class Sink>
  void integrate_path(double t0, const State& y0, std::span<const double> tout, Sink&& sink) {
    double t = t0;
    State y = y0;
    State f = rhs_(t, y);
    double h = initial_step(t, y, f, tout.empty() ? t0 : tout.back());
    std::size_t next = 0;
    while (next < tout.size() && tout[next] <= t0) {
      sink(next, tout[next], y);
      ++next;
    }
    while (next < tout.size()) {
      const double t_end = tout[next];
      const double tiny = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
      if (t_end - t <= tiny) {  // already there
        sink(next, t_end, y);
        ++next;
        continue;
      }
      bool clipped = false;
      double h_use = h;
      if (t + h_use >= t_end) {
        h_use = t_end - t;
        clipped = true;
      }
      if (h_use <= tiny) throw OdeError("dopri5: step size underflow at t=" + std::to_string(t), t);

      State y_new, f_new;
      const double err = attempt(t, y, f, h_use, y_new, f_new);
      if (err <= 1.0) {
        t = clipped ? t_end : t + h_use;
        y = y_new;
        f = f_new;
        if (clipped) {
          sink(next, t, y);
          ++next;
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
        h = std::max(h_use * fac, clipped ? h : 0.0);  // keep the controller scale across clips
      } else {
        h = h_use * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
      }
    }
  }

  /// Single-endpoint convenience.
  State integrate_to(double t0, const State& y0, double t1) {
    State out = y0;
    const double ts[1] = {t1};
    integrate_path(t0, y0, std::span<const double>(ts, 1), [&](std::size_t, double, const State& y) { out = y; });
    return out;
  }

 private:
  Rhs rhs_;
  OdeTol tol_;

  double initial_step(double t, const State& y, const State& f, double t_final) const {
    const double span = std::max(t_final - t, 1e-12);
    const double dy = y.cwiseAbs().maxCoeff();
    const double df = f.cwiseAbs().maxCoeff();
    double h = (df > 1e-300) ? 0.01 * (dy + tol_.abs) / df : span / 100.0;
    return std::clamp(h, 1e-8 * (1.0 + std::abs(t)), span);
  }

  // One trial step; returns the scaled error (accept iff <= 1).
  double attempt(double t, const State& y, const State& f0, double h, State& y_out, State& f_out) {
    const State k1 = f0;
    const State k2 = rhs_(t + h / 5.0, y + h * (1.0 / 5.0) * k1);
    const State k3 = rhs_(t + 3.0 * h / 10.0, y + h * ((3.0 / 40.0) * k1 + (9.0 / 40.0) * k2));
    const State k4 = rhs_(t + 4.0 * h / 5.0,
                          y + h * ((44.0 / 45.0) * k1 - (56.0 / 15.0) * k2 + (32.0 / 9.0) * k3));
    const State k5 = rhs_(t + 8.0 * h / 9.0,
                          y + h * ((19372.0 / 6561.0) * k1 - (25360.0 / 2187.0) * k2 +
                                   (64448.0 / 6561.0) * k3 - (212.0 / 729.0) * k4));
    const State k6 = rhs_(t + h, y + h * ((9017.0 / 3168.0) * k1 - (355.0 / 33.0) * k2 +
                                          (46732.0 / 5247.0) * k3 + (49.0 / 176.0) * k4 -
                                          (5103.0 / 18656.0) * k5));
    y_out = y + h * ((35.0 / 384.0) * k1 + (500.0 / 1113.0) * k3 + (125.0 / 192.0) * k4 -
                     (2187.0 / 6784.0) * k5 + (11.0 / 84.0) * k6);
    f_out = rhs_(t + h, y_out);  // FSAL
    const State y4 = y + h * ((5179.0 / 57600.0) * k1 + (7571.0 / 16695.0) * k3 +
                              (393.0 / 640.0) * k4 - (92097.0 / 339200.0) * k5 +
                              (187.0 / 2100.0) * k6 + (1.0 / 40.0) * f_out);
    double err2 = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sc = tol_.abs + tol_.rel * std::max(std::abs(y[i]), std::abs(y_out[i]));
      const double e = std::abs(y_out[i] - y4[i]) / sc;
      err2 += e * e;
    }
    return std::sqrt(err2 / static_cast<double>(y.size()));
  }
};

template <class State, class Rhs>
Dopri5<State, Rhs> make_dopri5(Rhs rhs, OdeTol tol = {}) {
  return Dopri5<State, Rhs>(std::move(rhs), tol);
}

}  // namespace deul
