#include "deul/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "deul/parallel.hpp"
#include "deul/propagator.hpp"
#include "deul/quadrature.hpp"

namespace deul {

namespace {

double surface_measure(int n) {  // |S^{n-1}|
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

double plancherel_cn(int n) { return surface_measure(n) / std::pow(2.0 * std::numbers::pi, n); }

double glue(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

void check_dim(int n) {
  if (n < 2) throw std::invalid_argument("spectra: dimension must be >= 2");
}

}  // namespace

double smooth_cutoff(double k, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("smooth_cutoff: R must be positive");
  if (k <= R) return 1.0;
  if (k >= 2.0 * R) return 0.0;
  const double y = (2.0 * R - k) / R;  // 1 at k=R, 0 at k=2R
  return glue(y) / (glue(y) + glue(1.0 - y));
}

RadialProfile make_profile(ProfileKind kind, double param_a, double param_b, int n,
                           GridSpec grid) {
  check_dim(n);
  if (!(grid.k_min > 0.0) || !(grid.k_max > grid.k_min) || grid.panels < 1)
    throw std::invalid_argument("make_profile: bad grid spec");
  RadialProfile p;
  p.n = n;
  const int nodes = 4 * grid.panels;
  p.nodes.resize(nodes);
  p.weights.resize(nodes);
  p.amp.resize(nodes);
  const double ratio = grid.k_max / grid.k_min;
  for (int q = 0; q < grid.panels; ++q) {
    const double lo = grid.k_min * std::pow(ratio, double(q) / grid.panels);
    const double hi = grid.k_min * std::pow(ratio, double(q + 1) / grid.panels);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < 4; ++i) {
      const int idx = 4 * q + i;
      const double k = mid + half * Gauss4::nodes[i];
      p.nodes[idx] = k;
      p.weights[idx] = half * Gauss4::weights[i] * std::pow(k, n - 1);
    }
  }
  switch (kind) {
    case ProfileKind::Hat: {
      if (!(param_a > 0.0)) throw std::invalid_argument("make_profile: hat needs R > 0");
      p.cutoff_R = param_a;
      for (int j = 0; j < nodes; ++j) p.amp[j] = smooth_cutoff(p.nodes[j], param_a);
      break;
    }
    case ProfileKind::Gaussian: {
      if (!(param_a > 0.0)) throw std::invalid_argument("make_profile: gaussian needs sigma > 0");
      for (int j = 0; j < nodes; ++j)
        p.amp[j] = std::exp(-p.nodes[j] * p.nodes[j] / (2.0 * param_a * param_a));
      break;
    }
    case ProfileKind::Annulus: {
      if (!(param_a > 0.0) || !(param_b > param_a))
        throw std::invalid_argument("make_profile: annulus needs 0 < a < b");
      for (int j = 0; j < nodes; ++j) {
        const double x = (p.nodes[j] - param_a) / (param_b - param_a);
        p.amp[j] = (x > 0.0 && x < 1.0) ? std::exp(4.0 - 1.0 / (x * (1.0 - x))) : 0.0;
      }
      break;
    }
  }
  return p;
}

std::pair<RadialProfile, RadialProfile> split(const RadialProfile& p, double R) {
  RadialProfile low = p, high = p;
  low.cutoff_R = R;
  high.cutoff_R = R;
  for (int j = 0; j < p.nodes.size(); ++j) {
    const double chi = smooth_cutoff(p.nodes[j], R);
    low.amp[j] = chi * p.amp[j];
    high.amp[j] = (1.0 - chi) * p.amp[j];
  }
  return {low, high};
}

double l2_norm(const RadialProfile& p, int deriv_order) {
  if (deriv_order < 0) throw std::invalid_argument("l2_norm: order must be >= 0");
  const int n = static_cast<int>(p.nodes.size());
  std::vector<double> terms(n);
  for (int j = 0; j < n; ++j)
    terms[j] = p.weights[j] * std::pow(p.nodes[j], 2.0 * deriv_order) * p.amp[j] * p.amp[j];
  return std::sqrt(plancherel_cn(p.n) * pairwise_sum(terms.data(), terms.size()));
}

double l1hat_norm(const RadialProfile& p, int deriv_order) {
  if (deriv_order < 0) throw std::invalid_argument("l1hat_norm: order must be >= 0");
  const int n = static_cast<int>(p.nodes.size());
  std::vector<double> terms(n);
  for (int j = 0; j < n; ++j)
    terms[j] = p.weights[j] * std::pow(p.nodes[j], deriv_order) * std::abs(p.amp[j]);
  return plancherel_cn(p.n) * pairwise_sum(terms.data(), terms.size());
}

SlopeFit fit_slope(const NormSeries& series, double t_lo, double t_hi) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < series.t.size(); ++i) {
    if (series.t[i] < t_lo || series.t[i] > t_hi) continue;
    if (!(series.value[i] > 0.0)) continue;
    xs.push_back(std::log(series.t[i]));
    ys.push_back(std::log(series.value[i]));
  }
  const int n = static_cast<int>(xs.size());
  if (n < 8) throw std::invalid_argument("fit_slope: need at least 8 samples in the window");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  SlopeFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  const double den = n * sxx - sx * sx;
  fit.exponent = (n * sxy - sx * sy) / den;
  const double icept = (sy - fit.exponent * sx) / n;
  double ss = 0.0, sxc = 0.0;
  const double xbar = sx / n;
  for (int i = 0; i < n; ++i) {
    const double r = ys[i] - (icept + fit.exponent * xs[i]);
    ss += r * r;
    sxc += (xs[i] - xbar) * (xs[i] - xbar);
  }
  fit.stderr_ = (n > 2) ? std::sqrt(ss / (n - 2) / sxc) : 0.0;
  return fit;
}

EvolvedAmplitudes evolve_amplitudes(const DampingLaw& law, const RadialProfile& profile_v,
                                    const RadialProfile& profile_u, double s,
                                    std::span<const double> t_grid, unsigned threads, OdeTol tol) {
  if (profile_v.nodes.size() != profile_u.nodes.size())
    throw std::invalid_argument("evolve_amplitudes: profiles must share nodes");
  const int nn = static_cast<int>(profile_v.nodes.size());
  const int nt = static_cast<int>(t_grid.size());
  EvolvedAmplitudes out;
  out.t.assign(t_grid.begin(), t_grid.end());
  out.v = Eigen::ArrayXXd::Zero(nt, nn);
  out.u = Eigen::ArrayXXd::Zero(nt, nn);
  parallel_for(
      static_cast<std::size_t>(nn),
      [&](std::size_t j) {
        const double a_v = profile_v.amp[j], a_u = profile_u.amp[j];
        if (a_v == 0.0 && a_u == 0.0) return;
        const auto gs = green_path(law, profile_v.nodes[j], s, t_grid, tol);
        for (int i = 0; i < nt; ++i) {
          out.v(i, j) = gs[i].g(0, 0) * a_v + gs[i].g(0, 1) * a_u;
          out.u(i, j) = gs[i].g(1, 0) * a_v + gs[i].g(1, 1) * a_u;
        }
      },
      threads);
  return out;
}

std::vector<NormSeries> evolve_norms(const DampingLaw& law, int n, const RadialProfile& profile_v,
                                     const RadialProfile& profile_u, const RadialProfile& profile_w,
                                     double s, std::span<const double> t_grid,
                                     std::span<const int> orders, unsigned threads, OdeTol tol) {
  check_dim(n);
  if (profile_v.n != n || profile_u.n != n || profile_w.n != n)
    throw std::invalid_argument("evolve_norms: dimension mismatch");
  const auto ev = evolve_amplitudes(law, profile_v, profile_u, s, t_grid, threads, tol);
  const int nt = static_cast<int>(t_grid.size());

  std::vector<NormSeries> series;
  RadialProfile scratch = profile_v;
  auto push = [&](const std::string& label, auto&& value_at) {
    NormSeries ns;
    ns.label = label;
    ns.t = ev.t;
    ns.value.resize(nt);
    for (int i = 0; i < nt; ++i) ns.value[i] = value_at(i);
    series.push_back(std::move(ns));
  };

  for (int a : orders) {
    push("v:l2:a" + std::to_string(a), [&](int i) {
      scratch.amp = ev.v.row(i).transpose();
      return l2_norm(scratch, a);
    });
    push("v:l1hat:a" + std::to_string(a), [&](int i) {
      scratch.amp = ev.v.row(i).transpose();
      return l1hat_norm(scratch, a);
    });
    push("u:l2:a" + std::to_string(a), [&](int i) {
      scratch.amp = ev.u.row(i).transpose();
      return l2_norm(scratch, a);
    });
    push("u:l1hat:a" + std::to_string(a), [&](int i) {
      scratch.amp = ev.u.row(i).transpose();
      return l1hat_norm(scratch, a);
    });
    push("w:l2:a" + std::to_string(a), [&](int i) {
      return vorticity_factor(law, s, ev.t[i]) * l2_norm(profile_w, a);
    });
  }
  return series;
}

}  // namespace deul
