#include "deul/zones.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace deul {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double bisect(double lo, double hi, const std::function<double(double)>& g, double tol_abs) {
  double glo = g(lo);
  for (int it = 0; it < 200 && hi - lo > tol_abs; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((glo > 0.0) == (gm > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const char* zone_name(Zone z) {
  switch (z) {
    case Zone::Hyperbolic: return "hyperbolic";
    case Zone::PseudoDiff: return "pseudodiff";
    case Zone::Reduced: return "reduced";
    case Zone::Elliptic: return "elliptic";
    case Zone::BoundedResidual: return "bounded_residual";
  }
  return "?";
}

ZoneConfig::ZoneConfig(double eps_, double bigN_, double t_ell_, double c0_)
    : eps(eps_), bigN(bigN_), t_ell(t_ell_), c0(c0_) {
  if (!(eps > 0.0) || !(bigN > eps)) throw std::invalid_argument("ZoneConfig: need 0 < eps < N");
  if (!(t_ell >= 0.0)) throw std::invalid_argument("ZoneConfig: t_ell must be nonnegative");
  if (!(c0 > 0.0)) throw std::invalid_argument("ZoneConfig: c0 must be positive");
}

ZoneConfig default_zone_config(const DampingLaw& law) {
  ZoneConfig cfg;
  cfg.eps = 0.1;
  cfg.bigN = 2.0;
  cfg.c0 = law.mu * cfg.bigN;
  // smallest t with |b'|/b^2 = (lambda/mu)(1+t)^(lambda-1) <= 1/8
  if (law.lambda == 0.0) {
    cfg.t_ell = 0.0;
  } else {
    const double x = 8.0 * law.lambda / law.mu;  // (1+t)^(1-lambda) >= x
    cfg.t_ell = std::max(0.0, std::pow(x, 1.0 / (1.0 - law.lambda)) - 1.0);
  }
  return cfg;
}

SymbolValue symbol(Family family, const DampingLaw& law, double t, double k) {
  detail::require_time(t);
  if (!(k >= 0.0)) throw std::domain_error("symbol: k must be nonnegative");
  const double b = eval_b(law, t);
  const double db = eval_db(law, t);
  const double d2b = eval_d2b(law, t);
  const double sgn = (family == Family::V) ? -1.0 : 1.0;
  const double m = k * k - 0.25 * b * b + 0.5 * sgn * db;
  const double dm = -0.5 * b * db + 0.5 * sgn * d2b;
  const double am = std::abs(m);
  const double sq = std::sqrt(am);
  const double dsq = (am > 0.0) ? ((m >= 0.0 ? dm : -dm) / (2.0 * sq)) : 0.0;
  return SymbolValue{m, sq, dsq, dm};
}

Zone classify(Family family, const DampingLaw& law, const ZoneConfig& cfg, double t, double k) {
  const SymbolValue sv = symbol(family, law, t, k);
  const double eb = cfg.eps * eval_b(law, t);
  const double Nb = cfg.bigN * eval_b(law, t);
  if (sv.m <= 0.0 && sv.sqrt_abs_m >= eb && t >= cfg.t_ell) return Zone::Elliptic;
  if (sv.sqrt_abs_m <= eb) return Zone::Reduced;
  if (sv.m <= 0.0) return Zone::BoundedResidual;  // t < t_ell here
  if (sv.sqrt_abs_m <= Nb) return Zone::PseudoDiff;
  return Zone::Hyperbolic;
}

std::optional<double> t_xi(Family family, const DampingLaw& law, const ZoneConfig& cfg, double k) {
  if (!(k >= 0.0)) throw std::domain_error("t_xi: k must be nonnegative");
  auto inside = [&](double t) { return classify(family, law, cfg, t, k) == Zone::Elliptic; };
  // |m| - eps^2 b^2 with the elliptic sign convention (positive inside the zone)
  auto gap = [&](double t) {
    const SymbolValue sv = symbol(family, law, t, k);
    const double b = eval_b(law, t);
    return -sv.m - cfg.eps * cfg.eps * b * b;
  };
  if (k == 0.0) return kInf;
  if (law.lambda == 0.0) {
    if (inside(cfg.t_ell)) return kInf;
    return std::nullopt;
  }
  // b(t) -> 0, so the fiber is bounded; scan geometrically until m must be positive.
  double last_in = -1.0, first_out_after_in = -1.0;
  double t = cfg.t_ell;
  const double step = 1.05;
  for (int it = 0; it < 4000; ++it) {
    const double b = eval_b(law, t);
    const double db = std::abs(eval_db(law, t));
    if (inside(t)) {
      last_in = t;
      first_out_after_in = -1.0;
    } else if (last_in >= 0.0 && first_out_after_in < 0.0) {
      first_out_after_in = t;
    }
    if (b <= k && db <= 0.5 * k * k && last_in >= 0.0) break;
    if (b <= k && db <= 0.5 * k * k && t > 4.0 * (cfg.t_ell + 1.0)) break;
    t = (1.0 + t) * step - 1.0;
  }
  if (last_in < 0.0) return std::nullopt;
  if (first_out_after_in < 0.0) return kInf;  // never left within the scan horizon
  std::function<double(double)> g = gap;
  return bisect(last_in, first_out_after_in, g, 1e-9);
}

std::optional<double> xi_t(Family family, const DampingLaw& law, const ZoneConfig& cfg, double t) {
  if (t < cfg.t_ell) return std::nullopt;
  const double b = eval_b(law, t);
  auto gap = [&](double k) {
    const SymbolValue sv = symbol(family, law, t, k);
    return -sv.m - cfg.eps * cfg.eps * b * b;
  };
  if (gap(0.0) < 0.0) return std::nullopt;  // slice empty
  double hi = b;
  while (gap(hi) > 0.0) hi *= 2.0;  // |m| decreases in k, so this terminates fast
  std::function<double(double)> g = gap;
  return bisect(0.0, hi, g, 1e-12 * (1.0 + b));
}

EllBoundReport certify_ell_bounds(Family family, const DampingLaw& law, const ZoneConfig& cfg,
                                  const std::vector<double>& t_grid,
                                  const std::vector<double>& k_fractions) {
  EllBoundReport rep;
  rep.family = family;
  rep.violations = 0;

  struct Raw {
    double t, k, frac, lhs, b, db, rem0;  // rem0: exact residual at this point
  };
  std::vector<Raw> raw;
  std::vector<double> rem_by_t(t_grid.size(), 0.0);

  for (std::size_t it = 0; it < t_grid.size(); ++it) {
    const double t = t_grid[it];
    const auto cap = xi_t(family, law, cfg, t);
    if (!cap) throw std::invalid_argument("certify_ell_bounds: empty elliptic slice at t");
    for (double frac : k_fractions) {
      const double k = frac * (*cap);
      if (classify(family, law, cfg, t, k) != Zone::Elliptic)
        throw std::invalid_argument("certify_ell_bounds: grid point not elliptic");
      const SymbolValue sv = symbol(family, law, t, k);
      const double b = eval_b(law, t);
      const double db = eval_db(law, t);
      const double lhs = sv.sqrt_abs_m + sv.d_sqrt_abs_m / (2.0 * sv.sqrt_abs_m) - 0.5 * b;
      double rem0;
      if (family == Family::V) {
        rem0 = std::abs(eval_d2b(law, t) / (8.0 * std::abs(sv.m)));
      } else {
        // exact deviation of the u-symbol expression from its leading term
        const double lead = -k * k / (sv.sqrt_abs_m + 0.5 * b);
        rem0 = std::abs(lhs - lead);
      }
      raw.push_back(Raw{t, k, frac, lhs, b, db, rem0});
      if (k == 0.0 || family == Family::V) rem_by_t[it] = std::max(rem_by_t[it], rem0);
    }
  }

  const double C3 = law.lambda / law.mu;  // max_t |b'|/b^2
  const double rem_pow = law.lambda - 2.0;

  // train on even indices, validate on odd; fitted constants come from the
  // training half only.
  auto env_rem = [&](double t, double C) { return C * std::pow(1.0 + t, rem_pow); };

  double Cr = 0.0, C1 = kInf, C2 = 0.0;
  if (family == Family::V) {
    for (std::size_t i = 0; i < raw.size(); i += 2) {
      const Raw& p = raw[i];
      const double lower_bare = -p.k * p.k * (2.0 + C3) / p.b + p.db / p.b;
      Cr = std::max(Cr, std::max(0.0, lower_bare - p.lhs) * std::pow(1.0 + p.t, -rem_pow));
    }
    Cr *= 1.5;
  } else {
    // Coefficient bracket from the training points where the k^2 term
    // dominates; a second pass fits the power-law remainder around it.
    for (std::size_t i = 0; i < raw.size(); i += 2) {
      const Raw& p = raw[i];
      if (p.frac < 0.3) continue;
      const double c = -p.lhs * p.b / (p.k * p.k);
      C1 = std::min(C1, c);
      C2 = std::max(C2, c);
    }
    if (!std::isfinite(C1)) throw std::invalid_argument("certify_ell_bounds: need k fractions >= 0.3");
    for (std::size_t i = 0; i < raw.size(); i += 2) {
      const Raw& p = raw[i];
      const double kk_b = p.k * p.k / p.b;
      const double need_up = std::max(0.0, p.lhs - (-kk_b * C1));
      const double need_lo = std::max(0.0, (-kk_b * C2) - p.lhs);
      Cr = std::max(Cr, std::max(need_up, need_lo) * std::pow(1.0 + p.t, -rem_pow));
    }
    Cr *= 1.5;
  }

  rep.remainder_C = Cr;
  rep.constant_upper = (family == Family::V) ? 1.0 : C1;
  rep.constant_lower = (family == Family::V) ? 2.0 + C3 : C2;
  rep.min_slack_upper = kInf;
  rep.min_slack_lower = kInf;

  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Raw& p = raw[i];
    EllBoundPoint pt;
    pt.t = p.t;
    pt.k = p.k;
    pt.lhs = p.lhs;
    pt.remainder = p.rem0;
    const double kk_b = p.k * p.k / p.b;
    if (family == Family::V) {
      pt.upper = -kk_b + p.db / p.b + std::abs(p.rem0);
      pt.lower = -kk_b * (2.0 + C3) + p.db / p.b - env_rem(p.t, Cr);
    } else {
      pt.upper = -kk_b * C1 + env_rem(p.t, Cr);
      pt.lower = -kk_b * C2 - env_rem(p.t, Cr);
    }
    pt.slack_upper = pt.upper - p.lhs;
    pt.slack_lower = p.lhs - pt.lower;
    const double tol = 1e-12 * (1.0 + std::abs(p.lhs));
    if (pt.slack_upper < -tol || pt.slack_lower < -tol) ++rep.violations;
    rep.min_slack_upper = std::min(rep.min_slack_upper, pt.slack_upper);
    rep.min_slack_lower = std::min(rep.min_slack_lower, pt.slack_lower);
    rep.points.push_back(pt);
  }

  // log-log fit of the remainder envelope exponent
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t it = 0; it < t_grid.size(); ++it) {
    if (rem_by_t[it] <= 0.0) continue;
    const double x = std::log(1.0 + t_grid[it]);
    const double y = std::log(rem_by_t[it]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  rep.remainder_slope = (n >= 2) ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
  return rep;
}

}  // namespace deul
