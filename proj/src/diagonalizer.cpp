#include "deul/diagonalizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "deul/parallel.hpp"
#include "deul/quadrature.hpp"

namespace deul {

namespace {

using Eigen::Matrix2cd;
using Eigen::Vector4cd;
using namespace std::complex_literals;

Matrix2cd matM() {
  Matrix2cd M;
  M << 1.0i, -1.0i, 1.0, 1.0;
  return M;
}

Matrix2cd matMinv() {
  Matrix2cd M;
  M << -0.5i, 0.5, 0.5i, 0.5;
  return M;
}

double eval_d3b(const DampingLaw& law, double t) {
  return -law.lambda * (law.lambda + 1.0) * (law.lambda + 2.0) * law.mu *
         std::pow(1.0 + t, -law.lambda - 3.0);
}

struct SymbolJet {
  double a, da, dda;  // sqrt|m| and two time derivatives (elliptic branch)
};

SymbolJet symbol_jet(Family family, const DampingLaw& law, double t, double k) {
  const double b = eval_b(law, t);
  const double db = eval_db(law, t);
  const double d2b = eval_d2b(law, t);
  const double d3b = eval_d3b(law, t);
  const double sgn = (family == Family::V) ? -1.0 : 1.0;
  const double m = k * k - 0.25 * b * b + 0.5 * sgn * db;
  const double dm = -0.5 * b * db + 0.5 * sgn * d2b;
  const double d2m = -0.5 * (db * db + b * d2b) + 0.5 * sgn * d3b;
  if (!(m < 0.0)) throw std::invalid_argument("diagonalizer: point is not elliptic (m >= 0)");
  const double a = std::sqrt(-m);
  const double da = -dm / (2.0 * a);
  const double dda = -d2m / (2.0 * a) + dm * da / (2.0 * a * a);
  return SymbolJet{a, da, dda};
}

Matrix2cd rot_off() {  // [[0,1],[-1,0]]
  Matrix2cd J;
  J << 0.0, 1.0, -1.0, 0.0;
  return J;
}

double max_norm(const Matrix2cd& m) { return m.cwiseAbs().maxCoeff(); }

Matrix2cd frame_R1(Family family, const DampingLaw& law, double t, double k) {
  const SymbolJet j = symbol_jet(family, law, t, k);
  const double c = j.da / (4.0 * j.a * j.a);
  const double dc = j.dda / (4.0 * j.a * j.a) - j.da * j.da / (2.0 * j.a * j.a * j.a);
  const Matrix2cd J = rot_off();
  const Matrix2cd N1off = c * J;
  const Matrix2cd DtN1off = -1.0i * dc * J;
  Matrix2cd Rm;
  Rm << 1.0, -1.0, -1.0, 1.0;
  const Matrix2cd R = (-1.0i * j.da / (2.0 * j.a)) * Rm;
  const Matrix2cd F0 = (-1.0i * j.da / (2.0 * j.a)) * Matrix2cd::Identity();
  Matrix2cd N1inv;
  N1inv << 1.0, -c, c, 1.0;
  N1inv /= (1.0 + c * c);
  return -N1inv * (DtN1off - R * N1off + N1off * F0);
}

// Partial-interval interpolatory weights for the 8-point Gauss rule:
// W(i,l) = int_{-1}^{x_i} L_l(x) dx for the Lagrange basis L_l.
struct GaussPartial {
  std::array<std::array<double, 8>, 8> W{};
  GaussPartial() {
    for (int l = 0; l < 8; ++l) {
      std::array<double, 9> coef{};
      coef[0] = 1.0;
      int deg = 0;
      double denom = 1.0;
      for (int jn = 0; jn < 8; ++jn) {
        if (jn == l) continue;
        denom *= Gauss8::nodes[l] - Gauss8::nodes[jn];
        std::array<double, 9> next{};
        for (int d = 0; d <= deg; ++d) {
          next[d + 1] += coef[d];
          next[d] -= Gauss8::nodes[jn] * coef[d];
        }
        coef = next;
        ++deg;
      }
      for (int d = 0; d <= 7; ++d) coef[d] /= denom;
      for (int i = 0; i < 8; ++i) {
        const double x = Gauss8::nodes[i];
        double acc = 0.0;
        for (int d = 0; d <= 7; ++d) {
          const double p = d + 1.0;
          acc += coef[d] * (std::pow(x, p) - std::pow(-1.0, p)) / p;
        }
        W[i][l] = acc;
      }
    }
  }
};

const GaussPartial& gauss_partial() {
  static const GaussPartial gp;
  return gp;
}

struct SegmentGrid {
  int panels = 0;
  std::vector<double> theta;   // all Gauss nodes, ascending (8 per panel)
  std::vector<double> half;    // per panel half-width
  std::vector<double> acum;    // int_s^theta_j a
  double acum_end = 0.0;       // int_s^t a
  std::vector<double> a_val;
  std::vector<Matrix2cd> R1;
  std::vector<double> R1n;
};

SegmentGrid build_grid(Family family, const DampingLaw& law, double k, double s, double t,
                       int panels) {
  SegmentGrid g;
  g.panels = panels;
  const double ratio = (1.0 + t) / (1.0 + s);
  g.theta.resize(8 * panels);
  g.half.resize(panels);
  g.a_val.resize(8 * panels);
  g.R1.resize(8 * panels);
  g.R1n.resize(8 * panels);
  g.acum.resize(8 * panels);

  const auto& gp = gauss_partial();
  double prefix = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = (1.0 + s) * std::pow(ratio, double(p) / panels) - 1.0;
    const double hi = (1.0 + s) * std::pow(ratio, double(p + 1) / panels) - 1.0;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    g.half[p] = half;
    for (int i = 0; i < 8; ++i) {
      const int idx = 8 * p + i;
      const double th = mid + half * Gauss8::nodes[i];
      g.theta[idx] = th;
      const SymbolJet j = symbol_jet(family, law, th, k);
      g.a_val[idx] = j.a;
      g.R1[idx] = frame_R1(family, law, th, k);
      g.R1n[idx] = max_norm(g.R1[idx]);
    }
    for (int i = 0; i < 8; ++i) {
      double part = 0.0;
      for (int l = 0; l < 8; ++l) part += gp.W[i][l] * g.a_val[8 * p + l];
      g.acum[8 * p + i] = prefix + half * part;
    }
    double full = 0.0;
    for (int l = 0; l < 8; ++l) full += Gauss8::weights[l] * g.a_val[8 * p + l];
    prefix += half * full;
  }
  g.acum_end = prefix;
  return g;
}

// One Picard pass over the grid; returns the max elementwise change.
double picard_sweep(const SegmentGrid& g, std::vector<Matrix2cd>& Q) {
  const auto& gp = gauss_partial();
  const int n = static_cast<int>(g.theta.size());
  std::vector<Matrix2cd> Y(n);
  for (int j = 0; j < n; ++j) Y[j] = g.R1[j] * Q[j];

  double change = 0.0;
  std::vector<Matrix2cd> Qn(n);
  for (int j = 0; j < n; ++j) {
    const int pj = j / 8, ij = j % 8;
    Matrix2cd S = Matrix2cd::Zero();
    for (int q = 0; q < pj; ++q) {
      for (int l = 0; l < 8; ++l) {
        const int idx = 8 * q + l;
        const double w = g.half[q] * Gauss8::weights[l];
        const double e = std::exp(-2.0 * (g.acum[j] - g.acum[idx]));
        S.row(0) += w * Y[idx].row(0);
        S.row(1) += (w * e) * Y[idx].row(1);
      }
    }
    for (int l = 0; l < 8; ++l) {
      const int idx = 8 * pj + l;
      const double w = g.half[pj] * gp.W[ij][l];
      const double e = std::exp(-2.0 * (g.acum[j] - g.acum[idx]));
      S.row(0) += w * Y[idx].row(0);
      S.row(1) += (w * e) * Y[idx].row(1);
    }
    Matrix2cd H = Matrix2cd::Identity();
    H(1, 1) = std::exp(-2.0 * g.acum[j]);
    Qn[j] = H + 1.0i * S;
    change = std::max(change, max_norm(Qn[j] - Q[j]));
  }
  Q.swap(Qn);
  return change;
}

Matrix2cd endpoint_Q(const SegmentGrid& g, const std::vector<Matrix2cd>& Q) {
  Matrix2cd S = Matrix2cd::Zero();
  for (int q = 0; q < g.panels; ++q) {
    for (int l = 0; l < 8; ++l) {
      const int idx = 8 * q + l;
      const double w = g.half[q] * Gauss8::weights[l];
      const double e = std::exp(-2.0 * (g.acum_end - g.acum[idx]));
      const Matrix2cd Y = g.R1[idx] * Q[idx];
      S.row(0) += w * Y.row(0);
      S.row(1) += (w * e) * Y.row(1);
    }
  }
  Matrix2cd H = Matrix2cd::Identity();
  H(1, 1) = std::exp(-2.0 * g.acum_end);
  return H + 1.0i * S;
}

void require_elliptic_segment(Family family, const DampingLaw& law, const ZoneConfig& cfg,
                              double k, double s, double t) {
  for (double tau : {s, 0.5 * (s + t), t}) {
    if (classify(family, law, cfg, tau, k) != Zone::Elliptic)
      throw std::invalid_argument("diagonalizer: segment leaves the elliptic zone");
  }
}

}  // namespace

double DiagFrame::commutator_residual() const {
  const Matrix2cd N1off = N1 - Matrix2cd::Identity();
  return (N1off * D - D * N1off - (R - F0)).cwiseAbs().maxCoeff();
}

DiagFrame build_frame(Family family, const DampingLaw& law, double t, double k,
                      const ZoneConfig& cfg) {
  if (classify(family, law, cfg, t, k) != Zone::Elliptic)
    throw std::invalid_argument("build_frame: (t,k) is not in the elliptic zone");
  const SymbolJet j = symbol_jet(family, law, t, k);
  DiagFrame f;
  f.t = t;
  f.k = k;
  f.a = j.a;
  f.da = j.da;
  f.M = matM();
  f.Minv = matMinv();
  f.A << -1.0i * j.da / j.a, j.a, -j.a, 0.0;
  f.D << -1.0i * j.a, 0.0, 0.0, 1.0i * j.a;
  Matrix2cd Rm;
  Rm << 1.0, -1.0, -1.0, 1.0;
  f.R = (-1.0i * j.da / (2.0 * j.a)) * Rm;
  f.F0 = (-1.0i * j.da / (2.0 * j.a)) * Matrix2cd::Identity();
  const double c = j.da / (4.0 * j.a * j.a);
  f.N1 = Matrix2cd::Identity() + c * rot_off();
  f.N1inv = Matrix2cd::Identity() - c * rot_off();
  f.N1inv /= (1.0 + c * c);
  f.R1 = frame_R1(family, law, t, k);
  return f;
}

VolterraQ solve_Q(Family family, const DampingLaw& law, double k, double s, double t,
                  const ZoneConfig& cfg, double tol) {
  detail::require_interval(s, t);
  VolterraQ out;
  if (s == t) {
    out.Q = Matrix2cd::Identity();
    out.H = Matrix2cd::Identity();
    return out;
  }
  require_elliptic_segment(family, law, cfg, k, s, t);

  Matrix2cd prev_Qt;
  bool have_prev = false;
  for (int panels = 16; panels <= 256; panels *= 2) {
    const SegmentGrid g = build_grid(family, law, k, s, t, panels);
    std::vector<Matrix2cd> Q(g.theta.size());
    for (std::size_t j = 0; j < Q.size(); ++j) {
      Q[j] = Matrix2cd::Identity();
      Q[j](1, 1) = std::exp(-2.0 * g.acum[j]);
    }
    double change = 0.0;
    int iters = 0;
    for (; iters < 50; ++iters) {
      change = picard_sweep(g, Q);
      if (change <= tol) break;
    }
    const Matrix2cd Qt = endpoint_Q(g, Q);

    out.Q = Qt;
    out.H = Matrix2cd::Identity();
    out.H(1, 1) = std::exp(-2.0 * g.acum_end);
    out.iterations = iters + 1;
    out.panels = panels;
    out.residual = change;
    double intR1 = 0.0;
    for (int p = 0; p < g.panels; ++p)
      for (int l = 0; l < 8; ++l) intR1 += g.half[p] * Gauss8::weights[l] * g.R1n[8 * p + l];
    out.int_R1_max = intR1;

    if (have_prev) {
      out.grid_delta = max_norm(Qt - prev_Qt);
      if (out.grid_delta <= tol) break;
    }
    prev_Qt = Qt;
    have_prev = true;
  }
  return out;
}

Eigen::Matrix2cd etilde(Family family, const DampingLaw& law, double k, double s, double t,
                        const ZoneConfig& cfg) {
  const VolterraQ vq = solve_Q(family, law, k, s, t, cfg);
  const DiagFrame ft = build_frame(family, law, t, k, cfg);
  const DiagFrame fs = build_frame(family, law, s, k, cfg);
  return ft.M * ft.N1 * vq.Q * fs.N1inv * ft.Minv;
}

Eigen::Matrix2cd reconstruct_E(Family family, const DampingLaw& law, double k, double s, double t,
                               const ZoneConfig& cfg) {
  if (s == t) return Matrix2cd::Identity();
  const double int_a = integrate_adaptive(
      [&](double tau) { return symbol_jet(family, law, tau, k).a; }, s, t, 1e-13);
  const double a_s = symbol_jet(family, law, s, k).a;
  const double a_t = symbol_jet(family, law, t, k).a;
  const double scalar = std::exp(int_a) * std::sqrt(a_t / a_s);
  return scalar * etilde(family, law, k, s, t, cfg);
}

double equivalence_check(Family family, const DampingLaw& law, double k, double s, double t,
                         const ZoneConfig& cfg, OdeTol tol) {
  if (s == t) return 0.0;
  require_elliptic_segment(family, law, cfg, k, s, t);
  auto rhs = [&](double tau, const Vector4cd& y) {
    const SymbolJet j = symbol_jet(family, law, tau, k);
    // iA = [[a'/a, ia], [-ia, 0]]
    const std::complex<double> r = j.da / j.a;
    const std::complex<double> ia = 1.0i * j.a;
    return Vector4cd(r * y[0] + ia * y[1], -ia * y[0], r * y[2] + ia * y[3], -ia * y[2]);
  };
  auto solver = make_dopri5<Vector4cd>(rhs, tol);
  const Vector4cd y = solver.integrate_to(s, Vector4cd(1.0, 0.0, 0.0, 1.0), t);
  Matrix2cd E_ode;
  E_ode << y[0], y[2], y[1], y[3];
  const Matrix2cd E_rec = reconstruct_E(family, law, k, s, t, cfg);
  const double scale = max_norm(E_ode);
  return max_norm(E_ode - E_rec) / scale;
}

DiagReport diag_report(Family family, const DampingLaw& law, const ZoneConfig& cfg, double s_lo,
                       double s_hi, int n_s, double k_fraction, unsigned threads) {
  DiagReport rep;
  rep.family = family;
  const double lo = std::max(s_lo, cfg.t_ell + 1.0);
  std::vector<DiagProbe> probes(n_s);
  std::vector<char> ok(n_s, 0);
  parallel_for(
      static_cast<std::size_t>(n_s),
      [&](std::size_t i) {
        const double s = lo * std::pow(s_hi / lo, double(i) / std::max(1, n_s - 1));
        const double t = 4.0 * s;
        const auto cap = xi_t(family, law, cfg, t);
        if (!cap) return;
        const double k = k_fraction * (*cap);
        DiagProbe p;
        p.k = k;
        p.s = s;
        p.t = t;
        const VolterraQ vq = solve_Q(family, law, k, s, t, cfg);
        p.q_minus_h = max_norm(vq.Q - vq.H);
        p.contraction_bound = std::exp(vq.int_R1_max) - 1.0;
        const Matrix2cd Et = etilde(family, law, k, s, t, cfg);
        Matrix2cd limit;
        limit << 0.5, 0.5i, -0.5i, 0.5;
        p.limit_distance = max_norm(Et - limit);
        p.floor_12 = std::abs(Et(0, 1));
        const double a_s = symbol_jet(family, law, s, k).a;
        const double bs = eval_b(law, s);
        p.floor_combo = std::abs(a_s / bs * Et(0, 0) - 0.5i * Et(0, 1));
        p.equivalence = equivalence_check(family, law, k, s, t, cfg);
        // gap of the terminal-time-on-both-sides reading of the conjugation
        const DiagFrame ft = build_frame(family, law, t, k, cfg);
        const Matrix2cd Et_alt = ft.M * ft.N1 * vq.Q * ft.N1inv * ft.Minv;
        p.alt_reading_gap = max_norm(Et_alt - Et) / max_norm(Et);
        probes[i] = p;
        ok[i] = 1;
      },
      threads);

  for (int i = 0; i < n_s; ++i)
    if (ok[i]) rep.probes.push_back(probes[i]);
  if (rep.probes.empty()) return rep;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : rep.probes) {
    rep.max_equivalence = std::max(rep.max_equivalence, p.equivalence);
    rep.qmh_constant =
        std::max(rep.qmh_constant, p.q_minus_h * std::pow(1.0 + p.s, 1.0 - law.lambda));
    const double x = std::log(1.0 + p.s), y = std::log(std::max(p.q_minus_h, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const int n = static_cast<int>(rep.probes.size());
  rep.qmh_exponent = (n >= 2) ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;

  // elementwise-limit constant from the top half of the sweep; onset time
  // from a 2x margin against that constant plus an absolute cap
  auto env = [&](const DiagProbe& p) {
    return std::pow(1.0 + p.s, law.lambda - 1.0) +
           std::exp(-2.0 * cfg.eps * integral_b(law, p.s, p.t));
  };
  for (int i = n / 2; i < n; ++i)
    rep.limit_constant =
        std::max(rep.limit_constant, rep.probes[i].limit_distance / env(rep.probes[i]));
  rep.t0 = rep.probes.back().s;
  for (int i = n - 1; i >= 0; --i) {
    const DiagProbe& p = rep.probes[i];
    if (p.limit_distance <= 2.0 * rep.limit_constant * env(p) && p.limit_distance <= 0.125)
      rep.t0 = p.s;
    else
      break;
  }
  rep.min_floor = 1e300;
  for (const auto& p : rep.probes)
    if (p.s >= rep.t0) rep.min_floor = std::min(rep.min_floor, std::min(p.floor_12, p.floor_combo));
  return rep;
}

}  // namespace deul
