#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deul/damping.hpp"
#include "deul/ode.hpp"

namespace deul {

enum class ProfileKind { Hat, Gaussian, Annulus };

/// Geometric panels with 4-point Gauss nodes; defaults give 480 nodes over
/// [1e-5, 50], dense enough to resolve the shrinking elliptic band
/// k ~ (1+t)^{-lambda} up to t = 1e4 for every lambda in the sweep (the
/// lambda = 0.75 survivors sit near k ~ 3e-4 at t = 1e4).
struct GridSpec {
  double k_min = 1e-5;
  double k_max = 50.0;
  int panels = 120;
};

/// Radial frequency-space amplitude with its quadrature rule.
/// weights[j] approximate the measure k^{n-1} dk, so that
/// sum(weights * f(nodes)) ~ int_0^inf f(k) k^{n-1} dk.
struct RadialProfile {
  int n = 2;  // spatial dimension
  Eigen::ArrayXd nodes, weights, amp;
  double cutoff_R = 0.0;
};

/// Smooth cutoff: 1 on [0,R], 0 beyond 2R, C^inf transition (exp(-1/x) glue).
double smooth_cutoff(double k, double R);

/// hat: amplitude 1 on [0,R], support [0,2R] (param_a = R);
/// gaussian: e^{-k^2/(2 sigma^2)} (param_a = sigma);
/// annulus: smooth bump supported in [param_a, param_b], peak 1.
RadialProfile make_profile(ProfileKind kind, double param_a, double param_b, int n,
                           GridSpec grid = {});

/// Partition of unity at radius R: (chi * amp, (1-chi) * amp).
std::pair<RadialProfile, RadialProfile> split(const RadialProfile& p, double R);

/// sqrt(c_n * int k^{2a} |f|^2 k^{n-1} dk), c_n = |S^{n-1}| / (2 pi)^n.
double l2_norm(const RadialProfile& p, int deriv_order);

/// c_n * int k^a |f| k^{n-1} dk — the L^infinity upper proxy; sharp (equals
/// the field value at the origin) for nonnegative amplitudes.
double l1hat_norm(const RadialProfile& p, int deriv_order = 0);

struct NormSeries {
  std::string label;
  std::vector<double> t;
  std::vector<double> value;
};

struct SlopeFit {
  double exponent = 0.0;
  double stderr_ = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
};

/// Ordinary least squares of log(value) on log(t) inside [t_lo, t_hi];
/// requires at least 8 samples in the window.
SlopeFit fit_slope(const NormSeries& series, double t_lo, double t_hi);

/// Evolve (profile_v, profile_u) through the Green matrix of the linear
/// system and the vorticity profile through its exact factor; returns, for
/// each field and derivative order, the L2 norm series and (for v,u) the
/// L1-hat proxy series. Labels look like "v:l2:a0", "u:l1hat:a1", "w:l2:a0".
std::vector<NormSeries> evolve_norms(const DampingLaw& law, int n, const RadialProfile& profile_v,
                                     const RadialProfile& profile_u, const RadialProfile& profile_w,
                                     double s, std::span<const double> t_grid,
                                     std::span<const int> orders, unsigned threads = 0,
                                     OdeTol tol = {});

/// Evolved nodewise amplitudes (v,u) at every output time; row i of each
/// matrix is the amplitude vector at t_grid[i]. Used by the envelope checks.
struct EvolvedAmplitudes {
  std::vector<double> t;
  Eigen::ArrayXXd v, u;  // shape: t_grid.size() x nodes
};

EvolvedAmplitudes evolve_amplitudes(const DampingLaw& law, const RadialProfile& profile_v,
                                    const RadialProfile& profile_u, double s,
                                    std::span<const double> t_grid, unsigned threads = 0,
                                    OdeTol tol = {});

}  // namespace deul
