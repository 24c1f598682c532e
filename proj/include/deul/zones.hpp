#pragma once

#include <optional>
#include <string>
#include <vector>

#include "deul/damping.hpp"

namespace deul {

enum class Family { V, U };

inline const char* family_name(Family f) { return f == Family::V ? "v" : "u"; }

enum class Zone { Hyperbolic, PseudoDiff, Reduced, Elliptic, BoundedResidual };

const char* zone_name(Zone z);

/// Thresholds for the phase-time decomposition. eps and bigN bound the ratio
/// sqrt(|m|)/b from below/above in the transition bands, c0 separates the
/// high frequencies, t_ell is the onset time of the elliptic zone.
struct ZoneConfig {
  double eps = 0.1;
  double bigN = 2.0;
  double t_ell = 0.0;
  double c0 = 0.0;

  ZoneConfig() = default;
  ZoneConfig(double eps_, double bigN_, double t_ell_, double c0_);
};

/// Default thresholds for a given law: eps=0.1, N=2, c0 = mu*N, and t_ell the
/// smallest time with |b'|/b^2 <= 1/8 (so the elliptic-zone smallness
/// requirements hold with margin).
ZoneConfig default_zone_config(const DampingLaw& law);

struct SymbolValue {
  double m;             // m_v or m_u
  double sqrt_abs_m;    // sqrt(|m|)
  double d_sqrt_abs_m;  // d/dt sqrt(|m|)
  double dm;            // d/dt m
};

/// m_v = k^2 - b^2/4 - b'/2,  m_u = k^2 - b^2/4 + b'/2, with the time
/// derivative of sqrt(|m|) computed from the closed forms of b, b', b''.
SymbolValue symbol(Family family, const DampingLaw& law, double t, double k);

/// Zone tag of (t,k). Boundary points are resolved in the order
/// Elliptic > Reduced > PseudoDiff > Hyperbolic.
Zone classify(Family family, const DampingLaw& law, const ZoneConfig& cfg, double t, double k);

/// Supremum time of the elliptic fiber {t : (t,k) elliptic}. An unbounded
/// fiber returns +infinity, an empty fiber returns nullopt. The finite case
/// is located by bracketing + bisection to 1e-9 absolute.
std::optional<double> t_xi(Family family, const DampingLaw& law, const ZoneConfig& cfg, double k);

/// Frequency cap of the elliptic slice at time t (bisection in k); nullopt
/// when the slice is empty.
std::optional<double> xi_t(Family family, const DampingLaw& law, const ZoneConfig& cfg, double t);

/// One grid point of the elliptic-zone certification.
struct EllBoundPoint {
  double t, k;
  double lhs;          // sqrt|m| + d_t sqrt|m|/(2 sqrt|m|) - b/2
  double upper;        // certified upper bound
  double lower;        // certified lower bound
  double slack_upper;  // upper - lhs
  double slack_lower;  // lhs - lower
  double remainder;    // measured |r(t,k)|
};

struct EllBoundReport {
  Family family;
  double min_slack_upper;
  double min_slack_lower;
  double constant_upper;    // coefficient of -k^2/b in the upper bound
  double constant_lower;    // coefficient of -k^2/b in the lower bound
  double remainder_C;       // fitted C_r in |r| <= C_r (1+t)^(2-lambda)^-1
  double remainder_slope;   // fitted log-log exponent of sup_k |r(t,.)|
  int violations;
  std::vector<EllBoundPoint> points;
};

/// Certify the elliptic-zone bounds on the exponent of the fundamental
/// solution over a (t,k) grid. For family V the constants come from the
/// closed-form analysis (upper coefficient 1, lower coefficient 2 + max
/// |b'|/b^2); for family U both coefficients are fitted on the grid.
/// Every grid point must classify as Elliptic.
EllBoundReport certify_ell_bounds(Family family, const DampingLaw& law, const ZoneConfig& cfg,
                                  const std::vector<double>& t_grid,
                                  const std::vector<double>& k_fractions);

}  // namespace deul
