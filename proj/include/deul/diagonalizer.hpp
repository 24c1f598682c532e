#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "deul/damping.hpp"
#include "deul/ode.hpp"
#include "deul/zones.hpp"

namespace deul {

/// All matrices of the elliptic-zone diagonalization at one phase-time point:
///   D_t - A = M (D_t - D - R) M^{-1},
///   (D_t - D - R) N1 = N1 (D_t - D - F0 - R1),  N1 = I + N1_off,
/// with N1_off D - D N1_off = R - F0. The published display of N1_off carries
/// coefficient d_t sqrt|m| / (2|m|); the commutator identity forces /(4|m|),
/// which is what build_frame produces (the residual check below is exact).
struct DiagFrame {
  double t = 0.0, k = 0.0;
  double a = 0.0;    // sqrt(|m|)
  double da = 0.0;   // d/dt sqrt(|m|)
  Eigen::Matrix2cd A, M, Minv, D, R, N1, N1inv, F0, R1;

  /// max-norm residual of N1_off*D - D*N1_off - (R - F0); zero up to rounding.
  double commutator_residual() const;
};

DiagFrame build_frame(Family family, const DampingLaw& law, double t, double k,
                      const ZoneConfig& cfg);

/// Solution of the Volterra equation
///   Q(t,s) = H(t,s) + i int_s^t H(t,theta) R1(theta) Q(theta,s) dtheta,
/// H = diag(1, e^{-2 int sqrt|m|}), by Picard iteration on a composite
/// 8-point Gauss grid over a geometric partition of [s,t].
struct VolterraQ {
  Eigen::Matrix2cd Q;
  Eigen::Matrix2cd H;            // H(t,s)
  int iterations = 0;            // Picard sweeps on the final grid
  int panels = 0;                // panels of the final grid
  double residual = 0.0;         // fixed-point defect, max norm
  double grid_delta = 0.0;       // change under the last panel doubling
  double int_R1_max = 0.0;       // int_s^t ||R1||_max (for the contraction bound)
};

VolterraQ solve_Q(Family family, const DampingLaw& law, double k, double s, double t,
                  const ZoneConfig& cfg, double tol = 1e-12);

/// Conjugated kernel M N1(t) Q(t,s) N1(s)^{-1} M^{-1}; tends to
/// (1/2) [[1, i], [-i, 1]] along long elliptic segments.
Eigen::Matrix2cd etilde(Family family, const DampingLaw& law, double k, double s, double t,
                        const ZoneConfig& cfg);

/// Fundamental solution of D_t - A on the elliptic segment:
///   E = e^{int_s^t (sqrt|m| + d_t sqrt|m| / (2 sqrt|m|))} * etilde.
Eigen::Matrix2cd reconstruct_E(Family family, const DampingLaw& law, double k, double s, double t,
                               const ZoneConfig& cfg);

/// Direct integration of V' = iA(t) V from the identity at s; returns the
/// max elementwise deviation from reconstruct_E relative to the max element.
double equivalence_check(Family family, const DampingLaw& law, double k, double s, double t,
                         const ZoneConfig& cfg, OdeTol tol = {});

/// One probe row of the verification report.
struct DiagProbe {
  double k, s, t;
  double equivalence = 0.0;      // dual-route relative deviation
  double q_minus_h = 0.0;        // ||Q - H||_max
  double contraction_bound = 0.0;  // e^{int ||R1||} - 1
  double limit_distance = 0.0;   // ||etilde - (1/2)[[1,i],[-i,1]]||_max
  double floor_12 = 0.0;         // |[etilde]_12|
  double floor_combo = 0.0;      // |sqrt|m(s)|/b(s) [etilde]_11 - (i/2)[etilde]_12|
  double alt_reading_gap = 0.0;  // deviation of the N1(t)-on-both-sides variant
};

struct DiagReport {
  Family family;
  std::vector<DiagProbe> probes;
  double max_equivalence = 0.0;
  double qmh_exponent = 0.0;     // fitted log-log exponent of ||Q-H|| vs (1+s)
  double qmh_constant = 0.0;     // fitted C in ||Q-H|| <= C (1+s)^{-(1-lambda)}
  double t0 = 0.0;               // onset time for the elementwise limit
  double limit_constant = 0.0;   // fitted C of the elementwise-limit envelope
  double min_floor = 0.0;        // smallest lower-bound witness over s >= t0
};

/// Standard elliptic probe sweep: s over a geometric grid, t = 4s, k a fixed
/// fraction of the terminal elliptic cap.
DiagReport diag_report(Family family, const DampingLaw& law, const ZoneConfig& cfg,
                       double s_lo = 1e2, double s_hi = 1e4, int n_s = 9,
                       double k_fraction = 0.3, unsigned threads = 0);

}  // namespace deul
