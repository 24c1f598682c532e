#pragma once

#include <span>
#include <string>
#include <vector>

#include "deul/damping.hpp"
#include "deul/spectra.hpp"
#include "deul/zones.hpp"

namespace deul {

/// A frequency ray: one (k, s) with several terminal times.
struct ProbeRay {
  double k = 0.0;
  double s = 0.0;
  std::vector<double> ts;
};

enum class PhiCase { Elliptic, Hyperbolic, Mixed };

/// Result of one envelope certification. The exponential constant is fitted
/// by log-linear regression on the training half of the probes, the
/// prefactor is then tightened so every training ratio is <= 1, and the
/// held-out half must stay within 1.1x.
struct EnvelopeReport {
  std::string claim;
  std::string probes_desc;
  double fitted_C = 0.0;     // constant inside the exponential envelope
  double prefactor = 0.0;    // fitted leading constant
  double train_sup = 0.0;    // 1.0 by construction for upper bounds
  double validate_sup = 0.0;
  double min_ratio = 0.0;    // lower bounds: smallest normalized ratio
  int points = 0;
  bool pass = false;
};

/// Upper envelopes of the multipliers (elliptic / high-frequency hyperbolic /
/// mixed zone), both Phi1 and Phi2 of one family. Probes must classify
/// consistently with the case at their terminal times (usage error).
std::vector<EnvelopeReport> check_phi_upper(Family family, PhiCase phi_case, const DampingLaw& law,
                                            const ZoneConfig& cfg,
                                            const std::vector<ProbeRay>& probes, unsigned seed,
                                            double eps_hyp = 0.05, unsigned threads = 0);

/// Optimality (lower) envelopes in the elliptic zone for s >= T0.
std::vector<EnvelopeReport> check_phi_lower(Family family, const DampingLaw& law,
                                            const ZoneConfig& cfg,
                                            const std::vector<ProbeRay>& probes, double t0,
                                            unsigned seed, unsigned threads = 0);

/// The damped combination Phi1_u - b(s) Phi2_u improves on the saturation
/// envelope b(s)/b(t): certified against the three-term bound and checked to
/// decrease against the saturation along each ray.
struct CancellationReport {
  EnvelopeReport combo;        // three-term envelope certification
  double sat_lo = 0.0;         // bracket of |Phi1_u| / saturation envelope
  double sat_hi = 0.0;
  bool ratio_decreasing = false;
  double residual_vs_k2 = 0.0;  // sup combo / (k^2-term only); reported, not asserted
};

CancellationReport check_cancellation(const DampingLaw& law, const ZoneConfig& cfg,
                                      const std::vector<ProbeRay>& probes, double t0,
                                      unsigned seed, unsigned threads = 0);

/// Closed-form majorant and adaptive quadrature of
///   int_0^t (1 + (1+t)^{1+lambda} - (1+s)^{1+lambda})^{-beta} (1+s)^{-gamma} ds.
/// regime: 0 if max{beta(1+lambda), gamma} > 1, 1 if == 1 (log factor),
/// 2 if < 1.
struct IntegralBoundResult {
  double closed = 0.0;
  double numeric = 0.0;
  double ratio = 0.0;  // numeric / closed
  int regime = 0;
};

IntegralBoundResult min_integral_bound(double beta, double gamma_exp, const DampingLaw& law,
                                       double t);

/// Same for int_0^t (1+s)^lambda Gamma^beta(t,s) Theta^{k+1}(t,s) (1+s)^{-gamma} ds,
/// with regimes driven by (1+lambda)(beta+k)/2 vs gamma.
IntegralBoundResult theta_integral_bound(double beta, int k_order, double gamma_exp,
                                         const DampingLaw& law, double t);

/// Green-block decay envelopes: evolve a radial profile through one input
/// channel, measure each output block at the given derivative orders, and
/// certify the block envelope over an (s,t) lattice.
struct GreenBlockReport {
  std::string block;  // "g11", "g12", "g21", "g22", "g22opt"
  int order = 0;
  double prefactor = 0.0;
  double validate_sup = 0.0;
  double late_ratio = 0.0;  // mean ratio over the latest decade
  int points = 0;
  bool pass = false;
};

std::vector<GreenBlockReport> check_green_blocks(const DampingLaw& law, int n,
                                                 const RadialProfile& profile, bool data_in_v,
                                                 std::span<const double> s_list, double t_max,
                                                 int nt_per_s, std::span<const int> orders,
                                                 unsigned seed, unsigned threads = 0);

}  // namespace deul
