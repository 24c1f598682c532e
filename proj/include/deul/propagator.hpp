#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "deul/damping.hpp"
#include "deul/ode.hpp"
#include "deul/zones.hpp"

namespace deul {

/// Wave-equation multipliers Phi1/Phi2 of one family along a time grid.
/// Both canonical solutions are integrated together; at t = s the samples
/// satisfy phi1 = 1, dphi1 = 0, phi2 = 0, dphi2 = 1.
struct Multipliers {
  Family family;
  double k = 0.0;
  double s = 0.0;
  std::vector<double> t;
  std::vector<double> phi1, dphi1, phi2, dphi2;

  std::size_t size() const { return t.size(); }
  /// Wronskian phi1*dphi2 - dphi1*phi2 at sample i (Abel: equals e^{-int b}).
  double wronskian(std::size_t i) const { return phi1[i] * dphi2[i] - dphi1[i] * phi2[i]; }
};

/// 2x2 evolution matrix of the first-order system
///   d/dt (v,u) = [[0, -k], [k, -b(t)]] (v,u)
/// from time s to t. det G = e^{-int_s^t b}; G(s,s) = I.
struct GreenMatrix {
  double k = 0.0, s = 0.0, t = 0.0;
  Eigen::Matrix2d g = Eigen::Matrix2d::Identity();
};

/// Integrate y'' + k^2 y + b y' = 0 (family V) or y'' + k^2 y + (b y)' = 0
/// (family U) from both canonical initial conditions at time s, sampling at
/// t_grid (increasing, t_grid[0] >= s). High frequencies are integrated in
/// the damped-energy rescaled form and mapped back through the exact factor.
Multipliers solve_multipliers(Family family, const DampingLaw& law, double k, double s,
                              std::span<const double> t_grid, OdeTol tol = {});

/// Green matrix along a grid (one ODE solve for both basis columns).
std::vector<GreenMatrix> green_path(const DampingLaw& law, double k, double s,
                                    std::span<const double> t_grid, OdeTol tol = {});

GreenMatrix green(const DampingLaw& law, double k, double s, double t, OdeTol tol = {});

/// Assemble the Green matrix from the two wave families:
///   g11 = Phi1_v, g12 = -k Phi2_v, g21 = k Phi2_u, g22 = Phi1_u - b(s) Phi2_u.
GreenMatrix reconstruct_green(const Multipliers& mult_v, const Multipliers& mult_u,
                              const DampingLaw& law, std::size_t sample);

/// ||G(t,s) - G(t-s,0)||_max / ||G(t,s)||_max; zero iff the evolution is
/// translation invariant (constant coefficient).
double translation_probe(const DampingLaw& law, double k, double s, double t, OdeTol tol = {});

}  // namespace deul
