#pragma once

#include <cmath>
#include <stdexcept>

namespace deul {

/// Time-dependent damping coefficient b(t) = mu * (1+t)^(-lambda).
/// The coefficient is positive and non-increasing; lambda is restricted to
/// [0,1) so that the antiderivative of b stays a pure power law.
struct DampingLaw {
  double mu;
  double lambda;

  DampingLaw(double mu_, double lambda_) : mu(mu_), lambda(lambda_) {
    if (!(mu > 0.0)) throw std::invalid_argument("DampingLaw: mu must be positive");
    if (!(lambda >= 0.0 && lambda < 1.0))
      throw std::invalid_argument("DampingLaw: lambda must lie in [0,1)");
  }
};

/// Values of the decay envelopes Gamma(t,s) and Theta(t,s).
struct Envelope {
  double gamma;
  double theta;
};

namespace detail {
inline void require_time(double t) {
  if (!(t >= 0.0)) throw std::domain_error("damping: time must be nonnegative");
}
inline void require_interval(double s, double t) {
  if (!(s >= 0.0) || !(t >= s)) throw std::domain_error("damping: need 0 <= s <= t");
}
}  // namespace detail

inline double eval_b(const DampingLaw& law, double t) {
  detail::require_time(t);
  return law.mu * std::pow(1.0 + t, -law.lambda);
}

inline double eval_db(const DampingLaw& law, double t) {
  detail::require_time(t);
  return -law.lambda * law.mu * std::pow(1.0 + t, -law.lambda - 1.0);
}

inline double eval_d2b(const DampingLaw& law, double t) {
  detail::require_time(t);
  return law.lambda * (law.lambda + 1.0) * law.mu * std::pow(1.0 + t, -law.lambda - 2.0);
}

/// Integral of b over [s,t]: mu * ((1+t)^(1-lambda) - (1+s)^(1-lambda)) / (1-lambda).
inline double integral_b(const DampingLaw& law, double s, double t) {
  detail::require_interval(s, t);
  const double p = 1.0 - law.lambda;
  return law.mu * (std::pow(1.0 + t, p) - std::pow(1.0 + s, p)) / p;
}

/// Integral of 1/b over [s,t]: ((1+t)^(1+lambda) - (1+s)^(1+lambda)) / (mu*(1+lambda)).
inline double integral_inv_b(const DampingLaw& law, double s, double t) {
  detail::require_interval(s, t);
  const double p = 1.0 + law.lambda;
  return (std::pow(1.0 + t, p) - std::pow(1.0 + s, p)) / (law.mu * p);
}

/// Gamma(t,s) = (1 + (1+t)^(1+lambda) - (1+s)^(1+lambda))^(-1/2),
/// Theta(t,s) = min{Gamma(t,s), (1+t)^(-lambda)}.
inline Envelope envelope(const DampingLaw& law, double s, double t) {
  detail::require_interval(s, t);
  const double p = 1.0 + law.lambda;
  const double g = 1.0 / std::sqrt(1.0 + std::pow(1.0 + t, p) - std::pow(1.0 + s, p));
  const double th = std::min(g, std::pow(1.0 + t, -law.lambda));
  return Envelope{g, th};
}

/// Exact solution factor of the vorticity channel w' = -b(t) w from time s.
inline double vorticity_factor(const DampingLaw& law, double s, double t) {
  return std::exp(-integral_b(law, s, t));
}

}  // namespace deul
