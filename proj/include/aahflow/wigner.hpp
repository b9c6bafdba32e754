#pragma once

// Exact Wigner flow of the origin-centred Gaussian ensemble
//   G(x, k) = (alpha^2 / pi) exp[-alpha^2 (x^2 + k^2)]
// driven by the AAH Hamiltonian, evaluated at the tau = 0 snapshot.
//
// The quantum velocity w = J / G reads
//   omega_x = w - sin(k) C(x),   omega_k = -a^2 [w - sin(x) C(k)],
// with the spread factor
//   C(z) = sqrt(pi)/(2 alpha) e^{alpha^2 z^2} [erf(alpha(z+1/2)) - erf(alpha(z-1/2))],
// which is even, positive and tends to 1 as alpha -> 0.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "aahflow/errors.hpp"
#include "aahflow/model.hpp"
#include "aahflow/numerics.hpp"
#include "aahflow/phase_state.hpp"

namespace aahflow {

/// Localisation parameter alpha of the Gaussian ensemble. Purity is alpha^2,
/// so alpha > 1 does not describe a pure quantum state; such ensembles are
/// still accepted and reported through exceeds_pure_bound().
class GaussianEnsemble {
 public:
  explicit GaussianEnsemble(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw DomainError("GaussianEnsemble: alpha must be positive and finite");
    }
  }

  double alpha() const { return alpha_; }
  bool exceeds_pure_bound() const { return alpha_ > 1.0; }

 private:
  double alpha_;
};

/// Largest alpha^2 (x^2 + k^2) for which the density is safely above underflow.
inline constexpr double kMaxGaussianExponent = 700.0;

inline double gaussian_value(const GaussianEnsemble& ens, PhaseState s) {
  const double a2 = ens.alpha() * ens.alpha();
  return a2 * std::numbers::inv_pi * std::exp(-a2 * (s.x * s.x + s.k * s.k));
}

/// Analytic purity 2 pi * integral of G^2.
inline double purity(const GaussianEnsemble& ens) { return ens.alpha() * ens.alpha(); }

/// Spread factor C(zeta). alpha = 0 gives the classical limit C = 1.
/// Far tails use erfcx with the exponent shifts e^{alpha^2 (zeta -+ 1/4)} so
/// nothing overflows before C itself does.
inline double spread_factor(double alpha, double zeta) {
  if (alpha == 0.0) return 1.0;
  const double z = std::abs(zeta);
  const double a2 = alpha * alpha;
  const double upper = alpha * (z + 0.5);
  const double lower = alpha * (z - 0.5);
  const double pref = 0.5 / (alpha * std::numbers::inv_sqrtpi);
  if (lower >= 1.0) {
    return pref * (std::exp(a2 * (z - 0.25)) * erfcx(lower) - std::exp(-a2 * (z + 0.25)) * erfcx(upper));
  }
  return pref * std::exp(a2 * z * z) * (erf(upper) - erf(lower));
}

/// dC/dzeta = 2 alpha^2 zeta C(zeta) - 2 e^{-alpha^2/4} sinh(alpha^2 zeta).
inline double spread_factor_slope(double alpha, double zeta) {
  if (alpha == 0.0) return 0.0;
  const double a2 = alpha * alpha;
  const double c = spread_factor(alpha, zeta);
  const double arg = a2 * std::abs(zeta);
  // e^{-a2/4} sinh(a2 |zeta|) written without the intermediate overflow.
  const double damped_sinh = 0.5 * (std::exp(arg - 0.25 * a2) - std::exp(-arg - 0.25 * a2));
  return 2.0 * a2 * zeta * c - std::copysign(2.0 * damped_sinh, zeta);
}

inline double spread_factor(const GaussianEnsemble& ens, double zeta) {
  return spread_factor(ens.alpha(), zeta);
}
inline double spread_factor_slope(const GaussianEnsemble& ens, double zeta) {
  return spread_factor_slope(ens.alpha(), zeta);
}

namespace detail {

// e^{-alpha^2/4} sinh(alpha^2 z) G(x, k) with z the coordinate paired to the
// sinh, written as a difference of two shifted Gaussians so it never forms
// inf * 0.
inline double shifted_gaussian_difference(double alpha, double z, double other) {
  const double a2 = alpha * alpha;
  const double plus = std::exp(-a2 * ((z - 0.5) * (z - 0.5) + other * other));
  const double minus = std::exp(-a2 * ((z + 0.5) * (z + 0.5) + other * other));
  return 0.5 * a2 * std::numbers::inv_pi * (plus - minus);
}

}  // namespace detail

/// d(J_x)/dx = -2 [w alpha^2 x - sin k sinh(alpha^2 x) e^{-alpha^2/4}] G.
inline double div_jx(const GaussianEnsemble& ens, const AahParams& p, PhaseState s) {
  const double alpha = ens.alpha();
  const double g = gaussian_value(ens, s);
  return -2.0 * p.w() * alpha * alpha * s.x * g +
         2.0 * std::sin(s.k) * detail::shifted_gaussian_difference(alpha, s.x, s.k);
}

/// d(J_k)/dk = +2 a^2 [w alpha^2 k - sin x sinh(alpha^2 k) e^{-alpha^2/4}] G.
inline double div_jk(const GaussianEnsemble& ens, const AahParams& p, PhaseState s) {
  const double alpha = ens.alpha();
  const double g = gaussian_value(ens, s);
  return 2.0 * p.a2() *
         (p.w() * alpha * alpha * s.k * g - std::sin(s.x) * detail::shifted_gaussian_difference(alpha, s.k, s.x));
}

/// J_x = w G + alpha/(2 sqrt pi) sin k e^{-alpha^2 k^2} [erf(alpha(x-1/2)) - erf(alpha(x+1/2))].
inline double current_jx(const GaussianEnsemble& ens, const AahParams& p, PhaseState s) {
  const double alpha = ens.alpha();
  const double span = erf_difference(alpha * (s.x + 0.5), alpha * (s.x - 0.5));
  return p.w() * gaussian_value(ens, s) -
         0.5 * alpha * std::numbers::inv_sqrtpi * std::sin(s.k) * std::exp(-alpha * alpha * s.k * s.k) * span;
}

/// J_k = -a^2 { w G + alpha/(2 sqrt pi) sin x e^{-alpha^2 x^2} [erf(alpha(k-1/2)) - erf(alpha(k+1/2))] }.
inline double current_jk(const GaussianEnsemble& ens, const AahParams& p, PhaseState s) {
  const double alpha = ens.alpha();
  const double span = erf_difference(alpha * (s.k + 0.5), alpha * (s.k - 0.5));
  return -p.a2() * (p.w() * gaussian_value(ens, s) - 0.5 * alpha * std::numbers::inv_sqrtpi * std::sin(s.x) *
                                                         std::exp(-alpha * alpha * s.x * s.x) * span);
}

/// Quantum phase-space velocity (J_x / G, J_k / G) for a non-negative
/// localisation parameter; alpha = 0 reproduces the classical Hamilton flow.
inline PhaseVelocity quantum_velocity(double alpha, const AahParams& p, PhaseState s) {
  return {p.w() - std::sin(s.k) * spread_factor(alpha, s.x),
          -p.a2() * (p.w() - std::sin(s.x) * spread_factor(alpha, s.k))};
}

inline PhaseVelocity velocity(const GaussianEnsemble& ens, const AahParams& p, PhaseState s) {
  return quantum_velocity(ens.alpha(), p, s);
}

/// Stationarity quantifier div J; equals -dW/dtau at the Gaussian snapshot.
inline double stationarity(const GaussianEnsemble& ens, const AahParams& p, PhaseState s) {
  return div_jx(ens, p, s) + div_jk(ens, p, s);
}

namespace detail {

inline void require_resolved_density(const GaussianEnsemble& ens, PhaseState s, const char* fn) {
  const double a2 = ens.alpha() * ens.alpha();
  if (!is_finite(s) || a2 * (s.x * s.x + s.k * s.k) > kMaxGaussianExponent) {
    throw DomainError(std::string(fn) + ": density underflows at (" + std::to_string(s.x) + ", " +
                      std::to_string(s.k) + ")");
  }
}

}  // namespace detail

/// Liouvillianity quantifier div w = -sin k C'(x) + a^2 sin x C'(k).
inline double liouvillianity(const GaussianEnsemble& ens, const AahParams& p, PhaseState s) {
  detail::require_resolved_density(ens, s, "liouvillianity");
  const double alpha = ens.alpha();
  return -std::sin(s.k) * spread_factor_slope(alpha, s.x) + p.a2() * std::sin(s.x) * spread_factor_slope(alpha, s.k);
}

/// The same quantifier through the quotient (G div J - J . grad G) / G^2,
/// using grad G = -2 alpha^2 (x, k) G. Independent route for cross-checks.
inline double liouvillianity_quotient(const GaussianEnsemble& ens, const AahParams& p, PhaseState s) {
  detail::require_resolved_density(ens, s, "liouvillianity_quotient");
  const double g = gaussian_value(ens, s);
  const double a2 = ens.alpha() * ens.alpha();
  const double jx = current_jx(ens, p, s);
  const double jk = current_jk(ens, p, s);
  return stationarity(ens, p, s) / g + 2.0 * a2 * (s.x * jx + s.k * jk) / g;
}

/// Everything the flow grid reports at one point. div_w is NaN where the
/// density underflows.
struct FlowSample {
  double density = 0.0;
  double j_x = 0.0;
  double j_k = 0.0;
  double div_j = 0.0;
  double div_w = 0.0;
};

inline FlowSample flow_sample(const GaussianEnsemble& ens, const AahParams& p, PhaseState s) {
  FlowSample out;
  out.density = gaussian_value(ens, s);
  out.j_x = current_jx(ens, p, s);
  out.j_k = current_jk(ens, p, s);
  out.div_j = div_jx(ens, p, s) + div_jk(ens, p, s);
  const double a2 = ens.alpha() * ens.alpha();
  out.div_w = a2 * (s.x * s.x + s.k * s.k) <= kMaxGaussianExponent ? liouvillianity(ens, p, s)
                                                                     : std::numeric_limits<double>::quiet_NaN();
  return out;
}

// ---------------------------------------------------------------------------
// Derivative-closure series
// ---------------------------------------------------------------------------

/// Hamiltonians H = K(k) + V(x) whose odd derivatives close as
///   d^{2n+1} V / dx^{2n+1} = sigma_n lambda(x)^{2n+1} upsilon(x)  (+ potential_slope at n = 0)
///   d^{2n+1} K / dk^{2n+1} = sigma_n mu(k)^{2n+1} kappa(k)        (+ kinetic_slope at n = 0)
/// with sigma_n = (-1)^n for an oscillatory closure (imaginary rate, e.g. cos)
/// and sigma_n = 1 otherwise (real rate, e.g. exp or cosh).
struct ClosureSpec {
  std::function<double(double)> upsilon;
  std::function<double(double)> lambda;
  std::function<double(double)> kappa;
  std::function<double(double)> mu;
  double potential_slope = 0.0;
  double kinetic_slope = 0.0;
  bool potential_oscillatory = false;
  bool kinetic_oscillatory = false;
  int truncation_order = 32;
};

/// Closure of the AAH Hamiltonian: K = w k + cos k, V = a^2 (w x + cos x).
inline ClosureSpec aah_closure(const AahParams& p, int truncation_order = 32) {
  ClosureSpec c;
  const double a2 = p.a2();
  c.upsilon = [a2](double x) { return -a2 * std::sin(x); };
  c.lambda = [](double) { return 1.0; };
  c.kappa = [](double k) { return -std::sin(k); };
  c.mu = [](double) { return 1.0; };
  c.potential_slope = a2 * p.w();
  c.kinetic_slope = p.w();
  c.potential_oscillatory = true;
  c.kinetic_oscillatory = true;
  c.truncation_order = truncation_order;
  return c;
}

struct SeriesDivergence {
  double div_jx = 0.0;
  double div_jk = 0.0;
  bool diverging = false;  // last retained term still growing
};

namespace detail {

// sum_{n<=N} (-1)^n / (4^n (2n+1)!) D_n alpha^{2n+1} h_{2n+1}(alpha z)
// where D_n is the n-th odd derivative supplied by the closure.
struct PartialSum {
  double value = 0.0;
  bool diverging = false;
};

inline PartialSum closure_partial_sum(double alpha, double z, double rate, double amplitude, double slope,
                                      bool oscillatory, int order) {
  const double y = alpha * z;
  const double half_alpha = 0.5 * alpha;
  double h_prev = 1.0;       // h_0
  double h_odd = 2.0 * y;    // h_1
  double weight = alpha;     // 2 (alpha/2)^{2n+1} / (2n+1)!
  double rate_pow = rate;    // rate^{2n+1}
  double sum = 0.0;
  double last = 0.0;
  double before_last = 0.0;
  for (int n = 0; n <= order; ++n) {
    const double sigma = oscillatory && (n % 2 == 1) ? -1.0 : 1.0;
    double derivative = sigma * rate_pow * amplitude;
    if (n == 0) derivative += slope;
    const double sign = (n % 2 == 1) ? -1.0 : 1.0;
    const double term = sign * derivative * weight * h_odd;
    sum += term;
    before_last = last;
    last = term;

    // advance h_{2n+1} -> h_{2n+3} via h_{2n+2}
    const int m = 2 * n + 1;
    const double h_even = 2.0 * y * h_odd - 2.0 * m * h_prev;
    const double h_next = 2.0 * y * h_even - 2.0 * (m + 1) * h_odd;
    h_prev = h_even;
    h_odd = h_next;
    weight *= half_alpha * half_alpha / ((m + 1.0) * (m + 2.0));
    rate_pow *= rate * rate;
  }
  PartialSum out{sum, false};
  if (!std::isfinite(sum)) {
    out.diverging = true;
  } else if (order >= 1 && std::abs(last) > std::abs(before_last) && std::abs(last) > 1e-12 * std::abs(sum)) {
    out.diverging = true;
  }
  return out;
}

}  // namespace detail

/// Truncated Hermite series for (d J_x/dx, d J_k/dk) under a derivative
/// closure. Independent of the closed forms above; used as their oracle.
inline SeriesDivergence series_div_currents(const GaussianEnsemble& ens, const ClosureSpec& closure, PhaseState s) {
  if (closure.truncation_order < 0 || closure.truncation_order > kMaxSeriesOrder) {
    throw DomainError("series_div_currents: truncation order must lie in [0, " + std::to_string(kMaxSeriesOrder) +
                      "]");
  }
  if (!closure.upsilon || !closure.lambda || !closure.kappa || !closure.mu) {
    throw DomainError("series_div_currents: closure functions must all be set");
  }
  const double alpha = ens.alpha();
  const double g = gaussian_value(ens, s);
  const auto kin = detail::closure_partial_sum(alpha, s.x, closure.mu(s.k), closure.kappa(s.k), closure.kinetic_slope,
                                               closure.kinetic_oscillatory, closure.truncation_order);
  const auto pot = detail::closure_partial_sum(alpha, s.k, closure.lambda(s.x), closure.upsilon(s.x),
                                               closure.potential_slope, closure.potential_oscillatory,
                                               closure.truncation_order);
  return {-g * kin.value, g * pot.value, kin.diverging || pot.diverging};
}

/// sum_{n<=N} h_{2n+1}(y) s^{2n+1} / (2n+1)!, whose limit is sinh(2 s y) e^{-s^2}.
inline double odd_hermite_generating_sum(double s, double y, int order) {
  if (order < 0 || order > kMaxSeriesOrder) throw DomainError("odd_hermite_generating_sum: order out of range");
  double sum = 0.0;
  double coeff = s;  // s^{2n+1} / (2n+1)!
  for (int n = 0; n <= order; ++n) {
    const int m = 2 * n + 1;
    sum += coeff * hermite(m, y);
    coeff *= s * s / ((m + 1.0) * (m + 2.0));
  }
  return sum;
}

}  // namespace aahflow
