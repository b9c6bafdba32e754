#pragma once

// Special functions, Hermite recurrence, trapezoid quadrature and a
// fixed-step RK4 integrator. Everything here is a pure function of its
// arguments.

#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <string>
#include <type_traits>
#include <vector>

#include "aahflow/errors.hpp"
#include "aahflow/phase_state.hpp"

namespace aahflow {

/// Closed interval [lo, hi] on the real line.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Default series truncation bound; hermite() accepts orders up to
/// 2 * kMaxSeriesOrder + 1.
inline constexpr int kMaxSeriesOrder = 64;

namespace detail {

inline constexpr double kTwoOverSqrtPi = 2.0 * std::numbers::inv_sqrtpi;

inline void require_finite(double z, const char* fn) {
  if (!std::isfinite(z)) {
    throw DomainError(std::string(fn) + ": non-finite argument");
  }
}

// Maclaurin series of erf, accurate to a few ulp for |z| <= 2.
inline double erf_maclaurin(double z) {
  const double z2 = z * z;
  double term = z;
  double sum = z;
  for (int n = 1; n < 120; ++n) {
    term *= -z2 / n;
    const double contrib = term / (2 * n + 1);
    sum += contrib;
    if (std::abs(contrib) <= 1e-17 * std::abs(sum)) break;
  }
  return kTwoOverSqrtPi * sum;
}

// erfcx(z) for z > 0 from the Laplace continued fraction
//   sqrt(pi) erfcx(z) = 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...))))
// evaluated with the modified Lentz algorithm.
inline double erfcx_continued_fraction(double z) {
  constexpr double tiny = 1e-300;
  double f = z;
  double c = f;
  double d = 0.0;
  for (int n = 1; n < 20000; ++n) {
    const double a = 0.5 * n;
    d = z + a * d;
    if (d == 0.0) d = tiny;
    d = 1.0 / d;
    c = z + a / c;
    if (c == 0.0) c = tiny;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::numbers::inv_sqrtpi / f;
}

}  // namespace detail

/// Scaled complementary error function e^{z^2} (1 - erf z).
/// Overflows to +inf for z below about -26.6.
inline double erfcx(double z) {
  detail::require_finite(z, "erfcx");
  if (z < 0.0) return 2.0 * std::exp(z * z) - erfcx(-z);
  if (z < 1.0) return std::exp(z * z) * (1.0 - detail::erf_maclaurin(z));
  return detail::erfcx_continued_fraction(z);
}

/// Gauss error function. Series for |z| <= 2, continued fraction beyond.
inline double erf(double z) {
  detail::require_finite(z, "erf");
  const double az = std::abs(z);
  if (az <= 2.0) return detail::erf_maclaurin(z);
  const double tail = std::exp(-az * az) * detail::erfcx_continued_fraction(az);
  return std::copysign(1.0 - tail, z);
}

/// erf(upper) - erf(lower) without cancellation when both arguments sit in
/// the same tail.
inline double erf_difference(double upper, double lower) {
  detail::require_finite(upper, "erf_difference");
  detail::require_finite(lower, "erf_difference");
  if (upper >= 1.0 && lower >= 1.0) {
    return std::exp(-lower * lower) * erfcx(lower) - std::exp(-upper * upper) * erfcx(upper);
  }
  if (upper <= -1.0 && lower <= -1.0) {
    return std::exp(-upper * upper) * erfcx(-upper) - std::exp(-lower * lower) * erfcx(-lower);
  }
  return erf(upper) - erf(lower);
}

/// Physicists' Hermite polynomial h_n(y) by upward recurrence.
inline double hermite(int n, double y) {
  if (n < 0 || n > 2 * kMaxSeriesOrder + 1) {
    throw DomainError("hermite: order " + std::to_string(n) + " outside [0, " +
                      std::to_string(2 * kMaxSeriesOrder + 1) + "]");
  }
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * y;
  for (int m = 1; m < n; ++m) {
    const double next = 2.0 * y * cur - 2.0 * m * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Anything callable as PhaseVelocity(PhaseState).
template <class F>
concept OdeField = std::regular_invocable<const F&, PhaseState> &&
                   std::convertible_to<std::invoke_result_t<const F&, PhaseState>, PhaseVelocity>;

/// Classic fourth-order Runge-Kutta with fixed step. The returned sequence
/// starts with `start` and holds n_steps + 1 states.
template <OdeField Field>
std::vector<PhaseState> rk4_integrate(const Field& field, PhaseState start, double step,
                                      std::size_t n_steps) {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("rk4_integrate: step must be positive");
  if (n_steps < 1) throw DomainError("rk4_integrate: need at least one step");
  if (!is_finite(start)) throw DomainError("rk4_integrate: non-finite start state");

  std::vector<PhaseState> out;
  out.reserve(n_steps + 1);
  out.push_back(start);

  auto eval = [&field](PhaseState s, std::size_t i) {
    const PhaseVelocity v = field(s);
    if (!is_finite(v)) {
      throw IntegrationError("rk4_integrate: non-finite field value at step " + std::to_string(i), i);
    }
    return v;
  };

  PhaseState s = start;
  const double half = 0.5 * step;
  for (std::size_t i = 0; i < n_steps; ++i) {
    const PhaseVelocity k1 = eval(s, i);
    const PhaseVelocity k2 = eval({s.x + half * k1.x, s.k + half * k1.k}, i);
    const PhaseVelocity k3 = eval({s.x + half * k2.x, s.k + half * k2.k}, i);
    const PhaseVelocity k4 = eval({s.x + step * k3.x, s.k + step * k3.k}, i);
    s.x += step / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.k += step / 6.0 * (k1.k + 2.0 * k2.k + 2.0 * k3.k + k4.k);
    out.push_back(s);
  }
  return out;
}

/// Composite trapezoid rule on n >= 2 equally spaced nodes.
template <std::invocable<double> F>
double trapezoid_1d(const F& f, Interval range, std::size_t n) {
  if (n < 2) throw DomainError("trapezoid_1d: need at least two nodes");
  const double h = range.width() / static_cast<double>(n - 1);
  double sum = 0.5 * (f(range.lo) + f(range.hi));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    sum += f(range.lo + range.width() * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return sum * h;
}

/// Composite trapezoid rule over the rectangle x_range * k_range.
template <std::invocable<double, double> F>
double trapezoid_2d(const F& f, Interval x_range, Interval k_range, std::size_t nx, std::size_t nk) {
  if (nx < 2 || nk < 2) throw DomainError("trapezoid_2d: need at least two nodes per axis");
  const double hx = x_range.width() / static_cast<double>(nx - 1);
  const double hk = k_range.width() / static_cast<double>(nk - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = x_range.lo + x_range.width() * static_cast<double>(i) / static_cast<double>(nx - 1);
    const double wx = (i == 0 || i + 1 == nx) ? 0.5 : 1.0;
    double row = 0.0;
    for (std::size_t j = 0; j < nk; ++j) {
      const double k = k_range.lo + k_range.width() * static_cast<double>(j) / static_cast<double>(nk - 1);
      const double wk = (j == 0 || j + 1 == nk) ? 0.5 : 1.0;
      row += wk * f(x, k);
    }
    sum += wx * row;
  }
  return sum * hx * hk;
}

}  // namespace aahflow
