#pragma once

// Dimensionless Aubry-Andre-Harper Hamiltonian
//   H(x, k) = w k + cos k + a^2 (w x + cos x)
// with the Peierls phase fixed by 2*pi*beta = 1, so [x, k] = i.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "aahflow/errors.hpp"
#include "aahflow/phase_state.hpp"

namespace aahflow {

/// Peierls phase beta, fixed by the convention 2*pi*beta = 1. Not a parameter.
inline constexpr double kPeierlsPhase = 0.5 * std::numbers::inv_pi;

/// Anisotropy a (enters as a^2) and linear drift w of the AAH Hamiltonian.
class AahParams {
 public:
  AahParams(double a, double w) : a_(a), w_(w) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("AahParams: a must be positive and finite");
    if (!std::isfinite(w)) throw DomainError("AahParams: w must be finite");
  }

  double a() const { return a_; }
  double a2() const { return a_ * a_; }
  double w() const { return w_; }

 private:
  double a_;
  double w_;
};

inline double aah_energy(const AahParams& p, PhaseState s) {
  return p.w() * s.k + std::cos(s.k) + p.a2() * (p.w() * s.x + std::cos(s.x));
}

/// Hamilton flow (dH/dk, -dH/dx).
inline PhaseVelocity classical_velocity(const AahParams& p, PhaseState s) {
  return {p.w() - std::sin(s.k), -p.a2() * (p.w() - std::sin(s.x))};
}

enum class EnergyClass { ClosedPositive, ClosedNegative, Open, Threshold, OutOfRange };

inline std::string_view to_string(EnergyClass c) {
  switch (c) {
    case EnergyClass::ClosedPositive: return "closed_positive";
    case EnergyClass::ClosedNegative: return "closed_negative";
    case EnergyClass::Open: return "open";
    case EnergyClass::Threshold: return "threshold";
    case EnergyClass::OutOfRange: return "out_of_range";
  }
  return "out_of_range";
}

inline constexpr double kEnergyThresholdTolerance = 1e-12;

/// Level-set taxonomy of the pure Harper pattern (w = 0): closed orbits for
/// max(a^2-1, 0) < |eps| < a^2+1, open orbits for 0 < |eps| < a^2-1, and the
/// separatrix at |eps| = a^2-1.
inline EnergyClass classify_energy(const AahParams& p, double eps) {
  if (p.w() != 0.0) {
    throw UnsupportedRegimeError("classify_energy: only defined for w = 0");
  }
  if (!std::isfinite(eps)) throw DomainError("classify_energy: non-finite energy");
  const double a2 = p.a2();
  const double mag = std::abs(eps);
  if (std::abs(mag - (a2 - 1.0)) <= kEnergyThresholdTolerance) return EnergyClass::Threshold;
  const double closed_lo = std::max(a2 - 1.0, 0.0);
  if (mag > closed_lo && mag < a2 + 1.0) {
    return eps > 0.0 ? EnergyClass::ClosedPositive : EnergyClass::ClosedNegative;
  }
  if (mag > 0.0 && mag < a2 - 1.0) return EnergyClass::Open;
  return EnergyClass::OutOfRange;
}

}  // namespace aahflow
