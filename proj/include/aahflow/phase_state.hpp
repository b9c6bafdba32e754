#pragma once

#include <cmath>

namespace aahflow {

/// A point (x, k) of the dimensionless phase plane.
struct PhaseState {
  double x = 0.0;
  double k = 0.0;

  friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

/// Time derivative (dx/dtau, dk/dtau) of a phase-space point.
struct PhaseVelocity {
  double x = 0.0;
  double k = 0.0;

  friend bool operator==(const PhaseVelocity&, const PhaseVelocity&) = default;
};

inline bool is_finite(const PhaseState& s) { return std::isfinite(s.x) && std::isfinite(s.k); }
inline bool is_finite(const PhaseVelocity& v) { return std::isfinite(v.x) && std::isfinite(v.k); }

inline double distance(const PhaseState& a, const PhaseState& b) {
  return std::hypot(a.x - b.x, a.k - b.k);
}

}  // namespace aahflow
