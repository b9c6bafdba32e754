#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "aahflow/errors.hpp"
#include "aahflow/model.hpp"
#include "aahflow/numerics.hpp"
#include "aahflow/phase_state.hpp"
#include "aahflow/wigner.hpp"

namespace aahflow {

enum class FieldKind { Classical, Quantum };

inline std::string_view to_string(FieldKind k) { return k == FieldKind::Classical ? "classical" : "quantum"; }

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  FieldKind field_kind = FieldKind::Classical;
  double step = 0.0;
};

inline constexpr double kDefaultStep = 1e-3;
inline constexpr double kDefaultHorizon = 200.0;

namespace detail {

inline std::size_t step_count(double step, double horizon) {
  if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("integrate: step must be positive");
  if (!(horizon >= step) || !std::isfinite(horizon)) throw DomainError("integrate: horizon must be >= step");
  return static_cast<std::size_t>(std::llround(horizon / step));
}

inline Trajectory package(std::vector<PhaseState> states, FieldKind kind, double step) {
  Trajectory t;
  t.times.resize(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) t.times[i] = static_cast<double>(i) * step;
  t.states = std::move(states);
  t.field_kind = kind;
  t.step = step;
  return t;
}

}  // namespace detail

inline Trajectory integrate_classical(const AahParams& p, PhaseState start, double step, double horizon) {
  const std::size_t n = detail::step_count(step, horizon);
  auto field = [&p](PhaseState s) { return classical_velocity(p, s); };
  return detail::package(rk4_integrate(field, start, step, n), FieldKind::Classical, step);
}

inline Trajectory integrate_quantum(const GaussianEnsemble& ens, const AahParams& p, PhaseState start, double step,
                                    double horizon) {
  const std::size_t n = detail::step_count(step, horizon);
  auto field = [&ens, &p](PhaseState s) { return velocity(ens, p, s); };
  return detail::package(rk4_integrate(field, start, step, n), FieldKind::Quantum, step);
}

/// RK4 trajectory of the classical or quantum field over [0, horizon]. The
/// ensemble is ignored for the classical field.
inline Trajectory integrate(FieldKind kind, const GaussianEnsemble& ens, const AahParams& p, PhaseState start,
                            double step, double horizon) {
  return kind == FieldKind::Classical ? integrate_classical(p, start, step, horizon)
                                      : integrate_quantum(ens, p, start, step, horizon);
}

enum class Trend { Growing, Decaying, Bounded };

inline std::string_view to_string(Trend t) {
  switch (t) {
    case Trend::Growing: return "growing";
    case Trend::Decaying: return "decaying";
    case Trend::Bounded: return "bounded";
  }
  return "bounded";
}

inline constexpr double kEnvelopeMargin = 0.05;

struct EnvelopeVerdict {
  Trend trend = Trend::Bounded;
  double ratio = 1.0;       // late-window peak / early-window peak
  double early_peak = 0.0;
  double late_peak = 0.0;
  std::size_t peak_count = 0;
};

/// Compares the largest strict local maximum of |state - center| in the last
/// quarter of the trajectory against the first quarter.
inline EnvelopeVerdict envelope(const Trajectory& traj, PhaseState center) {
  const std::size_t n = traj.states.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = distance(traj.states[i], center);

  const std::size_t quarter = n / 4;
  EnvelopeVerdict v;
  bool early_found = false;
  bool late_found = false;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(d[i] > d[i - 1] && d[i] > d[i + 1])) continue;
    ++v.peak_count;
    if (i < quarter) {
      v.early_peak = early_found ? std::max(v.early_peak, d[i]) : d[i];
      early_found = true;
    } else if (i >= n - quarter) {
      v.late_peak = late_found ? std::max(v.late_peak, d[i]) : d[i];
      late_found = true;
    }
  }
  if (v.peak_count < 4 || !early_found || !late_found || !(v.early_peak > 0.0)) {
    throw InsufficientDataError("envelope: need at least four oscillation peaks spanning both windows");
  }
  v.ratio = v.late_peak / v.early_peak;
  if (v.ratio > 1.0 + kEnvelopeMargin) {
    v.trend = Trend::Growing;
  } else if (v.ratio < 1.0 - kEnvelopeMargin) {
    v.trend = Trend::Decaying;
  } else {
    v.trend = Trend::Bounded;
  }
  return v;
}

}  // namespace aahflow
