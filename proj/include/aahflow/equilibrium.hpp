#pragma once

// Stagnation points of the quantum velocity field, their analytic Jacobian,
// hyperbolic classification, the saddle threshold in alpha and (alpha, a)
// stability scans.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "aahflow/errors.hpp"
#include "aahflow/grid.hpp"
#include "aahflow/model.hpp"
#include "aahflow/numerics.hpp"
#include "aahflow/parallel.hpp"
#include "aahflow/phase_state.hpp"
#include "aahflow/wigner.hpp"

namespace aahflow {

/// Partials of (omega_x, omega_k) with respect to (x, k), plus the invariants
/// used for classification.
struct JacobianMatrix {
  double dxdx = 0.0;
  double dxdk = 0.0;
  double dkdx = 0.0;
  double dkdk = 0.0;
  double trace = 0.0;
  double det = 0.0;
  double delta = 0.0;  // trace^2 - 4 det

  static JacobianMatrix from_entries(double dxdx, double dxdk, double dkdx, double dkdk) {
    JacobianMatrix j{dxdx, dxdk, dkdx, dkdk};
    j.trace = dxdx + dkdk;
    j.det = dxdx * dkdk - dxdk * dkdx;
    j.delta = j.trace * j.trace - 4.0 * j.det;
    return j;
  }

  JacobianMatrix scaled(double c) const { return from_entries(c * dxdx, c * dxdk, c * dkdx, c * dkdk); }

  double max_abs_entry() const {
    return std::max({std::abs(dxdx), std::abs(dxdk), std::abs(dkdx), std::abs(dkdk)});
  }
};

enum class StabilityClass { StableFocus, UnstableFocus, StableNode, UnstableNode, Saddle, NonHyperbolic, Unresolved };

inline std::string_view to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::StableFocus: return "stable_focus";
    case StabilityClass::UnstableFocus: return "unstable_focus";
    case StabilityClass::StableNode: return "stable_node";
    case StabilityClass::UnstableNode: return "unstable_node";
    case StabilityClass::Saddle: return "saddle";
    case StabilityClass::NonHyperbolic: return "non_hyperbolic";
    case StabilityClass::Unresolved: return "unresolved";
  }
  return "unresolved";
}

inline bool is_stable(StabilityClass c) { return c == StabilityClass::StableFocus || c == StabilityClass::StableNode; }
inline bool is_unstable(StabilityClass c) {
  return c == StabilityClass::UnstableFocus || c == StabilityClass::UnstableNode;
}

inline constexpr double kDefaultClassifyTolerance = 1e-9;

/// Hyperbolic classification from trace, determinant and discriminant.
inline StabilityClass classify(const JacobianMatrix& j, double tol = kDefaultClassifyTolerance) {
  if (!(tol > 0.0)) throw DomainError("classify: tolerance must be positive");
  if (!std::isfinite(j.trace) || !std::isfinite(j.det)) return StabilityClass::Unresolved;
  if (j.det < -tol) return StabilityClass::Saddle;
  if (std::abs(j.det) <= tol) return StabilityClass::NonHyperbolic;
  if (std::abs(j.trace) <= tol) return StabilityClass::NonHyperbolic;
  const bool focus = j.delta < -tol;
  if (j.trace > tol) return focus ? StabilityClass::UnstableFocus : StabilityClass::UnstableNode;
  return focus ? StabilityClass::StableFocus : StabilityClass::StableNode;
}

/// Analytic Jacobian of the quantum velocity for alpha >= 0 (alpha = 0 is
/// the classical Hamilton flow).
inline JacobianMatrix velocity_jacobian(double alpha, const AahParams& p, PhaseState s) {
  const double sx = std::sin(s.x);
  const double sk = std::sin(s.k);
  return JacobianMatrix::from_entries(-sk * spread_factor_slope(alpha, s.x), -std::cos(s.k) * spread_factor(alpha, s.x),
                                      p.a2() * std::cos(s.x) * spread_factor(alpha, s.k),
                                      p.a2() * sx * spread_factor_slope(alpha, s.k));
}

inline JacobianMatrix jacobian_at(const GaussianEnsemble& ens, const AahParams& p, PhaseState s) {
  return velocity_jacobian(ens.alpha(), p, s);
}

struct NewtonOptions {
  double tolerance = 1e-12;      // on max |omega|
  int max_iterations = 50;
  int max_halvings = 20;
  double singular_scale = 1e-14;  // |det| below this times max entry^2 is singular
};

inline double max_abs(PhaseVelocity v) { return std::max(std::abs(v.x), std::abs(v.k)); }

/// Damped Newton on omega(x, k) = 0 with half-step line search on the
/// residual 2-norm. alpha >= 0.
inline PhaseState solve_stagnation(double alpha, const AahParams& p, PhaseState guess,
                                   const NewtonOptions& opt = {}) {
  if (!is_finite(guess)) throw DomainError("find_equilibrium: non-finite guess");
  PhaseState s = guess;
  PhaseVelocity r = quantum_velocity(alpha, p, s);
  if (!is_finite(r)) throw SolverError("find_equilibrium: non-finite residual at guess", s, max_abs(r));

  for (int it = 0; it < opt.max_iterations; ++it) {
    if (max_abs(r) <= opt.tolerance) return s;
    const JacobianMatrix j = velocity_jacobian(alpha, p, s);
    const double scale = std::max(j.max_abs_entry() * j.max_abs_entry(), std::numeric_limits<double>::min());
    if (!(std::abs(j.det) >= opt.singular_scale * scale)) {
      throw SingularJacobianError("find_equilibrium: singular Jacobian", s, max_abs(r));
    }
    const double dx = (-r.x * j.dkdk + r.k * j.dxdk) / j.det;
    const double dk = (-r.k * j.dxdx + r.x * j.dkdx) / j.det;

    const double norm0 = std::hypot(r.x, r.k);
    double lambda = 1.0;
    PhaseState trial{};
    PhaseVelocity rt{};
    for (int h = 0;; ++h) {
      trial = {s.x + lambda * dx, s.k + lambda * dk};
      rt = quantum_velocity(alpha, p, trial);
      if (is_finite(rt) && std::hypot(rt.x, rt.k) < norm0) break;
      if (h == opt.max_halvings) break;
      lambda *= 0.5;
    }
    if (!is_finite(rt)) throw SolverError("find_equilibrium: non-finite residual during line search", s, max_abs(r));
    s = trial;
    r = rt;
  }
  if (max_abs(r) <= opt.tolerance) return s;
  throw SolverError("find_equilibrium: no convergence after " + std::to_string(opt.max_iterations) + " iterations",
                    s, max_abs(r));
}

inline PhaseState find_equilibrium(const GaussianEnsemble& ens, const AahParams& p, PhaseState guess,
                                   const NewtonOptions& opt = {}) {
  return solve_stagnation(ens.alpha(), p, guess, opt);
}

/// The classical symmetric equilibrium x = k = arcsin(w); exists for |w| <= 1.
inline PhaseState classical_symmetric_equilibrium(const AahParams& p) {
  if (std::abs(p.w()) > 1.0) throw UnsupportedRegimeError("no classical equilibrium for |w| > 1");
  const double x = std::asin(p.w());
  return {x, x};
}

/// Largest alpha increment taken in one continuation step.
inline constexpr double kContinuationStep = 0.1;

/// Follows a stagnation point from alpha_from to alpha_to in increments of
/// at most kContinuationStep, each solve seeded with the previous solution.
inline PhaseState continue_equilibrium(const AahParams& p, double alpha_from, PhaseState from, double alpha_to,
                                       const NewtonOptions& opt = {}) {
  const double span = alpha_to - alpha_from;
  const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(span) / kContinuationStep)));
  PhaseState s = from;
  for (int i = 1; i <= pieces; ++i) {
    const double alpha = i == pieces ? alpha_to : alpha_from + span * static_cast<double>(i) / pieces;
    s = solve_stagnation(alpha, p, s, opt);
  }
  return s;
}

/// The equilibrium continued from the classical symmetric point at alpha = 0.
inline PhaseState tracked_equilibrium(const AahParams& p, double alpha, const NewtonOptions& opt = {}) {
  return continue_equilibrium(p, 0.0, classical_symmetric_equilibrium(p), alpha, opt);
}

struct EquilibriumReport {
  PhaseState point;
  JacobianMatrix jacobian;
  StabilityClass cls = StabilityClass::Unresolved;
  double residual = 0.0;
};

inline EquilibriumReport make_report(double alpha, const AahParams& p, PhaseState point,
                                     double tol = kDefaultClassifyTolerance) {
  EquilibriumReport rep;
  rep.point = point;
  rep.jacobian = velocity_jacobian(alpha, p, point);
  rep.cls = classify(rep.jacobian, tol);
  rep.residual = max_abs(quantum_velocity(alpha, p, point));
  return rep;
}

inline EquilibriumReport equilibrium_report(const GaussianEnsemble& ens, const AahParams& p, PhaseState guess,
                                            const NewtonOptions& opt = {}, double tol = kDefaultClassifyTolerance) {
  return make_report(ens.alpha(), p, find_equilibrium(ens, p, guess, opt), tol);
}

/// Seeds Newton from an n-by-n lattice over (-pi, pi]^2 and keeps the distinct
/// roots that land in that cell, sorted by (x, k).
inline std::vector<EquilibriumReport> find_all_equilibria(const GaussianEnsemble& ens, const AahParams& p,
                                                          std::size_t lattice = 12, const NewtonOptions& opt = {},
                                                          double tol = kDefaultClassifyTolerance) {
  constexpr double pi = std::numbers::pi;
  std::vector<PhaseState> roots;
  for (std::size_t i = 0; i < lattice; ++i) {
    for (std::size_t j = 0; j < lattice; ++j) {
      const PhaseState guess{-pi + 2.0 * pi * (i + 0.5) / lattice, -pi + 2.0 * pi * (j + 0.5) / lattice};
      PhaseState root;
      try {
        root = find_equilibrium(ens, p, guess, opt);
      } catch (const SolverError&) {
        continue;
      }
      if (root.x <= -pi || root.x > pi || root.k <= -pi || root.k > pi) continue;
      const bool seen = std::any_of(roots.begin(), roots.end(), [&](PhaseState r) { return distance(r, root) < 1e-8; });
      if (!seen) roots.push_back(root);
    }
  }
  std::sort(roots.begin(), roots.end(), [](PhaseState a, PhaseState b) { return a.x != b.x ? a.x < b.x : a.k < b.k; });
  std::vector<EquilibriumReport> out;
  out.reserve(roots.size());
  for (const PhaseState& r : roots) out.push_back(make_report(ens.alpha(), p, r, tol));
  return out;
}

/// Trace at the symmetric equilibrium to O(alpha^4):
/// (alpha^4 / 3) (a^2 - 1) w arcsin(w). Valid for alpha <= 1.
inline double perturbative_trace(const GaussianEnsemble& ens, const AahParams& p) {
  if (ens.alpha() > 1.0) throw OutOfRegimeError("perturbative_trace: requires alpha <= 1");
  if (std::abs(p.w()) > 1.0) throw DomainError("perturbative_trace: requires |w| <= 1");
  const double a4 = std::pow(ens.alpha(), 4);
  return a4 / 3.0 * (p.a2() - 1.0) * p.w() * std::asin(p.w());
}

/// Determinant at the symmetric equilibrium to O(alpha^2): a^2 (1 - w^2 - alpha^2/6).
inline double perturbative_determinant(const GaussianEnsemble& ens, const AahParams& p) {
  return p.a2() * (1.0 - p.w() * p.w() - ens.alpha() * ens.alpha() / 6.0);
}

/// Root of the O(alpha^2) determinant, sqrt(6 (1 - w^2)).
inline double perturbative_saddle_threshold(double w) {
  if (std::abs(w) > 1.0) throw DomainError("perturbative_saddle_threshold: requires |w| <= 1");
  return std::sqrt(6.0 * (1.0 - w * w));
}

struct ThresholdResult {
  double w = 0.0;
  double alpha_star = 0.0;
  double alpha_star_perturbative = 0.0;
  Interval bracket;
  int iterations = 0;
};

inline constexpr double kThresholdWidth = 1e-6;

/// Bisection in alpha on the sign of det(jacobian) at the tracked symmetric
/// equilibrium. Each midpoint is re-solved by continuation from the nearer
/// bracket end.
inline ThresholdResult saddle_threshold(const AahParams& p, Interval bracket, const NewtonOptions& opt = {},
                                        double width = kThresholdWidth) {
  if (!(bracket.lo > 0.0) || !(bracket.hi > bracket.lo) || !std::isfinite(bracket.hi)) {
    throw BracketError("saddle_threshold: bracket must satisfy 0 < lo < hi");
  }
  PhaseState at_lo = tracked_equilibrium(p, bracket.lo, opt);
  PhaseState at_hi = continue_equilibrium(p, bracket.lo, at_lo, bracket.hi, opt);
  const double det_lo = velocity_jacobian(bracket.lo, p, at_lo).det;
  const double det_hi = velocity_jacobian(bracket.hi, p, at_hi).det;
  if (!(det_lo > 0.0 && det_hi < 0.0)) {
    throw BracketError("saddle_threshold: det does not change sign from positive to negative on [" +
                       std::to_string(bracket.lo) + ", " + std::to_string(bracket.hi) + "]");
  }
  double lo = bracket.lo;
  double hi = bracket.hi;
  int iterations = 0;
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    const bool from_lo = (mid - lo) <= (hi - mid);
    const PhaseState at_mid = from_lo ? continue_equilibrium(p, lo, at_lo, mid, opt)
                                      : continue_equilibrium(p, hi, at_hi, mid, opt);
    const double det_mid = velocity_jacobian(mid, p, at_mid).det;
    if (det_mid > 0.0) {
      lo = mid;
      at_lo = at_mid;
    } else {
      hi = mid;
      at_hi = at_mid;
    }
    ++iterations;
  }
  ThresholdResult out;
  out.w = p.w();
  out.alpha_star = 0.5 * (lo + hi);
  out.alpha_star_perturbative = perturbative_saddle_threshold(p.w());
  out.bracket = bracket;
  out.iterations = iterations;
  return out;
}

// ---------------------------------------------------------------------------
// Stability scans
// ---------------------------------------------------------------------------

struct ScanCell {
  double alpha = 0.0;
  double a = 0.0;
  EquilibriumReport report;  // cls == Unresolved when Newton failed
};

/// Cells stored alpha-major: index = i_alpha * a_values.size() + i_a.
struct ScanTable {
  double w = 0.0;
  std::vector<double> alpha_values;
  std::vector<double> a_values;
  std::vector<ScanCell> cells;

  const ScanCell& at(std::size_t i_alpha, std::size_t i_a) const { return cells[i_alpha * a_values.size() + i_a]; }
};

struct ScanOptions {
  NewtonOptions newton;
  double classify_tolerance = kDefaultClassifyTolerance;
  unsigned workers = 1;
};

namespace detail {

inline void require_ascending(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw DomainError(std::string("stability_scan: empty ") + what + " grid");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) throw DomainError(std::string("stability_scan: non-finite ") + what + " value");
    if (i > 0 && !(v[i] > v[i - 1])) throw DomainError(std::string("stability_scan: ") + what + " grid not ascending");
  }
}

}  // namespace detail

/// Per a-value, the symmetric equilibrium is continued along ascending alpha
/// (alpha = 0 is the classical limit). Cells where Newton fails are marked
/// Unresolved and the next cell is seeded from the last success.
inline ScanTable stability_scan(const std::vector<double>& alpha_values, const std::vector<double>& a_values, double w,
                                const ScanOptions& opt = {}) {
  detail::require_ascending(alpha_values, "alpha");
  detail::require_ascending(a_values, "a");
  if (alpha_values.front() < 0.0) throw DomainError("stability_scan: alpha must be non-negative");
  if (!(a_values.front() > 0.0)) throw DomainError("stability_scan: a must be positive");

  ScanTable table;
  table.w = w;
  table.alpha_values = alpha_values;
  table.a_values = a_values;
  const std::size_t n_alpha = alpha_values.size();
  const std::size_t n_a = a_values.size();
  table.cells.resize(n_alpha * n_a);

  parallel_for(n_a, opt.workers, [&](std::size_t ia) {
    const AahParams p(a_values[ia], w);
    bool have_seed = false;
    double seed_alpha = 0.0;
    PhaseState seed{};
    try {
      seed = classical_symmetric_equilibrium(p);
      have_seed = true;
    } catch (const Error&) {
      have_seed = false;
    }
    for (std::size_t i = 0; i < n_alpha; ++i) {
      ScanCell& cell = table.cells[i * n_a + ia];
      cell.alpha = alpha_values[i];
      cell.a = a_values[ia];
      cell.report.cls = StabilityClass::Unresolved;
      cell.report.point = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
      cell.report.residual = std::numeric_limits<double>::quiet_NaN();
      const double nan = std::numeric_limits<double>::quiet_NaN();
      cell.report.jacobian = JacobianMatrix{nan, nan, nan, nan, nan, nan, nan};
      if (!have_seed) continue;
      try {
        const PhaseState sol = continue_equilibrium(p, seed_alpha, seed, alpha_values[i], opt.newton);
        cell.report = make_report(alpha_values[i], p, sol, opt.classify_tolerance);
        seed = sol;
        seed_alpha = alpha_values[i];
      } catch (const Error&) {
        // left Unresolved
      }
    }
  });
  return table;
}

/// Grid nodes where |omega| < speed_threshold, in PhaseGrid order.
inline std::vector<std::uint8_t> stagnation_region(const GaussianEnsemble& ens, const AahParams& p,
                                                   const PhaseGrid& grid, double speed_threshold) {
  grid.validate();
  if (!(speed_threshold >= 0.0)) throw DomainError("stagnation_region: threshold must be non-negative");
  std::vector<std::uint8_t> mask(grid.size(), 0);
  for (std::size_t ix = 0; ix < grid.nx; ++ix) {
    for (std::size_t ik = 0; ik < grid.nk; ++ik) {
      const PhaseVelocity v = velocity(ens, p, grid.node(ix, ik));
      mask[grid.index(ix, ik)] = std::hypot(v.x, v.k) < speed_threshold ? 1 : 0;
    }
  }
  return mask;
}

}  // namespace aahflow
