#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "aahflow/errors.hpp"
#include "aahflow/numerics.hpp"
#include "aahflow/phase_state.hpp"

namespace aahflow {

/// Evenly spaced values lo, ..., hi (inclusive) with n >= 2 nodes.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw DomainError("linspace: need at least two nodes");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi >= lo)) throw DomainError("linspace: bad range");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

/// Node lattice over an (x, k) rectangle. Samples are stored x-major:
/// index = ix * nk + ik.
struct PhaseGrid {
  Interval x_range{-std::numbers::pi, std::numbers::pi};
  Interval k_range{-std::numbers::pi, std::numbers::pi};
  std::size_t nx = 101;
  std::size_t nk = 101;

  void validate() const {
    if (nx < 2 || nk < 2) throw DomainError("PhaseGrid: resolutions must be >= 2");
    for (const Interval& r : {x_range, k_range}) {
      if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.hi > r.lo)) {
        throw DomainError("PhaseGrid: ranges must be finite and ascending");
      }
    }
  }

  std::size_t size() const { return nx * nk; }
  std::size_t index(std::size_t ix, std::size_t ik) const { return ix * nk + ik; }

  double x_at(std::size_t ix) const {
    return x_range.lo + x_range.width() * static_cast<double>(ix) / static_cast<double>(nx - 1);
  }
  double k_at(std::size_t ik) const {
    return k_range.lo + k_range.width() * static_cast<double>(ik) / static_cast<double>(nk - 1);
  }
  PhaseState node(std::size_t ix, std::size_t ik) const { return {x_at(ix), k_at(ik)}; }
};

}  // namespace aahflow
