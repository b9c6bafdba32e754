#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "aahflow/equilibrium.hpp"
#include "aahflow/grid.hpp"

using namespace aahflow;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

JacobianMatrix finite_difference_jacobian(double alpha, const AahParams& p, PhaseState s, double h = 1e-6) {
  const auto fx_p = quantum_velocity(alpha, p, {s.x + h, s.k});
  const auto fx_m = quantum_velocity(alpha, p, {s.x - h, s.k});
  const auto fk_p = quantum_velocity(alpha, p, {s.x, s.k + h});
  const auto fk_m = quantum_velocity(alpha, p, {s.x, s.k - h});
  return JacobianMatrix::from_entries((fx_p.x - fx_m.x) / (2 * h), (fk_p.x - fk_m.x) / (2 * h),
                                      (fx_p.k - fx_m.k) / (2 * h), (fk_p.k - fk_m.k) / (2 * h));
}

JacobianMatrix with_invariants(double trace, double det, double delta) {
  JacobianMatrix j;
  j.trace = trace;
  j.det = det;
  j.delta = delta;
  return j;
}

}  // namespace

TEST_CASE("Newton finds the stagnation points", "[equilibrium]") {
  const double x0 = std::asin(0.4);
  const auto near_classical = find_equilibrium(GaussianEnsemble(1e-6), AahParams(1.0, 0.4), {0.4, 0.4});
  CHECK_THAT(near_classical.x, WithinAbs(x0, 1e-6));
  CHECK_THAT(near_classical.k, WithinAbs(x0, 1e-6));
  CHECK_THAT(x0, WithinAbs(0.411517, 1e-6));

  for (double alpha : {0.2, 1.0, 2.5}) {
    const auto origin = find_equilibrium(GaussianEnsemble(alpha), AahParams(1.3, 0.0), {0.1, -0.1});
    CHECK_THAT(origin.x, WithinAbs(0.0, 1e-12));
    CHECK_THAT(origin.k, WithinAbs(0.0, 1e-12));
  }

  // 40-digit roots of sin(x) C(x) = 0.4
  const std::vector<std::pair<double, double>> roots = {
      {0.1, 0.41187936732026205005}, {0.2, 0.41295270552201221610}, {0.3, 0.41469329162536494546}};
  for (const auto& [alpha, root] : roots) {
    const auto s = find_equilibrium(GaussianEnsemble(alpha), AahParams(1.0, 0.4), {0.4, 0.4});
    const double shifted = std::asin(0.4 / (1 - alpha * alpha / 12));
    INFO("alpha " << alpha);
    CHECK_THAT(s.x, WithinAbs(root, 1e-12));
    CHECK_THAT(s.k, WithinAbs(root, 1e-12));
    // the second-order shift leaves an alpha^4 residue
    CHECK(std::abs(s.x - shifted) <= 0.02 * std::pow(alpha, 4));
    CHECK(max_abs(quantum_velocity(alpha, AahParams(1.0, 0.4), s)) <= 1e-12);
  }
}

TEST_CASE("Newton failure modes", "[equilibrium]") {
  NewtonOptions capped;
  capped.max_iterations = 1;
  try {
    find_equilibrium(GaussianEnsemble(0.5), AahParams(1.0, 0.4), {1.2, -0.3}, capped);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.residual() > 1e-12);
    CHECK(is_finite(e.last_iterate()));
  }
  // classical field at (0, pi/2): only d(omega_k)/dx survives
  CHECK_THROWS_AS(solve_stagnation(0.0, AahParams(1.0, 0.4), {0.0, pi / 2}), SingularJacobianError);
  CHECK_THROWS_AS(find_equilibrium(GaussianEnsemble(0.5), AahParams(1.0, 0.0), {std::nan(""), 0.0}), DomainError);
}

TEST_CASE("analytic Jacobian", "[equilibrium]") {
  const AahParams p(1.3, 0.4);
  const auto s = find_equilibrium(GaussianEnsemble(1e-6), p, {0.4, 0.4});
  const auto j = jacobian_at(GaussianEnsemble(1e-6), p, s);
  CHECK_THAT(j.dxdx, WithinAbs(0.0, 1e-10));
  CHECK_THAT(j.dkdk, WithinAbs(0.0, 1e-10));
  CHECK_THAT(j.dxdk, WithinAbs(-std::cos(s.x), 1e-10));
  CHECK_THAT(j.dkdx, WithinAbs(p.a2() * std::cos(s.x), 1e-10));
  CHECK_THAT(j.trace, WithinAbs(0.0, 1e-10));

  const AahParams iso(1.0, 0.4);
  const GaussianEnsemble ens(0.3);
  const auto e = find_equilibrium(ens, iso, {0.4, 0.4});
  CHECK_THAT(jacobian_at(ens, iso, e).det, WithinAbs(0.82561078254297081952, 1e-12));
  CHECK_THAT(jacobian_at(ens, iso, e).det, WithinAbs(0.825, 2 * std::pow(0.3, 4)));
  CHECK_THAT(iso.a2() * (1 - 0.16 - 0.09 / 6), WithinAbs(0.825, 1e-12));

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coord(-pi, pi);
  std::uniform_real_distribution<double> alpha_d(0.1, 3.0);
  std::uniform_real_distribution<double> a_d(0.5, 1.5);
  std::uniform_real_distribution<double> w_d(0.0, 0.8);
  for (int i = 0; i < 1000; ++i) {
    const double alpha = alpha_d(rng);
    const AahParams q(a_d(rng), w_d(rng));
    const PhaseState pt{coord(rng), coord(rng)};
    const auto an = velocity_jacobian(alpha, q, pt);
    const auto fd = finite_difference_jacobian(alpha, q, pt);
    // entries reach 1e4 at large alpha, where the difference quotient itself has 1e-6 roundoff
    const double scale = std::max(1.0, an.max_abs_entry());
    REQUIRE_THAT(an.dxdx, WithinAbs(fd.dxdx, 1e-6 * scale));
    REQUIRE_THAT(an.dxdk, WithinAbs(fd.dxdk, 1e-6 * scale));
    REQUIRE_THAT(an.dkdx, WithinAbs(fd.dkdx, 1e-6 * scale));
    REQUIRE_THAT(an.dkdk, WithinAbs(fd.dkdk, 1e-6 * scale));
    REQUIRE_THAT(an.trace, WithinAbs(an.dxdx + an.dkdk, 1e-15));
  }
}

TEST_CASE("classification rules", "[equilibrium]") {
  CHECK(classify(with_invariants(0.01, 0.8, 0.0001 - 3.2)) == StabilityClass::UnstableFocus);
  CHECK(classify(with_invariants(-0.01, 0.8, 0.0001 - 3.2)) == StabilityClass::StableFocus);
  CHECK(classify(with_invariants(3.0, 1.0, 5.0)) == StabilityClass::UnstableNode);
  CHECK(classify(with_invariants(-3.0, 1.0, 5.0)) == StabilityClass::StableNode);
  CHECK(classify(with_invariants(0.2, -0.5, 2.04)) == StabilityClass::Saddle);
  CHECK(classify(with_invariants(0.0, 0.8, -3.2)) == StabilityClass::NonHyperbolic);
  CHECK(classify(with_invariants(0.5, 0.0, 0.25)) == StabilityClass::NonHyperbolic);
  CHECK(classify(with_invariants(1e-10, 0.8, -3.2)) == StabilityClass::NonHyperbolic);
  CHECK(classify(with_invariants(1e-10, 0.8, -3.2), 1e-12) == StabilityClass::UnstableFocus);
  CHECK(classify(with_invariants(std::nan(""), 0.8, 0.0)) == StabilityClass::Unresolved);
  CHECK_THROWS_AS(classify(with_invariants(0.1, 0.8, 0.0), 0.0), DomainError);
  CHECK(to_string(StabilityClass::UnstableFocus) == "unstable_focus");
}

TEST_CASE("classification is scale covariant", "[equilibrium][property]") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  std::uniform_real_distribution<double> log_c(-3.0, 3.0);
  int checked = 0;
  while (checked < 1000) {
    const auto j = JacobianMatrix::from_entries(entry(rng), entry(rng), entry(rng), entry(rng));
    const double c = std::pow(10.0, log_c(rng));
    const auto s = j.scaled(c);
    // keep both matrices clear of the absolute tolerance band
    const double lo = std::min({std::abs(j.trace), std::abs(j.det), std::abs(j.delta), std::abs(s.trace),
                                std::abs(s.det), std::abs(s.delta)});
    if (lo < 1e-6) continue;
    REQUIRE(classify(s) == classify(j));
    ++checked;
  }
}

TEST_CASE("perturbative laws", "[equilibrium]") {
  CHECK(perturbative_trace(GaussianEnsemble(0.7), AahParams(1.0, 0.4)) == 0.0);
  CHECK(perturbative_trace(GaussianEnsemble(0.7), AahParams(1.3, 0.0)) == 0.0);
  const double expected = std::pow(0.5, 4) / 3 * (1.44 - 1) * 0.4 * std::asin(0.4);
  const double t = perturbative_trace(GaussianEnsemble(0.5), AahParams(1.2, 0.4));
  CHECK_THAT(t, WithinRel(expected, 1e-14));
  CHECK_THAT(t, WithinAbs(0.0015093, 5e-7));
  CHECK_THROWS_AS(perturbative_trace(GaussianEnsemble(1.5), AahParams(1.2, 0.4)), OutOfRegimeError);

  {
    const AahParams p(1.2, 0.4);
    const GaussianEnsemble ens(0.5);
    const double numeric = jacobian_at(ens, p, tracked_equilibrium(p, 0.5)).trace;
    CHECK(numeric > 0.5 * t);
    CHECK(numeric < 2.0 * t);
  }

  for (double alpha : {0.1, 0.2, 0.3}) {
    for (double w : {0.0, 0.2, 0.4, 0.6, 0.8}) {
      for (double a : {0.8, 1.0, 1.2}) {
        const AahParams p(a, w);
        const GaussianEnsemble ens(alpha);
        const double det = jacobian_at(ens, p, tracked_equilibrium(p, alpha)).det;
        INFO("alpha " << alpha << " w " << w << " a " << a);
        CHECK(std::abs(det - perturbative_determinant(ens, p)) <= 2 * std::pow(alpha, 4));
      }
    }
  }

  for (double alpha : {0.3, 0.5}) {
    for (double w : {0.2, 0.4, 0.6}) {
      for (double a : {0.8, 1.2}) {
        const AahParams p(a, w);
        const GaussianEnsemble ens(alpha);
        const double trace = jacobian_at(ens, p, tracked_equilibrium(p, alpha)).trace;
        INFO("alpha " << alpha << " w " << w << " a " << a);
        CHECK(std::abs(trace - perturbative_trace(ens, p)) <= 5 * std::pow(alpha, 6));
      }
    }
  }

  CHECK_THAT(perturbative_saddle_threshold(0.4), WithinAbs(2.245, 5e-4));
}

TEST_CASE("saddle threshold", "[equilibrium][threshold]") {
  const auto r = saddle_threshold(AahParams(1.0, 0.4), {1.5, 3.5});
  INFO("alpha* = " << r.alpha_star);
  CHECK(r.alpha_star >= 2.29);
  CHECK(r.alpha_star <= 2.59);
  CHECK_THAT(r.alpha_star_perturbative, WithinAbs(std::sqrt(6 * 0.84), 1e-12));
  CHECK(r.iterations > 0);
  CHECK(r.w == 0.4);

  CHECK_THROWS_AS(saddle_threshold(AahParams(1.0, 0.4), {0.5, 1.5}), BracketError);
  CHECK_THROWS_AS(saddle_threshold(AahParams(1.0, 0.4), {3.0, 2.0}), BracketError);

  const double t01 = saddle_threshold(AahParams(1.0, 0.1), {3.0, 6.0}).alpha_star;
  const double t07 = saddle_threshold(AahParams(1.0, 0.7), {1.0, 3.0}).alpha_star;
  const double t099 = saddle_threshold(AahParams(1.0, 0.99), {0.5, 2.5}).alpha_star;
  INFO("thresholds " << t01 << " " << r.alpha_star << " " << t07 << " " << t099);
  CHECK(t01 > r.alpha_star);
  CHECK(r.alpha_star > t07);
  CHECK(t099 < r.alpha_star);
}

TEST_CASE("stability scan", "[equilibrium][scan]") {
  const std::vector<double> alphas = linspace(0.0, 1.0, 11);
  const std::vector<double> as = {0.8, 1.0, 1.2};
  const auto table = stability_scan(alphas, as, 0.4);
  REQUIRE(table.cells.size() == alphas.size() * as.size());

  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const auto& cell = table.at(i, 1);
    CHECK(cell.a == 1.0);
    CHECK(std::abs(cell.report.jacobian.trace) <= 1e-6);
    CHECK(cell.report.cls == StabilityClass::NonHyperbolic);
  }
  CHECK(table.at(5, 2).report.cls == StabilityClass::UnstableFocus);
  CHECK(table.at(5, 0).report.cls == StabilityClass::StableFocus);
  CHECK(table.at(5, 2).alpha == 0.5);

  // w beyond the classical band has no seed; every cell is left unresolved
  const auto empty = stability_scan({0.5}, {1.0}, 1.5);
  CHECK(empty.cells.front().report.cls == StabilityClass::Unresolved);

  ScanOptions threaded;
  threaded.workers = 3;
  const auto again = stability_scan(alphas, as, 0.4, threaded);
  for (std::size_t i = 0; i < table.cells.size(); ++i) {
    REQUIRE(again.cells[i].report.point == table.cells[i].report.point);
    REQUIRE(again.cells[i].report.cls == table.cells[i].report.cls);
  }

  CHECK_THROWS_AS(stability_scan({0.5, 0.2}, as, 0.4), DomainError);
  CHECK_THROWS_AS(stability_scan({}, as, 0.4), DomainError);
}

TEST_CASE("stagnation region", "[equilibrium]") {
  const GaussianEnsemble ens(0.5);
  const AahParams p(1.0, 0.4);
  PhaseGrid grid;
  grid.nx = 61;
  grid.nk = 61;

  const auto none = stagnation_region(ens, p, grid, 0.0);
  CHECK(std::count(none.begin(), none.end(), 1) == 0);

  const auto all = stagnation_region(ens, p, grid, 1e300);
  CHECK(std::count(all.begin(), all.end(), 1) == static_cast<long>(grid.size()));

  const auto eq = find_equilibrium(ens, p, {0.4, 0.4});
  const auto mask = stagnation_region(ens, p, grid, 0.07);
  const double dx = (grid.x_range.hi - grid.x_range.lo) / (grid.nx - 1);
  const double dk = (grid.k_range.hi - grid.k_range.lo) / (grid.nk - 1);
  const auto ix = static_cast<std::size_t>(std::lround((eq.x - grid.x_range.lo) / dx));
  const auto ik = static_cast<std::size_t>(std::lround((eq.k - grid.k_range.lo) / dk));
  CHECK(mask[grid.index(ix, ik)] == 1);

  CHECK_THROWS_AS(stagnation_region(ens, p, grid, -1.0), DomainError);
}

TEST_CASE("exhaustive equilibrium search", "[equilibrium]") {
  const auto all = find_all_equilibria(GaussianEnsemble(0.5), AahParams(1.0, 0.4));
  // sin x C(k) = w and sin k C(x) = w have four solutions per cell
  CHECK(all.size() == 4);
  const auto eq = find_equilibrium(GaussianEnsemble(0.5), AahParams(1.0, 0.4), {0.4, 0.4});
  const bool found = std::any_of(all.begin(), all.end(), [&](const auto& r) { return distance(r.point, eq) < 1e-9; });
  CHECK(found);
  for (const auto& r : all) CHECK(r.residual <= 1e-12);
}
