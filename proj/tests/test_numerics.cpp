#include "catch_amalgamated.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "aahflow/numerics.hpp"

using namespace aahflow;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Independent oracle: Maclaurin series in long double with a fixed 60 terms.
long double erf_series_oracle(long double z) {
  long double term = z;
  long double sum = z;
  for (int n = 1; n < 60; ++n) {
    term *= -z * z / n;
    sum += term / (2 * n + 1);
  }
  return sum * 2.0L / std::sqrt(std::numbers::pi_v<long double>);
}

// Asymptotic expansion erfcx(z) ~ 1/(z sqrt(pi)) sum_m (-1)^m (2m-1)!! / (2 z^2)^m.
double erfcx_asymptotic_oracle(double z, int terms) {
  double sum = 0.0;
  double term = 1.0;
  for (int m = 0; m < terms; ++m) {
    sum += term;
    term *= -(2.0 * m + 1.0) / (2.0 * z * z);
  }
  return sum / (z * std::sqrt(std::numbers::pi));
}

}  // namespace

TEST_CASE("erf matches reference values", "[numerics][erf]") {
  CHECK(aahflow::erf(0.0) == 0.0);
  CHECK_THAT(aahflow::erf(0.25), WithinAbs(0.2763263902, 1e-10));
  CHECK_THAT(aahflow::erf(0.25), WithinAbs(static_cast<double>(erf_series_oracle(0.25L)), 1e-15));
  CHECK_THAT(aahflow::erf(7.0), WithinAbs(1.0, 1e-15));

  // 40-digit reference values
  const std::vector<std::pair<double, double>> table = {
      {-3.5, -0.99999925690162765859}, {-1.2, -0.91031397822963538024}, {0.5, 0.52049987781304653768},
      {1.0, 0.84270079294971486934},   {1.9, 0.99279042923525746995},   {2.0, 0.99532226501895273416},
      {2.1, 0.9970205333436670145},    {3.0, 0.99997790950300141456},   {4.5, 0.99999999980338395585},
      {6.0, 0.99999999999999997848},
  };
  for (const auto& [z, expected] : table) {
    INFO("z = " << z);
    CHECK_THAT(aahflow::erf(z), WithinAbs(expected, 1e-13));
  }
}

TEST_CASE("erf series and continued-fraction branches agree at the switch point", "[numerics][erf]") {
  const double series = detail::erf_maclaurin(2.0);
  const double tail = 1.0 - std::exp(-4.0) * detail::erfcx_continued_fraction(2.0);
  CHECK_THAT(series, WithinAbs(tail, 1e-13));
}

TEST_CASE("erf is exactly odd", "[numerics][erf][property]") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> dist(-8.0, 8.0);
  for (int i = 0; i < 10000; ++i) {
    const double z = dist(rng);
    REQUIRE(aahflow::erf(-z) == -aahflow::erf(z));
  }
}

TEST_CASE("erf rejects non-finite input", "[numerics][erf]") {
  CHECK_THROWS_AS(aahflow::erf(std::numeric_limits<double>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(aahflow::erf(std::numeric_limits<double>::infinity()), DomainError);
  CHECK_THROWS_AS(erfcx(-std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("erfcx reference values and identities", "[numerics][erfcx]") {
  CHECK(erfcx(0.0) == 1.0);
  CHECK_THAT(erfcx(1.0), WithinAbs(std::exp(1.0) * (1.0 - aahflow::erf(1.0)), 1e-12));

  const std::vector<std::pair<double, double>> table = {
      {0.3, 0.73459933456765514229},  {1.0, 0.42758357615580700441},  {2.5, 0.21080636406114358065},
      {5.0, 0.11070463773306862637},  {10.0, 0.056140992743822585858}, {25.0, 0.022549572432641358944},
      {-1.0, 5.0089800807622834663},  {-3.0, 16205.988853999586625},
  };
  for (const auto& [z, expected] : table) {
    INFO("z = " << z);
    CHECK_THAT(erfcx(z), WithinRel(expected, 1e-12));
  }
}

TEST_CASE("erfcx follows its large-argument asymptotic series", "[numerics][erfcx]") {
  // Four asymptotic terms leave a truncation error of order 105/(16 z^8).
  CHECK_THAT(erfcx(25.0), WithinRel(erfcx_asymptotic_oracle(25.0, 4), 1e-6));
  CHECK_THAT(erfcx(25.0), WithinRel(erfcx_asymptotic_oracle(25.0, 4), 1e-10));
  CHECK_THAT(erfcx(60.0), WithinRel(erfcx_asymptotic_oracle(60.0, 6), 1e-14));
}

TEST_CASE("erfcx and erf are complementary on [0, 5]", "[numerics][erfcx][property]") {
  for (int i = 0; i <= 500; ++i) {
    const double z = 5.0 * i / 500.0;
    INFO("z = " << z);
    REQUIRE_THAT(erfcx(z) * std::exp(-z * z) + aahflow::erf(z), WithinAbs(1.0, 1e-11));
  }
}

TEST_CASE("erfcx reflection for negative arguments", "[numerics][erfcx]") {
  for (double z : {0.1, 0.7, 1.5, 3.0}) {
    CHECK_THAT(erfcx(-z), WithinRel(2.0 * std::exp(z * z) - erfcx(z), 1e-14));
  }
}

TEST_CASE("erf_difference keeps precision in the tails", "[numerics][erf]") {
  // aahflow::erf(7) - aahflow::erf(6) = erfc(6) - erfc(7); the naive difference loses everything.
  const double expected = std::exp(-36.0) * erfcx(6.0) - std::exp(-49.0) * erfcx(7.0);
  CHECK_THAT(erf_difference(7.0, 6.0), WithinRel(expected, 1e-14));
  CHECK_THAT(erf_difference(-6.0, -7.0), WithinRel(expected, 1e-14));
  CHECK_THAT(erf_difference(0.5, -0.5), WithinRel(2.0 * aahflow::erf(0.5), 1e-15));
}

TEST_CASE("hermite recurrence", "[numerics][hermite]") {
  CHECK(hermite(0, 3.7) == 1.0);
  CHECK(hermite(1, 2.0) == 4.0);
  CHECK(hermite(3, 1.0) == -4.0);

  for (int i = 0; i <= 60; ++i) {
    const double y = -3.0 + 6.0 * i / 60.0;
    const double h2 = 4 * y * y - 2;
    const double h4 = 16 * std::pow(y, 4) - 48 * y * y + 12;
    INFO("y = " << y);
    CHECK_THAT(hermite(2, y), WithinRel(h2, 1e-10) || WithinAbs(h2, 1e-12));
    CHECK_THAT(hermite(4, y), WithinRel(h4, 1e-10) || WithinAbs(h4, 1e-12));
  }

  CHECK_NOTHROW(hermite(2 * kMaxSeriesOrder + 1, 0.5));
  CHECK_THROWS_AS(hermite(2 * kMaxSeriesOrder + 2, 0.5), DomainError);
  CHECK_THROWS_AS(hermite(-1, 0.5), DomainError);
}

TEST_CASE("rk4 on linear, circular and zero fields", "[numerics][rk4]") {
  SECTION("constant field moves linearly") {
    auto field = [](PhaseState) { return PhaseVelocity{1.0, 0.0}; };
    const auto traj = rk4_integrate(field, {0.0, 0.0}, 0.1, 10);
    REQUIRE(traj.size() == 11);
    CHECK(traj.front() == PhaseState{0.0, 0.0});
    CHECK_THAT(traj.back().x, WithinAbs(1.0, 1e-14));
    CHECK(traj.back().k == 0.0);
  }

  SECTION("circular field returns after one period") {
    auto field = [](PhaseState s) { return PhaseVelocity{s.k, -s.x}; };
    const std::size_t n = 6283;
    const double step = 2.0 * std::numbers::pi / n;
    const auto traj = rk4_integrate(field, {1.0, 0.0}, step, n);
    CHECK_THAT(traj.back().x, WithinAbs(1.0, 1e-10));
    CHECK_THAT(traj.back().k, WithinAbs(0.0, 1e-10));
  }

  SECTION("zero field leaves the start untouched") {
    auto field = [](PhaseState) { return PhaseVelocity{0.0, 0.0}; };
    const auto traj = rk4_integrate(field, {0.3, -1.2}, 0.5, 7);
    for (const auto& s : traj) CHECK(s == PhaseState{0.3, -1.2});
  }
}

TEST_CASE("rk4 converges at fourth order", "[numerics][rk4][property]") {
  auto field = [](PhaseState s) { return PhaseVelocity{s.k, -s.x}; };
  auto final_error = [&](std::size_t n) {
    const auto traj = rk4_integrate(field, {1.0, 0.0}, 2.0 * std::numbers::pi / n, n);
    return std::hypot(traj.back().x - 1.0, traj.back().k);
  };
  const double coarse = final_error(60);
  const double fine = final_error(120);
  INFO("coarse " << coarse << " fine " << fine);
  CHECK(coarse / fine >= 12.0);
}

TEST_CASE("rk4 reports non-finite field values with the step index", "[numerics][rk4]") {
  // Blows up once x passes 0.55.
  auto field = [](PhaseState s) {
    return PhaseVelocity{1.0, s.x > 0.55 ? std::numeric_limits<double>::infinity() : 0.0};
  };
  try {
    rk4_integrate(field, {0.0, 0.0}, 0.1, 20);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.step_index() == 5);
  }
  auto ok = [](PhaseState) { return PhaseVelocity{}; };
  CHECK_THROWS_AS(rk4_integrate(ok, {0.0, 0.0}, 0.0, 10), DomainError);
  CHECK_THROWS_AS(rk4_integrate(ok, {0.0, 0.0}, 0.1, 0), DomainError);
}

TEST_CASE("trapezoid quadrature", "[numerics][quadrature]") {
  CHECK_THAT(trapezoid_2d([](double, double) { return 1.0; }, {0, 1}, {0, 1}, 2, 2), WithinAbs(1.0, 1e-15));
  CHECK_THAT(trapezoid_2d([](double, double) { return 1.0; }, {0, 1}, {0, 1}, 37, 11), WithinAbs(1.0, 1e-14));

  auto gauss = [](double x, double k) { return std::numbers::inv_pi * std::exp(-(x * x + k * k)); };
  CHECK_THAT(trapezoid_2d(gauss, {-8, 8}, {-8, 8}, 400, 400), WithinAbs(1.0, 1e-6));
  auto gauss_sq = [&](double x, double k) { return gauss(x, k) * gauss(x, k); };
  CHECK_THAT(trapezoid_2d(gauss_sq, {-8, 8}, {-8, 8}, 400, 400), WithinAbs(0.5 * std::numbers::inv_pi, 1e-6));

  CHECK_THAT(trapezoid_1d([](double x) { return x; }, {0, 2}, 3), WithinAbs(2.0, 1e-15));
  CHECK_THROWS_AS(trapezoid_2d(gauss, {0, 1}, {0, 1}, 1, 5), DomainError);
}
