#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "gpwave/soliton1d.hpp"
#include "gpwave/sweep.hpp"
#include "test_support.hpp"

using namespace gpwave;
using gpwave::testing::kPi;

namespace {

CurveSample fake(double p, double v, double tol = 0.0) {
  CurveSample s;
  s.p = p;
  s.energy2d = v;
  s.converged = true;
  s.tolerance = tol;
  return s;
}

}  // namespace

TEST_CASE("closed-form curve satisfies every curve law") {
  const auto curve = closed_form_curve(1.0, uniform_momenta(16));
  CHECK(curve.size() == 15);
  CHECK(check_concavity(curve, 1e-10).passed);
  CHECK(lipschitz_check(curve, 1e-10).passed);
  CHECK(check_upper_bounds(curve, 1e-12).passed);
  const auto sub = check_subadditivity(curve, 0.0);
  CHECK(sub.passed);
  CHECK(sub.worst_margin > 0.0);
  CHECK(sub.checked == 15 * 16 / 2);
}

TEST_CASE("concavity and Lipschitz detect violations") {
  const std::vector<CurveSample> convex = {fake(0.1, 0.0), fake(0.2, 0.0), fake(0.3, 1.0)};
  const auto r = check_concavity(convex, 1e-10);
  CHECK_FALSE(r.passed);
  CHECK(r.worst_margin == doctest::Approx(-0.5));
  const std::vector<CurveSample> steep = {fake(0.1, 0.0), fake(0.2, 0.2), fake(0.3, 0.4)};
  CHECK_FALSE(lipschitz_check(steep, 1e-10).passed);
}

TEST_CASE("non-converged samples are ignored by predicates") {
  std::vector<CurveSample> c = {fake(0.1, 0.0), fake(0.2, 0.0), fake(0.3, 1.0)};
  c[2].converged = false;
  CHECK(check_concavity(c, 0.0).checked == 0);
}

TEST_CASE("subadditivity needs an on-grid curve") {
  const std::vector<CurveSample> off = {fake(0.1, 0.1), fake(0.25, 0.2), fake(0.3, 0.3)};
  CHECK_THROWS_AS(check_subadditivity(off, 0.0), std::invalid_argument);
  // Additive fake curve on pi/8: the inequality is an equality and fails.
  std::vector<CurveSample> linear;
  for (int k = 1; k <= 3; ++k) linear.push_back(fake(k * kPi / 8, 0.1 * k));
  const auto r = check_subadditivity(linear, 0.0);
  CHECK_FALSE(r.passed);
}

TEST_CASE("small-p trend") {
  const std::vector<double> ps = {0.2, 0.1, 0.05};
  CHECK(small_p_trend(closed_form_curve(1.0, ps)).passed);
  const std::vector<CurveSample> bad = {fake(0.2, 0.9 * std::sqrt(2.0) * 0.2),
                                        fake(0.1, 0.8 * std::sqrt(2.0) * 0.1)};
  CHECK_FALSE(small_p_trend(bad).passed);
}

TEST_CASE("uniform momenta") {
  const auto p = uniform_momenta(4);
  REQUIRE(p.size() == 3);
  CHECK(p[1] == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(uniform_momenta(1), std::invalid_argument);
}

TEST_CASE("sweep at small period reproduces I_1d, evenly and deterministically") {
  const Grid g = Grid::make(12.0, 257, 0.5, 4);
  const std::vector<double> ps = {0.9, kPi - 0.9, kPi / 2};
  const auto one = sweep_momentum(g, ps, SolverConfig{}, SeedPlan{}, 1);
  const auto two = sweep_momentum(g, ps, SolverConfig{}, SeedPlan{}, 2);
  REQUIRE(one.size() == 3);
  for (std::size_t k = 0; k < one.size(); ++k) {
    CHECK(one[k].converged);
    CHECK(one[k].seeds.size() == 2);
    CHECK(one[k].energy2d == doctest::Approx(soliton1d::energy_1d(one[k].p)).epsilon(1e-2));
    CHECK(one[k].energy2d <= soliton1d::energy_1d(one[k].p) + 1e-3);
    CHECK(one[k].transverse_energy < 1e-6 * one[k].energy2d);
    CHECK(one[k].energy2d == two[k].energy2d);
  }
  CHECK(one[0].p < one[1].p);
  CHECK(one[0].energy2d == doctest::Approx(one[2].energy2d).epsilon(1e-9));
  std::ostringstream a;
  std::ostringstream b;
  write_curve_csv(a, one);
  write_curve_csv(b, two);
  CHECK(a.str() == b.str());
  CHECK_THROWS_AS(sweep_momentum(g, std::vector<double>{0.0}, SolverConfig{}, SeedPlan{}),
                  std::invalid_argument);
}

TEST_CASE("curve csv round trip") {
  std::vector<CurveSample> c = {fake(0.5, 0.4, 1e-6), fake(1.0, 0.7, 2e-6)};
  c[1].converged = false;
  c[0].multiplier = std::numeric_limits<double>::quiet_NaN();
  std::ostringstream out;
  write_curve_csv(out, c);
  CHECK(out.str().rfind("p,ell,energy2d,multiplier,transverse_energy,converged,tolerance\n", 0) == 0);
  std::istringstream in(out.str());
  const auto back = read_curve_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].energy2d == 0.4);
  CHECK(std::isnan(back[0].multiplier));
  CHECK_FALSE(back[1].converged);
  std::istringstream bad("nonsense\n");
  CHECK_THROWS_AS(read_curve_csv(bad), std::runtime_error);
}

TEST_CASE("report format") {
  PredicateReport r{"concavity", false, -0.5, 3, "p=1"};
  std::ostringstream out;
  write_report(out, std::vector<PredicateReport>{r});
  CHECK(out.str() == "predicate=concavity passed=0 checked=3 worst_margin=-5.000000e-01 at=\"p=1\"\n");
}

TEST_CASE("critical length: coarse bracket and the non-straddling error") {
  CriticalLengthConfig cfg;
  cfg.L = 12.0;
  cfg.nx = 193;
  cfg.max_hy = 0.75;
  cfg.resolution = 1.0;
  cfg.verify_half = true;
  const auto r = critical_length(kPi / 2, 2.0, 16.0, cfg);
  CHECK(r.ell_lo < r.ell_hi);
  CHECK(r.width <= 1.0);
  CHECK(r.ratio_lo <= cfg.w_tol);
  CHECK(r.ratio_hi > cfg.w_tol);
  CHECK(r.half_planar);
  CHECK(r.ell_lo > 6.0);   // transverse instability sets in near 2 sqrt 2 pi
  CHECK(r.ell_hi < 11.0);
  CHECK_THROWS_WITH_AS(critical_length(kPi / 2, 0.5, 1.0, cfg),
                       "bracket does not straddle the critical length", std::domain_error);
}
