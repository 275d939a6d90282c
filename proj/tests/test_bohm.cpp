#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qcarpet/bohm.hpp"
#include "qcarpet/errors.hpp"

using namespace qcarpet;
using doctest::Approx;

namespace {

const WellConfig kCfg{};

SpectralState hcs(int n, const WellConfig& cfg = kCfg) {
  return coefficients_analytic(ApertureShape::analytic(ShapeKind::HalfCosineSquared, cfg.w), n, cfg);
}

double tau() { return recurrence_time(kCfg); }

}  // namespace

TEST_CASE("trajectory spec defaults and validation") {
  const auto s = TrajectorySpec::with_defaults(kCfg, 1.0, 10.0, 11);
  CHECK(s.atol == Approx(1e-10 * 50.0));
  CHECK(s.h_min == Approx(1e-12 * tau()));
  CHECK(s.h_max == Approx(1e-3 * tau()));
  CHECK(s.sample_times.size() == 11);
  CHECK(s.sample_times.back() == 10.0);
  CHECK_NOTHROW(s.validate(kCfg));
  auto bad = s;
  bad.x0 = 25.0;
  CHECK_THROWS_AS(bad.validate(kCfg), ValidationError);
  bad = s;
  bad.t1 = bad.t0;
  CHECK_THROWS_AS(bad.validate(kCfg), ValidationError);
  bad = s;
  bad.rtol = 0.0;
  CHECK_THROWS_AS(bad.validate(kCfg), ValidationError);
  bad = s;
  bad.sample_times = {0.0, 5.0, 4.0};
  CHECK_THROWS_AS(bad.validate(kCfg), ValidationError);
}

TEST_CASE("single eigenmode: particles stand still") {
  const auto st = SpectralState::single_mode(3, kCfg);
  const auto p = integrate_trajectory(st, TrajectorySpec::with_defaults(kCfg, 4.0, tau(), 21));
  CHECK(p.ok());
  REQUIRE(p.x.size() == 21);
  for (double x : p.x) CHECK(x == Approx(4.0).epsilon(1e-12));
}

TEST_CASE("even state: sign preserved and mirror trajectories") {
  const auto st = hcs(30);
  const auto plus = integrate_trajectory(st, TrajectorySpec::with_defaults(kCfg, 2.3, tau(), 201));
  const auto minus = integrate_trajectory(st, TrajectorySpec::with_defaults(kCfg, -2.3, tau(), 201));
  REQUIRE(plus.ok());
  REQUIRE(minus.ok());
  REQUIRE(plus.x.size() == minus.x.size());
  double worst = 0.0, max_abs = 0.0;
  for (std::size_t k = 0; k < plus.x.size(); ++k) {
    CHECK(plus.x[k] > 0.0);
    worst = std::max(worst, std::abs(plus.x[k] + minus.x[k]));
    max_abs = std::max(max_abs, std::abs(plus.x[k]));
  }
  CHECK(worst <= 1e-8);
  CHECK(max_abs < 25.0);
  // Revival carries the particle back to its start.
  CHECK(std::abs(plus.x.back() - 2.3) <= 1e-4 * kCfg.L);
  CHECK(plus.diagnostics.accepted_steps > 0);
  CHECK(plus.diagnostics.max_step <= 1e-3 * tau() * (1 + 1e-12));
}

TEST_CASE("dense output agrees with integrating straight to each sample") {
  const auto st = hcs(30);
  auto spec = TrajectorySpec::with_defaults(kCfg, 1.5, 60.0, 7);
  const auto p = integrate_trajectory(st, spec);
  for (std::size_t k = 1; k < spec.sample_times.size(); ++k) {
    auto direct = TrajectorySpec::with_defaults(kCfg, 1.5, spec.sample_times[k], 2);
    const auto q = integrate_trajectory(st, direct);
    CHECK(p.x[k] == Approx(q.x.back()).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("self-convergence under halved tolerances") {
  const auto st = hcs(30);
  auto coarse = TrajectorySpec::with_defaults(kCfg, 3.1, tau(), 401);
  auto fine = coarse;
  fine.rtol *= 0.5;
  fine.atol *= 0.5;
  const auto a = integrate_trajectory(st, coarse);
  const auto b = integrate_trajectory(st, fine);
  // Error control is relative to |x| along the path, so the tolerance scale
  // uses the path's largest |x|.
  const double reach = std::abs(*std::max_element(b.x.begin(), b.x.end(), [](double u, double v) {
    return std::abs(u) < std::abs(v);
  }));
  const double fine_tol = fine.atol + fine.rtol * reach;
  CHECK(std::abs(a.x.back() - b.x.back()) < 10.0 * fine_tol);
}

TEST_CASE("step underflow raises with the partial path") {
  const auto st = hcs(30);
  auto spec = TrajectorySpec::with_defaults(kCfg, 2.0, 100.0, 11);
  spec.rtol = 1e-14;
  spec.atol = 1e-16;
  spec.h_min = 1.0;
  spec.h_max = 1.0;
  try {
    integrate_trajectory(st, spec);
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK_FALSE(e.partial().ok());
    CHECK(e.partial().status == PathStatus::StepUnderflow);
    REQUIRE_FALSE(e.partial().x.empty());
    CHECK(e.partial().x.front() == 2.0);
    CHECK(e.failure_time() >= 0.0);
  }
  // A seed on a node cannot start.
  CHECK_THROWS_AS(integrate_trajectory(SpectralState::single_mode(2, kCfg),
                                       TrajectorySpec::with_defaults(kCfg, 0.0, 10.0, 3)),
                  IntegrationError);
}

TEST_CASE("ensembles: ordering, partial failures and validation") {
  const auto st = hcs(30);
  std::vector<TrajectorySpec> two{TrajectorySpec::with_defaults(kCfg, 2.0, tau(), 101),
                                  TrajectorySpec::with_defaults(kCfg, 3.0, tau(), 101)};
  const auto ens = integrate_ensemble(st, two, 2);
  CHECK(ens.all_ok());
  CHECK(ens.crossing_violations == 0);
  for (std::size_t k = 0; k < ens.paths[0].x.size(); ++k) CHECK(ens.paths[0].x[k] < ens.paths[1].x[k]);
  CHECK(ens.worst_crossing < 0.0);

  std::swap(two[0], two[1]);
  CHECK_THROWS_AS(integrate_ensemble(st, two), ValidationError);
  two[1] = two[0];
  CHECK_THROWS_AS(integrate_ensemble(st, two), ValidationError);

  // One member fails, the others still finish.
  std::vector<TrajectorySpec> specs{TrajectorySpec::with_defaults(kCfg, 1.0, 50.0, 11),
                                    TrajectorySpec::with_defaults(kCfg, 2.0, 50.0, 11)};
  specs[0].rtol = 1e-14;
  specs[0].atol = 1e-16;
  specs[0].h_min = specs[0].h_max = 5.0;
  const auto partial = integrate_ensemble(st, specs, 1);
  CHECK(partial.failures() == 1);
  CHECK_FALSE(partial.paths[0].ok());
  CHECK(partial.paths[1].ok());
  CHECK(partial.paths[1].x.size() == 11);
}

TEST_CASE("ensemble results do not depend on the worker count") {
  const auto st = hcs(20);
  std::vector<TrajectorySpec> specs;
  for (double x0 : seed_uniform(6, 5.0)) specs.push_back(TrajectorySpec::with_defaults(kCfg, x0, 80.0, 41));
  const auto a = integrate_ensemble(st, specs, 1);
  const auto b = integrate_ensemble(st, specs, 3);
  for (std::size_t i = 0; i < specs.size(); ++i) CHECK(a.paths[i].x == b.paths[i].x);
}

TEST_CASE("heavy particles barely move, light ones reach the walls") {
  WellConfig heavy = kCfg;
  heavy.m = 1000.0;
  const auto st_heavy = hcs(60, heavy);
  const auto st_light = hcs(60);
  std::vector<TrajectorySpec> sh, sl;
  for (double x0 : seed_uniform(20, 5.0)) {
    sh.push_back(TrajectorySpec::with_defaults(heavy, x0, 397.9, 41));
    sl.push_back(TrajectorySpec::with_defaults(kCfg, x0, 0.25 * tau(), 81));
  }
  const auto eh = integrate_ensemble(st_heavy, sh);
  const auto el = integrate_ensemble(st_light, sl);
  double disp_heavy = 0.0, reach_light = 0.0;
  for (const auto& p : eh.paths) {
    for (double x : p.x) disp_heavy = std::max(disp_heavy, std::abs(x - p.x0));
  }
  for (const auto& p : el.paths) {
    for (double x : p.x) reach_light = std::max(reach_light, std::abs(x));
  }
  CHECK(eh.all_ok());
  CHECK(el.all_ok());
  CHECK(disp_heavy < 0.05 * kCfg.L);
  CHECK(disp_heavy < 0.1 * reach_light);
  CHECK(reach_light > 0.8 * 25.0);
  CHECK(reach_light < 25.0);
  CHECK(el.crossing_violations == 0);
}

TEST_CASE("uniform seeds") {
  const auto two = seed_uniform(2, 5.0);
  CHECK(two == std::vector<double>{-2.5, 2.5});
  const auto twenty = seed_uniform(20, 5.0);
  REQUIRE(twenty.size() == 20);
  CHECK(twenty[1] - twenty[0] == Approx(0.5));
  CHECK(twenty.front() == Approx(-4.75));
  for (std::size_t i = 0; i < 20; ++i) CHECK(twenty[i] == -twenty[19 - i]);
  const auto three = seed_uniform(3, 3.0);
  CHECK(three[1] != 0.0);
  CHECK(std::is_sorted(three.begin(), three.end()));
  CHECK(seed_uniform(20, 7.0, kCfg).front() == Approx(-6.65));
  CHECK_THROWS_AS(seed_uniform(0, 1.0), ValidationError);
  CHECK_THROWS_AS(seed_uniform(4, 30.0, kCfg), ValidationError);
}

TEST_CASE("density-weighted seeds") {
  const auto sq = ApertureShape::analytic(ShapeKind::Square, 10.0);
  const auto ws = seed_density_weighted(sq, kCfg, 20);
  const auto us = seed_uniform(20, 5.0);
  for (std::size_t i = 0; i < 20; ++i) CHECK(std::abs(ws[i] - us[i]) < 1e-9);

  const auto one = seed_density_weighted(hcs(50), 1);
  CHECK(std::abs(one[0]) < 1e-9);

  // Gaussian: the seeds' empirical CDF against a Simpson CDF of rho(x, 0).
  const auto g = coefficients_analytic(ApertureShape::analytic(ShapeKind::Gaussian, 10.0), 200, kCfg);
  const int n = 400;
  const auto seeds = seed_density_weighted(g, n);
  CHECK(std::is_sorted(seeds.begin(), seeds.end()));
  double ks = 0.0;
  const double total = oracle::simpson([](double x) { return std::pow(oracle::gaussian(x, 10.0), 2); },
                                       -25.0, 25.0, 20000);
  for (int i = 0; i < n; ++i) {
    const double cdf = oracle::simpson(
                           [](double x) { return std::pow(oracle::gaussian(x, 10.0), 2); }, -25.0,
                           seeds[i], 4000) /
                       total;
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / n),
                   std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  CHECK(ks < 0.05);
  CHECK_THROWS_AS(seed_density_weighted(g, 0), ValidationError);
}
