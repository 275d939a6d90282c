#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>

#include "oracles.hpp"
#include "qcarpet/carpet.hpp"
#include "qcarpet/errors.hpp"
#include "qcarpet/fields.hpp"
#include "qcarpet/io.hpp"

using namespace qcarpet;
using doctest::Approx;

namespace {

const WellConfig kCfg{};

SpectralState hcs(int n, const WellConfig& cfg = kCfg) {
  return coefficients_analytic(ApertureShape::analytic(ShapeKind::HalfCosineSquared, cfg.w), n, cfg);
}

}  // namespace

TEST_CASE("symmetric axes pair exactly") {
  const auto ax = symmetric_axis(-25.0, 25.0, 101);
  CHECK(ax.front() == -25.0);
  CHECK(ax.back() == 25.0);
  CHECK(ax[50] == 0.0);
  for (std::size_t i = 0; i < ax.size(); ++i) CHECK(ax[i] == -ax[100 - i]);
  const auto t = symmetric_axis(0.0, 10.0, 8);
  // Time axes mirror about their midpoint to rounding.
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs((t[i] - 5.0) + (t[7 - i] - 5.0)) < 1e-14);
  CHECK_THROWS_AS(symmetric_axis(0.0, 1.0, 1), ValidationError);
}

TEST_CASE("render_grid: layout, clips and validation") {
  const auto st = hcs(40);
  const auto g = render_grid(st, FieldKind::Density, 51, 21, 100.0, 1);
  CHECK(g.nx == 51);
  CHECK(g.nt == 21);
  CHECK(g.values.size() == 51 * 21);
  CHECK(g.t_axis.back() == 100.0);
  CHECK(g.x_axis.front() == -25.0);
  const FieldEvaluator f(st);
  CHECK(g.at(7, 13) == Approx(f.rho(g.x_axis[7], g.t_axis[13])).epsilon(1e-14));
  CHECK(g.clip_lo == 0.0);
  CHECK(g.clip_hi == Approx(0.5 * g.max_value()));
  for (double v : g.values) CHECK(v >= 0.0);

  const auto vg = render_grid(st, FieldKind::Velocity, 51, 21, 100.0, 1);
  CHECK(vg.clip_lo == -1.0);
  CHECK(vg.clip_hi == 1.0);
  CHECK(vg.at(30, 5) == Approx(f.velocity(vg.x_axis[30], vg.t_axis[5]).value).epsilon(1e-12));
  // Walls are nodes.
  CHECK(vg.flagged(0, 3));
  CHECK(vg.flagged(50, 3));

  const auto qg = render_grid(st, FieldKind::QuantumPotential, 51, 21, 100.0, 1);
  CHECK(qg.clip_lo < qg.clip_hi);

  CHECK_THROWS_AS(render_grid(st, FieldKind::Density, 1, 21, 100.0), ValidationError);
  CHECK_THROWS_AS(render_grid(st, FieldKind::Density, 2, 2, 0.0), ValidationError);
  CHECK_THROWS_AS(render_grid(st, FieldKind::Density, {-26.0, 0.0}, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(render_grid(st, FieldKind::Density, {0.0, -1.0}, {0.0, 1.0}), ValidationError);
  CHECK(parse_field_kind("quantum-potential") == FieldKind::QuantumPotential);
  CHECK_THROWS_AS(parse_field_kind("pressure"), ValidationError);
}

TEST_CASE("single eigenmode: every time row is identical") {
  const auto g = render_grid(SpectralState::single_mode(5, kCfg), FieldKind::Density, 41, 9, 50.0, 1);
  for (std::size_t j = 1; j < g.nt; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) CHECK(g.at(i, j) == Approx(g.at(i, 0)).epsilon(1e-13));
  }
}

TEST_CASE("rendering is bit-identical for any worker count") {
  const auto st = hcs(60);
  for (FieldKind k : {FieldKind::Density, FieldKind::Velocity}) {
    const auto a = render_grid(st, k, 101, 37, 397.0, 1);
    const auto b = render_grid(st, k, 101, 37, 397.0, 3);
    CHECK(a.values == b.values);
    CHECK(a.near_node == b.near_node);
  }
}

TEST_CASE("velocity grid is antisymmetric for even states") {
  const auto g = render_grid(hcs(100), FieldKind::Velocity, 201, 31, recurrence_time(kCfg), 1);
  double worst = 0.0;
  for (std::size_t j = 0; j < g.nt; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      if (g.flagged(i, j) || g.flagged(g.nx - 1 - i, j)) continue;
      worst = std::max(worst, std::abs(g.at(i, j) + g.at(g.nx - 1 - i, j)));
    }
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("autocorrelation in coefficient space") {
  const auto st = hcs(200);
  const double p = overlap_probability(st);
  CHECK(autocorrelation(st, 0.0) == std::complex<double>(p, 0.0));
  const double T = recurrence_time(kCfg);
  CHECK(std::abs(autocorrelation(st, T)) == Approx(p).epsilon(1e-12));
  for (double t : {3.0, 41.0, 200.0}) {
    const double a = std::abs(autocorrelation(st, t));
    CHECK(a <= p + 1e-15);
    CHECK(std::abs(std::abs(autocorrelation(st, t + T)) - a) <= 1e-12);
  }
  // Oracle: spatial overlap of psi(0) and psi(t) by Simpson.
  const FieldEvaluator f(st);
  const double t = 17.0;
  const double re = oracle::simpson([&](double x) { return std::real(std::conj(f.psi(x, 0)) * f.psi(x, t)); },
                                    -25, 25, 20000);
  const double im = oracle::simpson([&](double x) { return std::imag(std::conj(f.psi(x, 0)) * f.psi(x, t)); },
                                    -25, 25, 20000);
  CHECK(std::abs(autocorrelation(st, t) - std::complex<double>(re, im)) < 1e-9);

  const auto one = SpectralState::single_mode(4, kCfg);
  for (double tt : {0.5, 7.0, 1234.5}) CHECK(std::abs(autocorrelation(one, tt)) == Approx(1.0).epsilon(1e-15));
}

TEST_CASE("revival fidelity") {
  for (ShapeKind kind : kAnalyticShapes) {
    const auto st = coefficients_analytic(ApertureShape::analytic(kind, 10.0), 200, kCfg);
    CHECK(revival_fidelity(st) == Approx(1.0).epsilon(1e-10));
  }
  // Odd-parity states pick up a relative phase at tau_r: sine modes 2 and 4
  // differ by pi (4^2 - 2^2) / 4 = 3 pi.
  const SpectralState odd({{2, std::sqrt(0.5)}, {4, std::sqrt(0.5)}}, kCfg);
  CHECK(revival_fidelity(odd) == Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(revival_fidelity(odd, 4.0 * recurrence_time(kCfg)) == Approx(1.0).epsilon(1e-12));
  // Wrong recurrence time: fidelity drops.
  CHECK(revival_fidelity(hcs(200), 1.001 * recurrence_time(kCfg)) < 0.9999);
}

TEST_CASE("symmetry report on an even state") {
  const auto st = hcs(200);
  const auto r = symmetry_report(st, 201, 201, 1);
  CHECK(r.mirror_error <= 1e-12 * r.max_rho);
  CHECK(r.time_reversal_error <= 1e-10 * r.max_rho);
  CHECK(r.revival_fidelity == Approx(1.0).epsilon(1e-10));
  CHECK(r.half_time_split_checked);
  CHECK(r.half_time_split_error < 1e-3);

  // A grid not symmetric about tau_r / 2 is rejected.
  const auto g = render_grid(st, FieldKind::Density, 21, 21, 100.0, 1);
  CHECK_THROWS_AS(symmetry_report(st, g), ValidationError);
  const auto gx = render_grid(st, FieldKind::Density, {-25.0, 0.0, 10.0},
                              symmetric_axis(0.0, recurrence_time(kCfg), 5), 1);
  CHECK_THROWS_AS(symmetry_report(st, gx), ValidationError);

  // A mixed state breaks the mirror symmetry.
  const SpectralState mixed({{1, std::sqrt(0.5)}, {2, std::sqrt(0.5)}}, kCfg);
  CHECK(symmetry_report(mixed, 51, 51, 1).mirror_error > 1e-3);
}

TEST_CASE("fractional revival at half the recurrence time") {
  const auto fr = fractional_revival_check(hcs(200), 1001, 1);
  CHECK(fr.checked);
  CHECK(fr.relative() < 1e-3);
  // Single mode: skipped.
  const auto one = fractional_revival_check(SpectralState::single_mode(1, kCfg));
  CHECK_FALSE(one.checked);
  CHECK_FALSE(one.notice.empty());
  // Overlapping copies: skipped.
  WellConfig narrow = kCfg;
  narrow.L = 15.0;
  CHECK_FALSE(fractional_revival_check(hcs(50, narrow)).checked);
  // Square: converges slowly; the residual is larger but still reported.
  const auto sq = fractional_revival_check(
      coefficients_analytic(ApertureShape::analytic(ShapeKind::Square, 10.0), 200, kCfg), 1001, 1);
  CHECK(sq.checked);
  CHECK(sq.relative() > fr.relative());
}

TEST_CASE("PGM export round-trips through the reader") {
  const auto st = hcs(40);
  const auto g = render_grid(st, FieldKind::Density, 33, 17, 50.0, 1);
  const auto path = std::filesystem::temp_directory_path() / "qcarpet_test_grid.pgm";
  write_pgm(path, g);
  const auto img = read_pgm(path);
  CHECK(img.width == 33);
  CHECK(img.height == 17);
  CHECK(img.maxval == 65535);
  // Top row is t = T, bottom row t = 0.
  for (std::size_t i = 0; i < g.nx; ++i) {
    const double u0 = std::clamp((g.at(i, 0) - g.clip_lo) / (g.clip_hi - g.clip_lo), 0.0, 1.0);
    CHECK(img.pixels[(img.height - 1) * img.width + i] == static_cast<std::uint16_t>(std::lround(u0 * 65535)));
  }
  const auto side = grid_sidecar(g, st);
  CHECK(side["kind"] == "density");
  CHECK(side["nx"] == 33);
  CHECK(side["tau_r"].get<double>() == Approx(397.887).epsilon(1e-6));
  std::filesystem::remove(path);
}
