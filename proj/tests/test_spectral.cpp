#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "oracles.hpp"
#include "qcarpet/errors.hpp"
#include "qcarpet/spectral.hpp"

using namespace qcarpet;
using doctest::Approx;

namespace {

const WellConfig kCfg{};

std::function<double(double)> oracle_profile(ShapeKind kind, double w) {
  switch (kind) {
    case ShapeKind::Square: return [w](double x) { return oracle::square(x, w); };
    case ShapeKind::Triangle: return [w](double x) { return oracle::triangle(x, w); };
    case ShapeKind::Parabola: return [w](double x) { return oracle::parabola(x, w); };
    case ShapeKind::HalfCosine: return [w](double x) { return oracle::half_cosine(x, w); };
    case ShapeKind::HalfCosineSquared:
      return [w](double x) { return oracle::half_cosine_squared(x, w); };
    default: return [w](double x) { return oracle::gaussian(x, w); };
  }
}

}  // namespace

TEST_CASE("wavenumber, energy, beat frequency and recurrence time") {
  CHECK(wavenumber(1, kCfg) == Approx(oracle::pi / 50.0).epsilon(1e-15));
  CHECK(wavenumber(7, kCfg) == Approx(7.0 * oracle::pi / 50.0).epsilon(1e-15));
  CHECK_THROWS_AS(wavenumber(0, kCfg), DomainError);

  CHECK(energy(1, kCfg) == Approx(oracle::energy(1, 50.0)).epsilon(1e-15));
  CHECK(energy(3, kCfg) == Approx(9.0 * energy(1, kCfg)).epsilon(1e-15));
  CHECK_THROWS_AS(energy(-2, kCfg), DomainError);

  CHECK(beat_frequency(3, 1, kCfg) == Approx(oracle::energy(3, 50.0) - oracle::energy(1, 50.0)));
  CHECK(beat_frequency(5, 5, kCfg) == 0.0);
  CHECK(beat_frequency(1, 3, kCfg) == -beat_frequency(3, 1, kCfg));

  CHECK(recurrence_time(kCfg) == Approx(2500.0 / (2.0 * oracle::pi)).epsilon(1e-15));
  CHECK(recurrence_time(kCfg) == Approx(397.887).epsilon(1e-6));
  WellConfig heavy = kCfg;
  heavy.m = 1000.0;
  CHECK(recurrence_time(heavy) == Approx(1000.0 * recurrence_time(kCfg)).epsilon(1e-15));

  // Every beat phase is a multiple of 2 pi at tau_r for same-parity pairs.
  for (int a = 1; a < 40; a += 2) {
    const double phase = beat_frequency(a, 1, kCfg) * recurrence_time(kCfg) / (2.0 * oracle::pi);
    CHECK(phase == Approx(std::round(phase)).epsilon(1e-12));
  }
}

TEST_CASE("well configuration validation") {
  WellConfig c = kCfg;
  CHECK_NOTHROW(c.validate());
  c.w = 60.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = kCfg;
  c.m = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = kCfg;
  c.hbar = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = kCfg;
  c.w = c.L;  // aperture filling the box is allowed
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("eigenfunctions: walls, parity and orthonormality") {
  CHECK(eigenfunction(1, 25.0, kCfg) == 0.0);
  CHECK(eigenfunction(2, -25.0, kCfg) == 0.0);
  CHECK(eigenfunction(4, 25.0, kCfg) == 0.0);
  CHECK(eigenfunction(1, 0.0, kCfg) == Approx(std::sqrt(2.0 / 50.0)));
  CHECK_THROWS_AS(eigenfunction(1, 25.5, kCfg), DomainError);
  CHECK_THROWS_AS(eigenfunction(0, 0.0, kCfg), DomainError);
  for (double x : {0.3, 7.1, -12.4}) {
    CHECK(eigenfunction(3, -x, kCfg) == Approx(eigenfunction(3, x, kCfg)));
    CHECK(eigenfunction(4, -x, kCfg) == Approx(-eigenfunction(4, x, kCfg)));
    CHECK(eigenfunction(5, x, kCfg) == Approx(oracle::phi(5, x, 50.0)).epsilon(1e-14));
  }
  for (int a = 1; a <= 6; ++a) {
    for (int b = a; b <= 6; ++b) {
      const double ip = oracle::simpson(
          [&](double x) { return eigenfunction(a, x, kCfg) * eigenfunction(b, x, kCfg); }, -25.0,
          25.0, 4000);
      CHECK(ip == Approx(a == b ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("analytic shapes are unit-normalised") {
  for (ShapeKind kind : kAnalyticShapes) {
    const auto s = ApertureShape::analytic(kind, 10.0);
    const double lo = kind == ShapeKind::Gaussian ? -60.0 : -5.0;
    const double norm = oracle::simpson([&](double x) { return s.density(x); }, lo, -lo, 200000);
    CAPTURE(s.name());
    CHECK(norm == Approx(1.0).epsilon(1e-12));
    CHECK(s(1.7).real() == Approx(oracle_profile(kind, 10.0)(1.7)).epsilon(1e-14));
    CHECK(s(-1.7) == s(1.7));
    if (kind != ShapeKind::Gaussian) CHECK(s(5.01) == 0.0);
  }
  CHECK(parse_shape("half-cosine-squared") == ShapeKind::HalfCosineSquared);
  CHECK(shape_name(ShapeKind::Gaussian) == "gaussian");
  CHECK_THROWS_AS(parse_shape("hexagon"), ValidationError);
}

TEST_CASE("closed-form coefficients match brute-force projection") {
  for (ShapeKind kind : kAnalyticShapes) {
    const auto shape = ApertureShape::analytic(kind, 10.0);
    const auto state = coefficients_analytic(shape, 30, kCfg);
    const auto f = oracle_profile(kind, 10.0);
    const double lo = kind == ShapeKind::Gaussian ? -25.0 : -5.0;
    CAPTURE(shape.name());
    CHECK(state.parity() == Parity::Even);
    CHECK(state.real_coefficients());
    for (int n = 1; n <= 30; n += 3) {
      const int alpha = 2 * n - 1;
      const double ref = oracle::coefficient(f, alpha, 50.0, lo, -lo, 40000);
      CHECK(state.coefficient(alpha)->real() == Approx(ref).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("degenerate wavenumbers take their limiting values") {
  // Half-cosine: k = k0 = pi/w hits alpha = L/w = 5.
  const auto hc = ApertureShape::analytic(ShapeKind::HalfCosine, 10.0);
  const double c5 = analytic_coefficient(hc, 5, kCfg);
  CHECK(c5 == Approx(std::sqrt(10.0 / 50.0)).epsilon(1e-13));
  CHECK(c5 == Approx(oracle::coefficient(oracle_profile(ShapeKind::HalfCosine, 10.0), 5, 50.0,
                                         -5.0, 5.0))
                  .epsilon(1e-10));
  // Half-cosine-squared: the removable point is k = 2 k0, i.e. alpha = 2L/w,
  // which is the odd mode 9 for L = 45, w = 10.
  WellConfig cfg = kCfg;
  cfg.L = 45.0;
  const auto hcs = ApertureShape::analytic(ShapeKind::HalfCosineSquared, 10.0);
  const double c9 = analytic_coefficient(hcs, 9, cfg);
  CHECK(c9 == Approx(std::sqrt(10.0 / (3.0 * 45.0))).epsilon(1e-13));
  CHECK(c9 == Approx(oracle::coefficient(oracle_profile(ShapeKind::HalfCosineSquared, 10.0), 9,
                                         45.0, -5.0, 5.0))
                  .epsilon(1e-10));
  // Neighbouring wavenumbers stay continuous across the switch.
  const double c7 = analytic_coefficient(hcs, 7, cfg);
  CHECK(std::isfinite(c7));
}

TEST_CASE("quadrature projection of profiles") {
  const auto sq = ApertureShape::analytic(ShapeKind::Square, 10.0);
  const auto q = coefficients_quadrature(sq, 20, kCfg);
  const auto a = coefficients_analytic(sq, 20, kCfg);
  CHECK(q.parity() == Parity::Even);
  REQUIRE(q.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(std::abs(q.modes()[i].c - a.modes()[i].c) < 1e-12);

  // An odd profile projects onto sine modes only.
  auto odd = [](double x) -> std::complex<double> {
    return std::abs(x) <= 5.0 ? x * std::sqrt(3.0 / 250.0) : 0.0;
  };
  const std::vector<double> br{-5.0, 5.0};
  const auto so = coefficients_quadrature(odd, 10, kCfg, br);
  CHECK(so.parity() == Parity::Odd);
  for (const Mode& m : so.modes()) {
    CHECK(m.alpha % 2 == 0);
    const double ref = oracle::coefficient([&](double x) { return odd(x).real(); }, m.alpha, 50.0,
                                           -5.0, 5.0);
    CHECK(m.c.real() == Approx(ref).epsilon(1e-10).scale(1.0));
  }
  CHECK(so.series_index(4) == 2);

  // A displaced, complex profile mixes parities.
  auto mixed = [](double x) -> std::complex<double> {
    const double g = std::pow(2.0 / oracle::pi, 0.25) * std::exp(-(x - 2.0) * (x - 2.0));
    return g * std::exp(std::complex<double>(0.0, 0.7 * x));
  };
  const auto sm = coefficients_quadrature(mixed, 80, kCfg);
  CHECK(sm.parity() == Parity::Mixed);
  CHECK(sm.size() == 160);
  CHECK_FALSE(sm.real_coefficients());
  const double norm = oracle::simpson([&](double x) { return std::norm(mixed(x)); }, -25, 25);
  CHECK(overlap_probability(sm) == Approx(norm).epsilon(1e-8));

  // A sampled table reproduces the profile it tabulates.
  std::vector<double> xs;
  std::vector<std::complex<double>> fs;
  for (int i = 0; i <= 2000; ++i) {
    const double x = -5.0 + 10.0 * i / 2000.0;
    xs.push_back(x);
    fs.emplace_back(oracle::half_cosine_squared(x, 10.0));
  }
  const auto tab = ApertureShape::sampled(10.0, xs, fs);
  const auto st = coefficients_quadrature(tab, 10, kCfg);
  const auto ref = coefficients_analytic(ApertureShape::analytic(ShapeKind::HalfCosineSquared, 10.0),
                                         10, kCfg);
  for (std::size_t i = 0; i < 10; ++i) CHECK(std::abs(st.modes()[i].c - ref.modes()[i].c) < 1e-6);
  CHECK_THROWS_AS(coefficients_analytic(tab, 10, kCfg), UnsupportedError);
  CHECK_THROWS_AS(ApertureShape::sampled(10.0, {0.0, 6.0}, {1.0, 1.0}), ValidationError);
}

TEST_CASE("spectral state invariants") {
  CHECK_THROWS_AS(SpectralState({}, kCfg), ValidationError);
  CHECK_THROWS_AS(SpectralState({{1, 0.5}, {1, 0.5}}, kCfg), ValidationError);
  CHECK_THROWS_AS(SpectralState({{0, 0.5}}, kCfg), ValidationError);
  CHECK_THROWS_AS(SpectralState({{1, 1.0}, {3, 0.1}}, kCfg), ValidationError);
  CHECK_THROWS_AS(SpectralState({{1, NAN}}, kCfg), ValidationError);
  const SpectralState s({{3, 0.6}, {1, 0.8}}, kCfg);
  CHECK(s.modes()[0].alpha == 1);
  CHECK(s.parity() == Parity::Even);
  CHECK(SpectralState({{2, 1.0}}, kCfg).parity() == Parity::Odd);
  CHECK(SpectralState({{1, 0.6}, {2, 0.8}}, kCfg).parity() == Parity::Mixed);
  CHECK(s.truncated(1).size() == 1);
  CHECK_THROWS_AS(s.truncated(3), DomainError);
  CHECK(std::abs(*s.with_global_phase(1.0).coefficient(1)) == Approx(0.8));
  CHECK_FALSE(s.coefficient(5).has_value());
  CHECK_THROWS_AS(coefficients_analytic(ApertureShape::analytic(ShapeKind::Square, 10.0), 0, kCfg),
                  ValidationError);
}

TEST_CASE("overlap probability and expected energy") {
  const auto hcs = coefficients_analytic(ApertureShape::analytic(ShapeKind::HalfCosineSquared, 10.0),
                                         200, kCfg);
  const auto sq = coefficients_analytic(ApertureShape::analytic(ShapeKind::Square, 10.0), 500, kCfg);
  CHECK(overlap_probability(hcs, 10) > 0.999);
  CHECK(overlap_probability(sq) < 0.999);
  CHECK(overlap_probability(hcs) <= 1.0 + 1e-12);
  CHECK_THROWS_AS(overlap_probability(hcs, 201), DomainError);

  double p = 0.0, e = 0.0;
  for (int n = 1; n <= 200; ++n) {
    const int a = 2 * n - 1;
    const double c = oracle::coefficient(oracle_profile(ShapeKind::HalfCosineSquared, 10.0), a,
                                         50.0, -5.0, 5.0, 4000);
    p += c * c;
    e += c * c * oracle::energy(a, 50.0);
  }
  CHECK(overlap_probability(hcs) == Approx(p).epsilon(1e-9));
  CHECK(expected_energy(hcs) == Approx(e / p).epsilon(1e-8));
  // Smooth profile: <H> tends to (hbar^2/2m) int |f'|^2 = (hbar^2/2m) (4/3) (pi/w)^2.
  CHECK(expected_energy(hcs) == Approx(0.5 * 4.0 / 3.0 * std::pow(oracle::pi / 10.0, 2)).epsilon(1e-5).scale(0.0));

  // The square's energy keeps growing with N.
  const auto curve = convergence_curve(sq);
  CHECK(curve.energy[499] > 1.5 * curve.energy[99]);
  CHECK(curve.overlap.size() == 500);

  // Single even mode: exactly its own energy.
  const auto one = SpectralState::single_mode(3, kCfg);
  CHECK(expected_energy(one) == Approx(energy(3, kCfg)).epsilon(1e-15));
}

TEST_CASE("decay exponents of the coefficient envelope") {
  const auto sq = coefficients_analytic(ApertureShape::analytic(ShapeKind::Square, 10.0), 200, kCfg);
  const auto hcs = coefficients_analytic(ApertureShape::analytic(ShapeKind::HalfCosineSquared, 10.0),
                                         200, kCfg);
  const auto tri = coefficients_analytic(ApertureShape::analytic(ShapeKind::Triangle, 10.0), 200, kCfg);
  const auto fs = decay_exponent(sq, 10, 100);
  const auto fh = decay_exponent(hcs, 10, 100);
  const auto ft = decay_exponent(tri, 10, 100);
  CHECK(fs.slope == Approx(-2.0).epsilon(0.05));
  CHECK(fh.slope == Approx(-6.0).epsilon(0.05));
  CHECK(ft.slope == Approx(-4.0).epsilon(0.05));
  CHECK(fs.envelope);
  CHECK(fs.power_law);
  const auto g = coefficients_analytic(ApertureShape::analytic(ShapeKind::Gaussian, 10.0), 200, kCfg);
  CHECK_NOTHROW(decay_exponent(g, 1, 5 + 5));
  CHECK_THROWS_AS(decay_exponent(sq, 10, 12), FitError);
  CHECK_THROWS_AS(decay_exponent(sq, 0, 12), FitError);
}

TEST_CASE("spread counts follow the relative-weight definition") {
  // Oracle: brute-force coefficients and a direct count of
  // (1 - |c_a|^2 / |c_1|^2) * 100 in [0, 25].
  auto oracle_count = [](double L) {
    int count = 0;
    const double c1 = oracle::coefficient(oracle_profile(ShapeKind::HalfCosineSquared, 10.0), 1, L,
                                          -5.0, 5.0, 4000);
    for (int n = 1; n <= 200; ++n) {
      const double c = oracle::coefficient(oracle_profile(ShapeKind::HalfCosineSquared, 10.0),
                                           2 * n - 1, L, -5.0, 5.0, 4000);
      const double delta = (1.0 - c * c / (c1 * c1)) * 100.0;
      if (delta >= 0.0 && delta <= 25.0) ++count;
    }
    return count;
  };
  const std::vector<int> expected{1, 2, 5, 9};
  const std::vector<double> lengths{10.0, 50.0, 100.0, 200.0};
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    WellConfig cfg = kCfg;
    cfg.L = lengths[k];
    const auto st = coefficients_analytic(
        ApertureShape::analytic(ShapeKind::HalfCosineSquared, 10.0), 200, cfg);
    CAPTURE(cfg.L);
    CHECK(oracle_count(cfg.L) == expected[k]);
    CHECK(spread_count(st, 25.0) == expected[k]);
  }
  const auto sq = coefficients_analytic(ApertureShape::analytic(ShapeKind::Square, 10.0), 10, kCfg);
  CHECK(spread_values(sq)[0] == 0.0);
  CHECK(spread_count(sq, 0.0) == 1);
  CHECK_THROWS_AS(spread_count(SpectralState::single_mode(3, kCfg), 25.0), DomainError);
}

TEST_CASE("gaussian leaks a little norm past the walls") {
  const auto g = coefficients_analytic(ApertureShape::analytic(ShapeKind::Gaussian, 10.0), 200, kCfg);
  const double s = 10.0 / (2.0 * oracle::pi);
  CHECK(g.info().norm_deficit == Approx(std::erfc(25.0 / (std::sqrt(2.0) * s))).epsilon(1e-12));
  CHECK(overlap_probability(g) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reconstruction converges to the profile") {
  const auto hcs = coefficients_analytic(ApertureShape::analytic(ShapeKind::HalfCosineSquared, 10.0),
                                         200, kCfg);
  // Coefficients fall as n^-3, so the tail beyond N = 200 is ~1e-6.
  for (double x : {0.0, 1.3, -3.7, 8.0}) {
    CHECK(std::abs(reconstruct(hcs, x).real() - oracle::half_cosine_squared(x, 10.0)) < 2e-6);
  }
  // Gibbs overshoot next to the square's edge, brute-force partial sums.
  const auto sq = coefficients_analytic(ApertureShape::analytic(ShapeKind::Square, 10.0), 100, kCfg);
  double peak = 0.0, peak_oracle = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double x = 4.0 + 1.0 * i / 4000.0;
    peak = std::max(peak, reconstruct(sq, x).real());
    peak_oracle = std::max(peak_oracle, oracle::square_partial_sum(x, 10.0, 50.0, 100));
  }
  CHECK(peak == Approx(peak_oracle).epsilon(1e-12));
}
