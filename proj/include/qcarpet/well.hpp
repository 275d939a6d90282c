#pragma once

#include <numbers>

namespace qcarpet {

// Physical setup of the box: walls at x = -L/2 and x = +L/2, initial aperture
// of width w centred on x = 0.
struct WellConfig {
  double L = 50.0;     // box length
  double w = 10.0;     // aperture width
  double m = 1.0;      // particle mass
  double hbar = 1.0;   // action constant

  // Throws ValidationError unless L, w, m, hbar > 0 and w <= L.
  void validate() const;

  double half_length() const noexcept { return 0.5 * L; }

  bool operator==(const WellConfig&) const = default;
};

// Series index helpers for the even-parity (cosine) series: alpha = 2n - 1.
constexpr int alpha_from_n(int n) noexcept { return 2 * n - 1; }
constexpr int n_from_alpha(int alpha) noexcept { return (alpha + 1) / 2; }

// k_alpha = pi * alpha / L.
double wavenumber(int alpha, const WellConfig& config);

// E_alpha = pi^2 hbar^2 alpha^2 / (2 m L^2).
double energy(int alpha, const WellConfig& config);

// omega_{alpha,alpha'} = (E_alpha - E_alpha') / hbar.
double beat_frequency(int alpha, int alpha_prime, const WellConfig& config);

// tau_r = m L^2 / (2 pi hbar); the period of every even-parity beat.
double recurrence_time(const WellConfig& config);

// Box eigenfunction: sqrt(2/L) cos(k x) for odd alpha, sqrt(2/L) sin(k x)
// for even alpha. Requires |x| <= L/2.
double eigenfunction(int alpha, double x, const WellConfig& config);

// d/dx of eigenfunction().
double eigenfunction_derivative(int alpha, double x, const WellConfig& config);

// Riemann zeta(4) = pi^4 / 90, the limit of sum 1/n^4.
inline constexpr double kZeta4 = std::numbers::pi * std::numbers::pi * std::numbers::pi *
                                 std::numbers::pi / 90.0;

}  // namespace qcarpet
