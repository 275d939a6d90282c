#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcarpet/quadrature.hpp"
#include "qcarpet/shapes.hpp"
#include "qcarpet/well.hpp"

namespace qcarpet {

enum class Parity { Even, Odd, Mixed };

std::string parity_name(Parity p);

struct Mode {
  int alpha = 1;                  // physical mode index, >= 1
  std::complex<double> c{};       // expansion coefficient
};

struct StateInfo {
  std::string shape = "custom";
  // 1 - (norm of the source profile inside the box). Nonzero only for
  // profiles that leak past the walls (the Gaussian is normalised on the
  // whole line, not renormalised to the box).
  double norm_deficit = 0.0;
  // Largest per-coefficient quadrature error estimate, 0 for closed forms.
  double quadrature_error = 0.0;
};

// Truncated eigenfunction expansion of an initial state. Immutable; modes are
// kept sorted by alpha. The evolved wavefunction is fully determined by the
// modes plus the WellConfig.
class SpectralState {
 public:
  // Throws ValidationError for an empty mode list, duplicate or non-positive
  // indices, non-finite coefficients, or sum |c|^2 > 1 + 1e-12.
  SpectralState(std::vector<Mode> modes, const WellConfig& config, StateInfo info = {});

  static SpectralState single_mode(int alpha, const WellConfig& config,
                                   std::complex<double> c = 1.0);

  std::span<const Mode> modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  Parity parity() const noexcept { return parity_; }
  const WellConfig& config() const noexcept { return config_; }
  const StateInfo& info() const noexcept { return info_; }
  bool real_coefficients() const noexcept { return real_; }

  std::optional<std::complex<double>> coefficient(int alpha) const;

  // Position of alpha within its parity series: (alpha+1)/2 for even states,
  // alpha/2 for odd states, alpha itself for mixed states.
  int series_index(int alpha) const;

  // Same coefficients in a different box/mass setup.
  SpectralState with_config(const WellConfig& config) const;
  // All coefficients multiplied by exp(i theta).
  SpectralState with_global_phase(double theta) const;
  // First `count` modes.
  SpectralState truncated(std::size_t count) const;

 private:
  std::vector<Mode> modes_;
  WellConfig config_;
  StateInfo info_;
  Parity parity_ = Parity::Even;
  bool real_ = true;
};

// Table closed-form coefficient of an analytic shape for cosine mode alpha
// (odd alpha); sine modes of the even analytic shapes vanish identically.
double analytic_coefficient(const ApertureShape& shape, int alpha, const WellConfig& config);

// First N even-parity coefficients c_{2n-1}, n = 1..N, from the closed forms.
// Throws UnsupportedError for sampled profiles.
SpectralState coefficients_analytic(const ApertureShape& shape, int n_modes,
                                    const WellConfig& config);

// c_alpha = integral of phi_alpha(x) f(x) over the box, adaptively.
std::complex<double> project_onto_mode(const std::function<std::complex<double>(double)>& f,
                                       int alpha, const WellConfig& config,
                                       std::span<const double> breakpoints = {},
                                       const QuadratureOptions& options = {},
                                       double* error = nullptr);

// Projects f on the first N cosine modes and the first N sine modes. A parity
// class whose coefficients all stay below parity_tol is dropped, so even
// profiles give an Even state of N modes, odd profiles an Odd state of N
// modes, and anything else a Mixed state of 2N modes.
SpectralState coefficients_quadrature(const std::function<std::complex<double>(double)>& f,
                                      int n_modes, const WellConfig& config,
                                      std::span<const double> breakpoints = {},
                                      const QuadratureOptions& options = {},
                                      double parity_tol = 1e-9);

SpectralState coefficients_quadrature(const ApertureShape& shape, int n_modes,
                                      const WellConfig& config,
                                      const QuadratureOptions& options = {},
                                      double parity_tol = 1e-9);

// Psi_N(x, 0) = sum c_alpha phi_alpha(x).
std::complex<double> reconstruct(const SpectralState& state, double x);

// P_N: sum of |c|^2 over the first `upto` modes (upto <= state.size()).
double overlap_probability(const SpectralState& state, std::size_t upto);
double overlap_probability(const SpectralState& state);

// <H>_N = sum |c|^2 E / P_N over the first `upto` modes.
double expected_energy(const SpectralState& state, std::size_t upto);
double expected_energy(const SpectralState& state);

// Cumulative P_N and <H>_N for N = 1..size().
struct ConvergenceCurve {
  std::vector<double> overlap;
  std::vector<double> energy;
};
ConvergenceCurve convergence_curve(const SpectralState& state);

struct DecayFit {
  double slope = 0.0;       // beta in |c|^2 ~ n^beta
  double intercept = 0.0;   // log-space intercept
  int points = 0;           // envelope points used
  bool envelope = true;     // false when the weights decay monotonically and all were used
  double slope_lower = 0.0; // slope over the lower half of the envelope
  double slope_upper = 0.0; // slope over the upper half
  bool power_law = true;    // halves agree to within 25% of the overall slope
};

// Least-squares slope of log|c|^2 against log n over the local maxima of the
// weights for n in [n_lo, n_hi]. Throws FitError with fewer than 5 usable
// points.
DecayFit decay_exponent(const SpectralState& state, int n_lo, int n_hi);

// Delta_{1,alpha} = (1 - |c_alpha|^2/|c_1|^2) * 100 for every mode.
std::vector<double> spread_values(const SpectralState& state);

// Number of modes (alpha = 1 included) with 0 <= Delta_{1,alpha} <= threshold
// (threshold in percent). Throws DomainError if c_1 is absent or zero.
int spread_count(const SpectralState& state, double threshold_percent);

}  // namespace qcarpet
