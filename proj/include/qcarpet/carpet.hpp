#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qcarpet/spectral.hpp"

namespace qcarpet {

enum class FieldKind { Density, Velocity, QuantumPotential };

std::string field_kind_name(FieldKind kind);
FieldKind parse_field_kind(const std::string& name);

// Space-time raster of one scalar field. values[j * nx + i] holds the sample
// at (x_axis[i], t_axis[j]): row-major in time, x fastest.
struct FieldGrid {
  FieldKind kind = FieldKind::Density;
  std::size_t nx = 0;
  std::size_t nt = 0;
  std::vector<double> x_axis;
  std::vector<double> t_axis;
  std::vector<double> values;
  std::vector<std::uint8_t> near_node;  // 1 where the density is below the node floor
  double clip_lo = 0.0;
  double clip_hi = 1.0;
  WellConfig config;

  double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }
  bool flagged(std::size_t i, std::size_t j) const { return near_node[j * nx + i] != 0; }
  double t_max() const { return t_axis.back(); }
  double max_value() const;
  // Mean over x of the summed |value(t_{j+1}) - value(t_j)|, relative to
  // max_value(): how much temporal structure the raster carries.
  double temporal_variation() const;
};

// n points on [lo, hi] whose mirrored pairs about the midpoint are exact:
// p_i = mid + half * (2i - (n-1)) / (n-1).
std::vector<double> symmetric_axis(double lo, double hi, std::size_t n);

// Evaluates the field on x in [-L/2, L/2] (nx points) by t in [0, T] (nt
// points). Density clip defaults to [0, max/2], velocity to [-1, 1], quantum
// potential to the range of unflagged samples. Near-node flags use the grid's
// own density maximum as reference. Results are bit-identical for any `jobs`.
FieldGrid render_grid(const SpectralState& state, FieldKind kind, std::size_t nx, std::size_t nt,
                      double t_max, unsigned jobs = 0);

FieldGrid render_grid(const SpectralState& state, FieldKind kind, std::vector<double> x_axis,
                      std::vector<double> t_axis, unsigned jobs = 0);

// <psi(0)|psi(t)> = sum |c|^2 exp(-i E t / hbar), in coefficient space.
std::complex<double> autocorrelation(const SpectralState& state, double t);

// |<psi(0)|psi(t)>|^2 / P_N^2 at t (default: the recurrence time).
double revival_fidelity(const SpectralState& state, double t);
double revival_fidelity(const SpectralState& state);

struct FractionalRevival {
  bool checked = false;
  std::string notice;          // why the check was skipped, if it was
  double max_residual = 0.0;   // max |rho(x, tau/2) - rho0(x-L/4)/2 - rho0(x+L/4)/2|
  double max_rho0 = 0.0;
  double relative() const { return max_rho0 > 0.0 ? max_residual / max_rho0 : 0.0; }
};

// Compares the density at half the recurrence time with two half-weight
// copies of the initial density centred at -L/4 and +L/4 (copies evaluated
// analytically, zero outside the box). Skipped for single-mode, non-even, or
// overlapping (w > L/2) states.
FractionalRevival fractional_revival_check(const SpectralState& state, std::size_t nx = 1001,
                                           unsigned jobs = 0);

struct SymmetryReport {
  double mirror_error = 0.0;         // max |rho(x,t) - rho(-x,t)|
  double time_reversal_error = 0.0;  // max |rho(x,tau/2-t) - rho(x,tau/2+t)|
  double revival_fidelity = 0.0;
  double half_time_split_error = 0.0;
  bool half_time_split_checked = false;
  std::string half_time_split_notice;
  double max_rho = 0.0;
  std::size_t nx = 0;
  std::size_t nt = 0;
};

// Density grid over [-L/2, L/2] x [0, tau_r] and the four symmetry metrics.
SymmetryReport symmetry_report(const SpectralState& state, std::size_t nx, std::size_t nt,
                               unsigned jobs = 0);

// Metrics on a caller-rendered density grid. Throws ValidationError unless the
// grid is mirror-symmetric in x and symmetric about tau_r/2 in t.
SymmetryReport symmetry_report(const SpectralState& state, const FieldGrid& density,
                               unsigned jobs = 0);

}  // namespace qcarpet
