#include "qcarpet/carpet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qcarpet/errors.hpp"
#include "qcarpet/fields.hpp"
#include "qcarpet/parallel.hpp"

namespace qcarpet {

std::string field_kind_name(FieldKind kind) {
  switch (kind) {
    case FieldKind::Density: return "density";
    case FieldKind::Velocity: return "velocity";
    case FieldKind::QuantumPotential: return "quantum-potential";
  }
  return "unknown";
}

FieldKind parse_field_kind(const std::string& name) {
  for (auto k : {FieldKind::Density, FieldKind::Velocity, FieldKind::QuantumPotential}) {
    if (field_kind_name(k) == name) return k;
  }
  throw ValidationError("unknown field kind '" + name + "'");
}

double FieldGrid::max_value() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values) m = std::max(m, v);
  return m;
}

double FieldGrid::temporal_variation() const {
  const double mx = max_value();
  if (!(mx > 0.0)) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < nt; ++j) {
    for (std::size_t i = 0; i < nx; ++i) sum += std::abs(at(i, j + 1) - at(i, j));
  }
  return sum / (mx * static_cast<double>(nx));
}

std::vector<double> symmetric_axis(double lo, double hi, std::size_t n) {
  if (n < 2) throw ValidationError("axis needs at least two points");
  if (!(hi > lo)) throw ValidationError("axis range must be non-empty");
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double denom = static_cast<double>(n - 1);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double num = 2.0 * static_cast<double>(i) - denom;
    out[i] = mid + half * (num / denom);
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

namespace {

void require_increasing(const std::vector<double>& axis, const char* what) {
  if (axis.size() < 2) throw ValidationError(std::string(what) + " axis needs at least two points");
  for (std::size_t i = 1; i < axis.size(); ++i) {
    if (!(axis[i] > axis[i - 1])) {
      throw ValidationError(std::string(what) + " axis must be strictly increasing");
    }
  }
}

}  // namespace

FieldGrid render_grid(const SpectralState& state, FieldKind kind, std::vector<double> x_axis,
                      std::vector<double> t_axis, unsigned jobs) {
  require_increasing(x_axis, "x");
  require_increasing(t_axis, "t");
  const double half = state.config().half_length();
  if (x_axis.front() < -half || x_axis.back() > half) {
    throw DomainError("render_grid: x axis leaves the box");
  }
  FieldGrid g;
  g.kind = kind;
  g.nx = x_axis.size();
  g.nt = t_axis.size();
  g.x_axis = std::move(x_axis);
  g.t_axis = std::move(t_axis);
  g.config = state.config();
  const std::size_t total = g.nx * g.nt;
  g.values.assign(total, 0.0);
  g.near_node.assign(total, 0);

  const FieldEvaluator base(state);
  std::vector<SpatialBasis> columns(g.nx);
  parallel_for(g.nx, jobs, [&](std::size_t i) { columns[i] = base.basis(g.x_axis[i]); });

  std::vector<LocalSums> sums(kind == FieldKind::Density ? 0 : total);
  std::vector<double> rho(total);
  parallel_for(g.nt, jobs, [&](std::size_t j) {
    const auto phases = base.time_phases(g.t_axis[j]);
    for (std::size_t i = 0; i < g.nx; ++i) {
      const LocalSums s = base.combine(columns[i], phases);
      rho[j * g.nx + i] = std::norm(s.psi);
      if (!sums.empty()) sums[j * g.nx + i] = s;
    }
  });

  double rho_max = 0.0;
  for (double r : rho) rho_max = std::max(rho_max, r);
  const FieldEvaluator eval(state, rho_max > 0.0 ? std::optional<double>(rho_max) : std::nullopt);

  for (std::size_t p = 0; p < total; ++p) {
    g.near_node[p] = !(rho[p] >= eval.node_floor() && rho[p] > 0.0);
  }

  switch (kind) {
    case FieldKind::Density:
      g.values = std::move(rho);
      g.clip_lo = 0.0;
      g.clip_hi = 0.5 * rho_max;
      break;
    case FieldKind::Velocity:
      parallel_for(total, jobs, [&](std::size_t p) { g.values[p] = eval.velocity_from(sums[p]).value; });
      g.clip_lo = -1.0;
      g.clip_hi = 1.0;
      break;
    case FieldKind::QuantumPotential: {
      parallel_for(total, jobs,
                   [&](std::size_t p) { g.values[p] = eval.quantum_potential_from(sums[p]).value; });
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t p = 0; p < total; ++p) {
        if (g.near_node[p]) continue;
        lo = std::min(lo, g.values[p]);
        hi = std::max(hi, g.values[p]);
      }
      if (!(hi > lo)) {
        lo = -1.0;
        hi = 1.0;
      }
      g.clip_lo = lo;
      g.clip_hi = hi;
      break;
    }
  }
  if (!(g.clip_hi > g.clip_lo)) g.clip_hi = g.clip_lo + 1.0;
  return g;
}

FieldGrid render_grid(const SpectralState& state, FieldKind kind, std::size_t nx, std::size_t nt,
                      double t_max, unsigned jobs) {
  if (nx < 2 || nt < 2) throw ValidationError("render_grid: nx and nt must be >= 2");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw ValidationError("render_grid: time span T must be positive");
  }
  const double half = state.config().half_length();
  return render_grid(state, kind, symmetric_axis(-half, half, nx), symmetric_axis(0.0, t_max, nt),
                     jobs);
}

std::complex<double> autocorrelation(const SpectralState& state, double t) {
  std::complex<double> sum = 0.0;
  const WellConfig& cfg = state.config();
  for (const Mode& m : state.modes()) {
    const double ph = energy(m.alpha, cfg) * t / cfg.hbar;
    sum += std::norm(m.c) * std::complex<double>(std::cos(ph), -std::sin(ph));
  }
  return sum;
}

double revival_fidelity(const SpectralState& state, double t) {
  const double p = overlap_probability(state);
  if (!(p > 0.0)) throw DomainError("revival_fidelity: P_N = 0");
  return std::norm(autocorrelation(state, t)) / (p * p);
}

double revival_fidelity(const SpectralState& state) {
  return revival_fidelity(state, recurrence_time(state.config()));
}

FractionalRevival fractional_revival_check(const SpectralState& state, std::size_t nx,
                                           unsigned jobs) {
  FractionalRevival out;
  const WellConfig& cfg = state.config();
  if (state.size() < 2) {
    out.notice = "single-mode state is stationary; split check skipped";
    return out;
  }
  if (state.parity() != Parity::Even) {
    out.notice = "split check requires an even-parity state";
    return out;
  }
  if (cfg.w > 0.5 * cfg.L) {
    out.notice = "aperture wider than L/2: displaced copies overlap; split check skipped";
    return out;
  }
  const FieldEvaluator eval(state);
  const double half = cfg.half_length();
  const double shift = 0.25 * cfg.L;
  const double t_half = 0.5 * recurrence_time(cfg);
  const auto xs = symmetric_axis(-half, half, nx);
  auto rho0 = [&](double x) { return std::abs(x) <= half ? eval.rho(x, 0.0) : 0.0; };
  std::vector<double> resid(nx), base(nx);
  parallel_for(nx, jobs, [&](std::size_t i) {
    const double x = xs[i];
    const double copies = 0.5 * rho0(x - shift) + 0.5 * rho0(x + shift);
    resid[i] = std::abs(eval.rho(x, t_half) - copies);
    base[i] = eval.rho(x, 0.0);
  });
  out.checked = true;
  out.max_residual = *std::max_element(resid.begin(), resid.end());
  out.max_rho0 = *std::max_element(base.begin(), base.end());
  return out;
}

SymmetryReport symmetry_report(const SpectralState& state, const FieldGrid& density,
                               unsigned jobs) {
  if (density.kind != FieldKind::Density) {
    throw ValidationError("symmetry_report needs a density grid");
  }
  const double tau = recurrence_time(state.config());
  const std::size_t nx = density.nx, nt = density.nt;
  for (std::size_t i = 0; i < nx; ++i) {
    if (density.x_axis[i] != -density.x_axis[nx - 1 - i]) {
      throw ValidationError("symmetry_report: x axis is not mirror-symmetric about 0");
    }
  }
  for (std::size_t j = 0; j < nt; ++j) {
    if (std::abs(density.t_axis[j] + density.t_axis[nt - 1 - j] - tau) > 1e-12 * tau) {
      throw ValidationError("symmetry_report: t axis is not symmetric about tau_r/2");
    }
  }
  SymmetryReport r;
  r.nx = nx;
  r.nt = nt;
  r.max_rho = density.max_value();
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      r.mirror_error = std::max(r.mirror_error, std::abs(density.at(i, j) - density.at(nx - 1 - i, j)));
      r.time_reversal_error =
          std::max(r.time_reversal_error, std::abs(density.at(i, j) - density.at(i, nt - 1 - j)));
    }
  }
  r.revival_fidelity = revival_fidelity(state);
  const FractionalRevival split = fractional_revival_check(state, nx, jobs);
  r.half_time_split_checked = split.checked;
  r.half_time_split_error = split.max_residual;
  r.half_time_split_notice = split.notice;
  return r;
}

SymmetryReport symmetry_report(const SpectralState& state, std::size_t nx, std::size_t nt,
                               unsigned jobs) {
  const double tau = recurrence_time(state.config());
  const FieldGrid g = render_grid(state, FieldKind::Density, nx, nt, tau, jobs);
  return symmetry_report(state, g, jobs);
}

}  // namespace qcarpet
