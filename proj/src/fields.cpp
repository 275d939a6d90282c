#include "qcarpet/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qcarpet/errors.hpp"

namespace qcarpet {

FieldEvaluator::FieldEvaluator(SpectralState state, std::optional<double> density_scale)
    : state_(std::move(state)) {
  const WellConfig& cfg = state_.config();
  norm_ = std::sqrt(2.0 / cfg.L);
  hbar_over_m_ = cfg.hbar / cfg.m;
  velocity_cap_ = 1e12 * cfg.hbar / (cfg.m * cfg.L);
  double abs_sum = 0.0;
  for (const Mode& m : state_.modes()) {
    alpha_.push_back(m.alpha);
    c_.push_back(m.c);
    k_.push_back(wavenumber(m.alpha, cfg));
    omega_.push_back(energy(m.alpha, cfg) / cfg.hbar);
    cosine_.push_back(m.alpha % 2 == 1);
    abs_sum += std::abs(m.c);
  }
  density_scale_ = density_scale.value_or(norm_ * norm_ * abs_sum * abs_sum);
  if (!(density_scale_ > 0.0)) density_scale_ = norm_ * norm_;
}

void FieldEvaluator::require_inside(double x, const char* op) const {
  if (!(std::abs(x) <= state_.config().half_length())) {
    throw DomainError(std::string(op) + ": x = " + std::to_string(x) + " lies outside the box");
  }
}

void FieldEvaluator::time_phases(double t, std::span<std::complex<double>> out) const {
  for (std::size_t i = 0; i < omega_.size(); ++i) {
    const double ph = omega_[i] * t;
    out[i] = {std::cos(ph), -std::sin(ph)};
  }
}

std::vector<std::complex<double>> FieldEvaluator::time_phases(double t) const {
  std::vector<std::complex<double>> out(omega_.size());
  time_phases(t, out);
  return out;
}

SpatialBasis FieldEvaluator::basis(double x) const {
  require_inside(x, "basis");
  SpatialBasis b;
  b.x = x;
  b.phi.resize(k_.size());
  b.dphi.resize(k_.size());
  const bool wall = std::abs(x) == state_.config().half_length();
  for (std::size_t i = 0; i < k_.size(); ++i) {
    const double s = std::sin(k_[i] * x);
    const double c = std::cos(k_[i] * x);
    if (cosine_[i]) {
      b.phi[i] = wall ? 0.0 : norm_ * c;
      b.dphi[i] = -norm_ * k_[i] * s;
    } else {
      b.phi[i] = wall ? 0.0 : norm_ * s;
      b.dphi[i] = norm_ * k_[i] * c;
    }
  }
  return b;
}

LocalSums FieldEvaluator::combine(const SpatialBasis& b,
                                  std::span<const std::complex<double>> phases) const {
  LocalSums s;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const std::complex<double> a = c_[i] * phases[i];
    s.psi += a * b.phi[i];
    s.dpsi += a * b.dphi[i];
    s.d2psi -= a * (k_[i] * k_[i] * b.phi[i]);
    s.dpsi_dt += a * std::complex<double>(0.0, -omega_[i] * b.phi[i]);
  }
  return s;
}

LocalSums FieldEvaluator::local(double x, double t) const {
  return combine(basis(x), time_phases(t));
}

std::complex<double> FieldEvaluator::psi(double x, double t) const { return local(x, t).psi; }

double FieldEvaluator::rho(double x, double t) const { return std::norm(psi(x, t)); }

double FieldEvaluator::current(double x, double t) const {
  const LocalSums s = local(x, t);
  return hbar_over_m_ * std::imag(std::conj(s.psi) * s.dpsi);
}

double FieldEvaluator::rho_double_sum(double x, double t) const {
  const SpatialBasis b = basis(x);
  const std::size_t n = c_.size();
  const bool real = state_.real_coefficients();
  double diag = 0.0;
  double off = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    diag += std::norm(c_[a]) * b.phi[a] * b.phi[a];
    for (std::size_t bb = a + 1; bb < n; ++bb) {
      const double wt = (omega_[a] - omega_[bb]) * t;
      double coh;
      if (real) {
        coh = c_[a].real() * c_[bb].real() * std::cos(wt);
      } else {
        const double delta = std::arg(c_[a]) - std::arg(c_[bb]);
        coh = std::abs(c_[a]) * std::abs(c_[bb]) * std::cos(wt - delta);
      }
      off += coh * b.phi[a] * b.phi[bb];
    }
  }
  return diag + 2.0 * off;
}

double FieldEvaluator::current_double_sum(double x, double t) const {
  const SpatialBasis b = basis(x);
  const std::size_t n = c_.size();
  const bool real = state_.real_coefficients();
  double sum = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t bb = 0; bb < n; ++bb) {
      if (a == bb) continue;
      const double wt = (omega_[a] - omega_[bb]) * t;
      double s;
      if (real) {
        s = c_[a].real() * c_[bb].real() * std::sin(wt);
      } else {
        const double delta = std::arg(c_[a]) - std::arg(c_[bb]);
        s = std::abs(c_[a]) * std::abs(c_[bb]) * std::sin(wt - delta);
      }
      sum += s * b.phi[a] * b.dphi[bb];
    }
  }
  return hbar_over_m_ * sum;
}

FlaggedValue FieldEvaluator::flag_velocity(double j, double rho) const {
  if (rho >= node_floor() && rho > 0.0) return {j / rho, false};
  double v = rho > 0.0 ? j / rho : 0.0;
  if (!std::isfinite(v)) v = 0.0;
  return {std::clamp(v, -velocity_cap_, velocity_cap_), true};
}

FlaggedValue FieldEvaluator::velocity_from(const LocalSums& s) const {
  const double rho = std::norm(s.psi);
  const double j = hbar_over_m_ * std::imag(std::conj(s.psi) * s.dpsi);
  return flag_velocity(j, rho);
}

FlaggedValue FieldEvaluator::velocity(double x, double t) const {
  return velocity_from(local(x, t));
}

FlaggedValue FieldEvaluator::velocity_log_derivative(double x, double t) const {
  const LocalSums s = local(x, t);
  const double rho = std::norm(s.psi);
  if (rho < node_floor() || rho == 0.0) {
    return flag_velocity(hbar_over_m_ * std::imag(std::conj(s.psi) * s.dpsi), rho);
  }
  return {hbar_over_m_ * std::imag(s.dpsi / s.psi), false};
}

FlaggedValue FieldEvaluator::velocity_double_sum(double x, double t) const {
  return flag_velocity(current_double_sum(x, t), rho_double_sum(x, t));
}

FlaggedValue FieldEvaluator::quantum_potential_from(const LocalSums& s) const {
  const double rho = std::norm(s.psi);
  const double d1 = 2.0 * std::real(std::conj(s.psi) * s.dpsi);
  const double d2 = 2.0 * std::real(std::conj(s.psi) * s.d2psi) + 2.0 * std::norm(s.dpsi);
  const WellConfig& cfg = state_.config();
  const double pref = -cfg.hbar * cfg.hbar / (2.0 * cfg.m);
  const bool near = !(rho >= node_floor() && rho > 0.0);
  double q = rho > 0.0 ? pref * (0.5 * d2 / rho - 0.25 * (d1 / rho) * (d1 / rho)) : 0.0;
  if (near) {
    const double cap = 1e12 * cfg.hbar * cfg.hbar / (cfg.m * cfg.L * cfg.L);
    if (!std::isfinite(q)) q = 0.0;
    q = std::clamp(q, -cap, cap);
  }
  return {q, near};
}

FlaggedValue FieldEvaluator::quantum_potential(double x, double t) const {
  return quantum_potential_from(local(x, t));
}

double FieldEvaluator::drho_dt(double x, double t) const {
  const LocalSums s = local(x, t);
  return 2.0 * std::real(std::conj(s.psi) * s.dpsi_dt);
}

ContinuityResidual FieldEvaluator::continuity_residual(double x, double t, double hx,
                                                       double ht) const {
  if (!(hx > 0.0) || !(ht > 0.0)) throw DomainError("continuity_residual: steps must be positive");
  const double half = state_.config().half_length();
  if (x - hx < -half || x + hx > half) {
    throw DomainError("continuity_residual: spatial stencil leaves the box");
  }
  ContinuityResidual r;
  r.drho_dt_fd = (rho(x, t + ht) - rho(x, t - ht)) / (2.0 * ht);
  r.dflux_dx_fd = (current(x + hx, t) - current(x - hx, t)) / (2.0 * hx);
  const LocalSums s = local(x, t);
  r.drho_dt = 2.0 * std::real(std::conj(s.psi) * s.dpsi_dt);
  const double dflux_dx = hbar_over_m_ * std::imag(std::conj(s.psi) * s.d2psi);
  r.finite_difference = r.drho_dt_fd + r.dflux_dx_fd;
  r.mixed = r.drho_dt + r.dflux_dx_fd;
  r.analytic = r.drho_dt + dflux_dx;
  return r;
}

FieldSample FieldEvaluator::sample(double x, double t) const {
  const LocalSums s = local(x, t);
  FieldSample out;
  out.x = x;
  out.t = t;
  out.psi = s.psi;
  out.rho = std::norm(s.psi);
  const FlaggedValue v = velocity_from(s);
  const FlaggedValue q = quantum_potential_from(s);
  out.v = v.value;
  out.q = q.value;
  out.near_node = v.near_node;
  return out;
}

}  // namespace qcarpet
