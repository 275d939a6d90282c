#include "qcarpet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qcarpet/errors.hpp"

namespace qcarpet {

using std::numbers::pi;

std::string parity_name(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    case Parity::Mixed: return "mixed";
  }
  return "unknown";
}

SpectralState::SpectralState(std::vector<Mode> modes, const WellConfig& config, StateInfo info)
    : modes_(std::move(modes)), config_(config), info_(std::move(info)) {
  config_.validate();
  if (modes_.empty()) throw ValidationError("spectral state needs at least one mode");
  std::stable_sort(modes_.begin(), modes_.end(),
                   [](const Mode& a, const Mode& b) { return a.alpha < b.alpha; });
  bool any_odd_alpha = false;
  bool any_even_alpha = false;
  double total = 0.0;
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const Mode& m = modes_[i];
    if (m.alpha < 1) throw ValidationError("mode index must be >= 1");
    if (i > 0 && modes_[i - 1].alpha == m.alpha) {
      throw ValidationError("duplicate mode index " + std::to_string(m.alpha));
    }
    if (!std::isfinite(m.c.real()) || !std::isfinite(m.c.imag())) {
      throw ValidationError("non-finite coefficient for mode " + std::to_string(m.alpha));
    }
    (m.alpha % 2 ? any_odd_alpha : any_even_alpha) = true;
    if (m.c.imag() != 0.0) real_ = false;
    total += std::norm(m.c);
  }
  if (total > 1.0 + 1e-12) {
    throw ValidationError("sum of |c|^2 = " + std::to_string(total) +
                          " exceeds 1; normalise the profile");
  }
  parity_ = any_odd_alpha && any_even_alpha ? Parity::Mixed
            : any_odd_alpha                 ? Parity::Even
                                            : Parity::Odd;
}

SpectralState SpectralState::single_mode(int alpha, const WellConfig& config,
                                         std::complex<double> c) {
  StateInfo info;
  info.shape = "eigenmode-" + std::to_string(alpha);
  return SpectralState({{alpha, c}}, config, info);
}

std::optional<std::complex<double>> SpectralState::coefficient(int alpha) const {
  auto it = std::lower_bound(modes_.begin(), modes_.end(), alpha,
                             [](const Mode& m, int a) { return m.alpha < a; });
  if (it == modes_.end() || it->alpha != alpha) return std::nullopt;
  return it->c;
}

int SpectralState::series_index(int alpha) const {
  switch (parity_) {
    case Parity::Even: return n_from_alpha(alpha);
    case Parity::Odd: return alpha / 2;
    case Parity::Mixed: return alpha;
  }
  return alpha;
}

SpectralState SpectralState::with_config(const WellConfig& config) const {
  return SpectralState(modes_, config, info_);
}

SpectralState SpectralState::with_global_phase(double theta) const {
  const std::complex<double> u = std::polar(1.0, theta);
  std::vector<Mode> out = modes_;
  for (auto& m : out) m.c *= u;
  return SpectralState(std::move(out), config_, info_);
}

SpectralState SpectralState::truncated(std::size_t count) const {
  if (count < 1 || count > modes_.size()) {
    throw DomainError("truncated: count must be in [1, " + std::to_string(modes_.size()) + "]");
  }
  return SpectralState({modes_.begin(), modes_.begin() + static_cast<std::ptrdiff_t>(count)},
                       config_, info_);
}

double analytic_coefficient(const ApertureShape& shape, int alpha, const WellConfig& config) {
  if (!shape.is_analytic()) {
    throw UnsupportedError("sampled profiles have no closed-form coefficients; "
                           "use coefficients_quadrature");
  }
  const double k = wavenumber(alpha, config);
  if (alpha % 2 == 0) return 0.0;
  const double L = config.L;
  const double w = shape.width();
  const double k0 = pi / w;
  constexpr double kSwitch = 1e-9;
  switch (shape.kind()) {
    case ShapeKind::Square:
      return std::sqrt(2.0 * w / L) * sinc(k * w / 2.0);
    case ShapeKind::Triangle: {
      const double s = sinc(k * w / 4.0);
      return std::sqrt(3.0 * w / (2.0 * L)) * s * s;
    }
    case ShapeKind::Parabola: {
      const double a = k * w / 2.0;
      // sinc(a) - cos(a) ~ a^2/3 - a^4/30 cancels badly for small a.
      const double bracket = std::abs(a) < 1e-3
                                 ? a * a / 3.0 - a * a * a * a / 30.0
                                 : sinc(a) - std::cos(a);
      return 4.0 / w * std::sqrt(15.0 / (w * L)) * bracket / (k * k);
    }
    case ShapeKind::HalfCosine: {
      const double denom = k0 * k0 - k * k;
      if (std::abs(denom) < kSwitch * k0 * k0) return std::sqrt(w / L);
      return 4.0 / std::sqrt(L * w) * (k0 / denom) * std::cos(k * w / 2.0);
    }
    case ShapeKind::HalfCosineSquared: {
      const double q2 = 4.0 * k0 * k0;
      const double denom = q2 - k * k;
      // k = 2 k0 is the removable singularity of this closed form; its limit
      // is sqrt(w / (3 L)).
      if (std::abs(denom) < kSwitch * q2) return std::sqrt(w / (3.0 * L));
      return std::sqrt(4.0 * w / (3.0 * L)) * (q2 / denom) * sinc(k * w / 2.0);
    }
    case ShapeKind::Gaussian: {
      const double s = shape.sigma0();
      return std::sqrt(2.0 / L) * std::pow(8.0 * pi * s * s, 0.25) * std::exp(-s * s * k * k);
    }
    case ShapeKind::Sampled:
      break;
  }
  throw UnsupportedError("unsupported shape");
}

namespace {

double box_norm_deficit(const ApertureShape& shape, const WellConfig& config) {
  if (shape.kind() == ShapeKind::Gaussian) {
    // Inside-box mass of a normal density with variance sigma0^2.
    return std::erfc(config.L / (2.0 * std::numbers::sqrt2 * shape.sigma0()));
  }
  return 0.0;
}

}  // namespace

SpectralState coefficients_analytic(const ApertureShape& shape, int n_modes,
                                    const WellConfig& config) {
  config.validate();
  if (n_modes < 1) throw ValidationError("number of modes N must be >= 1");
  if (!shape.is_analytic()) {
    throw UnsupportedError("sampled profiles have no closed-form coefficients; "
                           "use coefficients_quadrature");
  }
  std::vector<Mode> modes;
  modes.reserve(static_cast<std::size_t>(n_modes));
  for (int n = 1; n <= n_modes; ++n) {
    const int alpha = alpha_from_n(n);
    modes.push_back({alpha, analytic_coefficient(shape, alpha, config)});
  }
  StateInfo info;
  info.shape = shape.name();
  info.norm_deficit = box_norm_deficit(shape, config);
  return SpectralState(std::move(modes), config, info);
}

std::complex<double> project_onto_mode(const std::function<std::complex<double>(double)>& f,
                                       int alpha, const WellConfig& config,
                                       std::span<const double> breakpoints,
                                       const QuadratureOptions& options, double* error) {
  const double h = config.half_length();
  const double k = wavenumber(alpha, config);
  const double norm = std::sqrt(2.0 / config.L);
  const bool cosine = alpha % 2 == 1;
  auto integrand = [&](double x) {
    const double phi = cosine ? norm * std::cos(k * x) : norm * std::sin(k * x);
    return phi * f(x);
  };
  return integrate_complex(integrand, -h, h, breakpoints, options, error);
}

SpectralState coefficients_quadrature(const std::function<std::complex<double>(double)>& f,
                                      int n_modes, const WellConfig& config,
                                      std::span<const double> breakpoints,
                                      const QuadratureOptions& options, double parity_tol) {
  config.validate();
  if (n_modes < 1) throw ValidationError("number of modes N must be >= 1");
  std::vector<Mode> cosines;
  std::vector<Mode> sines;
  double worst_err = 0.0;
  for (int n = 1; n <= n_modes; ++n) {
    for (int alpha : {2 * n - 1, 2 * n}) {
      double err = 0.0;
      const auto c = project_onto_mode(f, alpha, config, breakpoints, options, &err);
      worst_err = std::max(worst_err, err);
      (alpha % 2 ? cosines : sines).push_back({alpha, c});
    }
  }
  auto negligible = [&](const std::vector<Mode>& ms) {
    return std::all_of(ms.begin(), ms.end(),
                       [&](const Mode& m) { return std::abs(m.c) <= parity_tol; });
  };
  std::vector<Mode> modes;
  if (negligible(sines)) {
    modes = std::move(cosines);
  } else if (negligible(cosines)) {
    modes = std::move(sines);
  } else {
    modes = std::move(cosines);
    modes.insert(modes.end(), sines.begin(), sines.end());
  }
  StateInfo info;
  info.quadrature_error = worst_err;
  return SpectralState(std::move(modes), config, info);
}

SpectralState coefficients_quadrature(const ApertureShape& shape, int n_modes,
                                      const WellConfig& config,
                                      const QuadratureOptions& options, double parity_tol) {
  const auto bps = shape.breakpoints();
  const double h = config.half_length();
  const double lo = std::max(-h, shape.support_lo());
  const double hi = std::min(h, shape.support_hi());
  auto f = [&](double x) -> std::complex<double> {
    if (x < lo || x > hi) return 0.0;
    return shape(x);
  };
  std::vector<double> cuts(bps.begin(), bps.end());
  cuts.push_back(lo);
  cuts.push_back(hi);
  SpectralState raw = coefficients_quadrature(f, n_modes, config, cuts, options, parity_tol);
  StateInfo info = raw.info();
  info.shape = shape.name();
  if (shape.kind() == ShapeKind::Gaussian) info.norm_deficit = box_norm_deficit(shape, config);
  return SpectralState({raw.modes().begin(), raw.modes().end()}, config, info);
}

std::complex<double> reconstruct(const SpectralState& state, double x) {
  std::complex<double> sum = 0.0;
  for (const Mode& m : state.modes()) sum += m.c * eigenfunction(m.alpha, x, state.config());
  return sum;
}

double overlap_probability(const SpectralState& state, std::size_t upto) {
  if (upto > state.size()) {
    throw DomainError("overlap_probability: upto = " + std::to_string(upto) +
                      " exceeds truncation " + std::to_string(state.size()));
  }
  double p = 0.0;
  for (std::size_t i = 0; i < upto; ++i) p += std::norm(state.modes()[i].c);
  return p;
}

double overlap_probability(const SpectralState& state) {
  return overlap_probability(state, state.size());
}

double expected_energy(const SpectralState& state, std::size_t upto) {
  const double p = overlap_probability(state, upto);
  if (!(p > 0.0)) throw DomainError("expected_energy: P_N = 0");
  double e = 0.0;
  for (std::size_t i = 0; i < upto; ++i) {
    const Mode& m = state.modes()[i];
    e += std::norm(m.c) * energy(m.alpha, state.config());
  }
  return e / p;
}

double expected_energy(const SpectralState& state) {
  return expected_energy(state, state.size());
}

ConvergenceCurve convergence_curve(const SpectralState& state) {
  ConvergenceCurve out;
  out.overlap.reserve(state.size());
  out.energy.reserve(state.size());
  double p = 0.0;
  double e = 0.0;
  for (const Mode& m : state.modes()) {
    const double wgt = std::norm(m.c);
    p += wgt;
    e += wgt * energy(m.alpha, state.config());
    out.overlap.push_back(p);
    out.energy.push_back(p > 0.0 ? e / p : 0.0);
  }
  return out;
}

namespace {

struct LineFit {
  double slope, intercept;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace

DecayFit decay_exponent(const SpectralState& state, int n_lo, int n_hi) {
  if (n_lo < 1 || n_hi <= n_lo) throw FitError("decay_exponent: invalid index range");
  // Weights by series index n; absent modes count as zero.
  std::vector<double> weight(static_cast<std::size_t>(n_hi) + 2, 0.0);
  for (const Mode& m : state.modes()) {
    const int n = state.series_index(m.alpha);
    if (n >= 1 && n <= n_hi + 1) weight[static_cast<std::size_t>(n)] = std::norm(m.c);
  }
  auto usable = [](double v) { return v > 1e-300 && std::isfinite(v); };
  const int last = std::min<int>(n_hi, static_cast<int>(state.series_index(state.modes().back().alpha)));

  std::vector<double> lx, ly;
  for (int n = std::max(n_lo, 2); n <= std::min(last - 1, n_hi); ++n) {
    const auto i = static_cast<std::size_t>(n);
    if (usable(weight[i]) && weight[i] >= weight[i - 1] && weight[i] >= weight[i + 1]) {
      lx.push_back(std::log(static_cast<double>(n)));
      ly.push_back(std::log(weight[i]));
    }
  }
  DecayFit fit;
  if (lx.empty()) {
    // No oscillation: monotone decay, fit every usable weight.
    fit.envelope = false;
    for (int n = n_lo; n <= last; ++n) {
      const double v = weight[static_cast<std::size_t>(n)];
      if (usable(v)) {
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(v));
      }
    }
  }
  if (lx.size() < 5) {
    throw FitError("decay_exponent: only " + std::to_string(lx.size()) +
                   " usable points in n = [" + std::to_string(n_lo) + ", " +
                   std::to_string(n_hi) + "]");
  }
  const LineFit all = least_squares(lx, ly);
  fit.slope = all.slope;
  fit.intercept = all.intercept;
  fit.points = static_cast<int>(lx.size());

  const std::size_t half = lx.size() / 2;
  const std::span<const double> sx(lx), sy(ly);
  fit.slope_lower = least_squares(sx.first(half + lx.size() % 2), sy.first(half + lx.size() % 2)).slope;
  fit.slope_upper = least_squares(sx.last(half), sy.last(half)).slope;
  fit.power_law = std::abs(fit.slope_upper - fit.slope_lower) <= 0.25 * std::abs(fit.slope);
  return fit;
}

std::vector<double> spread_values(const SpectralState& state) {
  const auto c1 = state.coefficient(1);
  if (!c1 || std::norm(*c1) == 0.0) throw DomainError("spread: c_1 is zero or absent");
  const double ref = std::norm(*c1);
  std::vector<double> out;
  out.reserve(state.size());
  for (const Mode& m : state.modes()) out.push_back((1.0 - std::norm(m.c) / ref) * 100.0);
  return out;
}

int spread_count(const SpectralState& state, double threshold_percent) {
  int count = 0;
  for (double d : spread_values(state)) {
    if (d >= 0.0 && d <= threshold_percent) ++count;
  }
  return count;
}

}  // namespace qcarpet
