#include "qcarpet/bohm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "qcarpet/errors.hpp"
#include "qcarpet/parallel.hpp"
#include "qcarpet/quadrature.hpp"

namespace qcarpet {

TrajectorySpec TrajectorySpec::with_defaults(const WellConfig& config, double x0, double t1,
                                             std::size_t samples, double t0) {
  const double tau = recurrence_time(config);
  TrajectorySpec s;
  s.x0 = x0;
  s.t0 = t0;
  s.t1 = t1;
  s.rtol = 1e-8;
  s.atol = 1e-10 * config.L;
  s.h_min = 1e-12 * tau;
  s.h_max = 1e-3 * tau;
  if (samples < 2) samples = 2;
  s.sample_times.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    s.sample_times[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  s.sample_times.back() = t1;
  return s;
}

void TrajectorySpec::validate(const WellConfig& config) const {
  if (!(std::abs(x0) < config.half_length())) {
    throw ValidationError("trajectory seed x0 = " + std::to_string(x0) + " is not inside the box");
  }
  if (!(t1 > t0)) throw ValidationError("trajectory time span must satisfy t1 > t0");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw ValidationError("trajectory tolerances must be positive");
  if (!(h_min > 0.0) || !(h_max >= h_min)) {
    throw ValidationError("trajectory step bounds must satisfy 0 < h_min <= h_max");
  }
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    const double t = sample_times[i];
    if (t < t0 || t > t1) throw ValidationError("sample time outside [t0, t1]");
    if (i > 0 && !(t > sample_times[i - 1])) {
      throw ValidationError("sample times must be strictly increasing");
    }
  }
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension coefficients.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

enum class Eval { Ok, NearNode, Wall };

class Integrator {
 public:
  Integrator(const FieldEvaluator& field, const TrajectorySpec& spec)
      : field_(field), spec_(spec), half_(field.state().config().half_length()) {}

  Path run() {
    spec_.validate(field_.state().config());
    Path path;
    path.x0 = spec_.x0;
    auto& diag = path.diagnostics;
    diag.min_step = INFINITY;

    double t = spec_.t0;
    double x = spec_.x0;
    std::size_t next_sample = 0;
    auto emit_until = [&](double t_end, const std::function<double(double)>& at) {
      while (next_sample < spec_.sample_times.size() &&
             spec_.sample_times[next_sample] <= t_end) {
        const double ts = spec_.sample_times[next_sample];
        path.t.push_back(ts);
        path.x.push_back(at(ts));
        ++next_sample;
      }
    };
    emit_until(t, [&](double) { return x; });

    double k1 = 0.0;
    if (eval(t, x, k1, diag) != Eval::Ok) {
      return fail(path, t, "seed starts on a density node");
    }
    double h = initial_step(t, x, k1, diag);
    double fac_old = 1e-4;
    bool last_rejected = false;

    while (t < spec_.t1) {
      if (h < spec_.h_min) {
        return fail(path, t, "step size " + std::to_string(h) + " fell below h_min at t = " +
                                 std::to_string(t));
      }
      bool final_step = false;
      if (t + h >= spec_.t1) {
        h = spec_.t1 - t;
        final_step = true;
      }
      double k2, k3, k4, k5, k6, k7;
      Eval st = stage(t + c2 * h, x + h * a21 * k1, k2, diag);
      if (st == Eval::Ok) st = stage(t + c3 * h, x + h * (a31 * k1 + a32 * k2), k3, diag);
      if (st == Eval::Ok)
        st = stage(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3), k4, diag);
      if (st == Eval::Ok)
        st = stage(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5, diag);
      if (st == Eval::Ok)
        st = stage(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6,
                   diag);
      double x_new = 0.0;
      if (st == Eval::Ok) {
        x_new = x + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        if (!(std::abs(x_new) < half_)) {
          st = Eval::Wall;
        } else {
          st = stage(t + h, x_new, k7, diag);
        }
      }
      if (st != Eval::Ok) {
        (st == Eval::Wall ? diag.wall_rejections : diag.near_node_rejections)++;
        h *= 0.5;
        last_rejected = true;
        continue;
      }

      const double err_abs =
          h * std::abs(e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double scale = spec_.atol + spec_.rtol * std::max(std::abs(x), std::abs(x_new));
      const double err = err_abs / scale;

      // PI controller (Gustafsson / Hairer): beta = 0.04, safety 0.9,
      // growth limited to [0.2, 10].
      constexpr double beta = 0.04, safe = 0.9;
      constexpr double expo1 = 0.2 - beta * 0.75;
      const double fac11 = std::pow(std::max(err, 1e-300), expo1);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(fac_old, beta);
        fac = std::clamp(fac / safe, 0.1, 5.0);
        double h_new = h / fac;
        if (last_rejected) h_new = std::min(h_new, h);
        fac_old = std::max(err, 1e-4);

        const double x_old = x, t_old = t, h_used = h;
        const double ydiff = x_new - x_old;
        const double bspl = h_used * k1 - ydiff;
        const double r3 = bspl;
        const double r4 = ydiff - h_used * k7 - bspl;
        const double r5 = h_used * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        t = final_step ? spec_.t1 : t + h_used;
        x = x_new;
        emit_until(t, [&](double ts) {
          if (ts == t) return x;
          const double th = (ts - t_old) / h_used;
          const double th1 = 1.0 - th;
          return x_old + th * (ydiff + th1 * (r3 + th * (r4 + th1 * r5)));
        });
        k1 = k7;
        ++diag.accepted_steps;
        diag.min_step = std::min(diag.min_step, h_used);
        diag.max_step = std::max(diag.max_step, h_used);
        h = std::min(h_new, spec_.h_max);
        last_rejected = false;
      } else {
        ++diag.rejected_steps;
        h /= std::min(5.0, fac11 / safe);
        last_rejected = true;
      }
    }
    if (!std::isfinite(diag.min_step)) diag.min_step = 0.0;
    return path;
  }

 private:
  Eval eval(double t, double x, double& v, TrajectoryDiagnostics& diag) const {
    if (!(std::abs(x) < half_)) return Eval::Wall;
    ++diag.evaluations;
    const FlaggedValue fv = field_.velocity_from(field_.local(x, t));
    if (fv.near_node) return Eval::NearNode;
    v = fv.value;
    diag.max_speed = std::max(diag.max_speed, std::abs(v));
    return Eval::Ok;
  }

  Eval stage(double t, double x, double& v, TrajectoryDiagnostics& diag) const {
    return eval(t, x, v, diag);
  }

  double initial_step(double t, double x, double f0, TrajectoryDiagnostics& diag) const {
    const double sk = spec_.atol + spec_.rtol * std::abs(x);
    const double dnf = std::abs(f0) / sk;
    const double dny = std::abs(x) / sk;
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h = std::clamp(h, spec_.h_min, spec_.h_max);
    double f1 = 0.0;
    if (eval(t + h, x + h * f0, f1, diag) != Eval::Ok) return std::max(spec_.h_min, 0.01 * h);
    const double der2 = std::abs(f1 - f0) / sk / h;
    const double der12 = std::max(der2, dnf);
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::clamp(std::min(100.0 * h, h1), spec_.h_min, spec_.h_max);
  }

  Path fail(Path& path, double t, const std::string& why) const {
    path.status = PathStatus::StepUnderflow;
    path.failure_time = t;
    path.message = why;
    throw IntegrationError("trajectory from x0 = " + std::to_string(spec_.x0) + ": " + why, path);
  }

  const FieldEvaluator& field_;
  const TrajectorySpec& spec_;
  double half_;
};

}  // namespace

Path integrate_trajectory(const FieldEvaluator& field, const TrajectorySpec& spec) {
  return Integrator(field, spec).run();
}

Path integrate_trajectory(const SpectralState& state, const TrajectorySpec& spec) {
  const FieldEvaluator field(state);
  return integrate_trajectory(field, spec);
}

bool TrajectoryEnsemble::all_ok() const {
  return std::all_of(paths.begin(), paths.end(), [](const Path& p) { return p.ok(); });
}

long TrajectoryEnsemble::failures() const {
  return std::count_if(paths.begin(), paths.end(), [](const Path& p) { return !p.ok(); });
}

TrajectoryEnsemble integrate_ensemble(const SpectralState& state,
                                      std::vector<TrajectorySpec> specs, unsigned jobs) {
  for (std::size_t i = 0; i < specs.size(); ++i) {
    specs[i].validate(state.config());
    if (i > 0 && !(specs[i].x0 > specs[i - 1].x0)) {
      throw ValidationError("ensemble seeds must be strictly increasing (duplicate or unordered x0 = " +
                            std::to_string(specs[i].x0) + ")");
    }
  }
  TrajectoryEnsemble ens;
  ens.paths.resize(specs.size());
  ens.ordering_tolerance = 1e-6 * state.config().L;
  const FieldEvaluator field(state);
  parallel_for(specs.size(), jobs, [&](std::size_t i) {
    try {
      ens.paths[i] = integrate_trajectory(field, specs[i]);
    } catch (const IntegrationError& e) {
      ens.paths[i] = e.partial();
    }
  });

  ens.worst_crossing = -INFINITY;
  for (std::size_t i = 0; i + 1 < specs.size(); ++i) {
    const Path& a = ens.paths[i];
    const Path& b = ens.paths[i + 1];
    const std::size_t shared = std::min(a.t.size(), b.t.size());
    for (std::size_t s = 0; s < shared; ++s) {
      if (a.t[s] != b.t[s]) continue;
      const double gap = a.x[s] - b.x[s];
      ens.worst_crossing = std::max(ens.worst_crossing, gap);
      if (gap > ens.ordering_tolerance) ++ens.crossing_violations;
    }
  }
  if (!std::isfinite(ens.worst_crossing)) ens.worst_crossing = 0.0;
  ens.specs = std::move(specs);
  return ens;
}

std::vector<double> seed_uniform(int n, double a) {
  if (n < 1) throw ValidationError("seed count must be >= 1");
  if (!(a > 0.0)) throw ValidationError("seed half-width must be positive");
  const double spacing = 2.0 * a / n;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Integer numerator keeps mirrored seeds exact negatives of each other.
    out[static_cast<std::size_t>(i)] = a * static_cast<double>(2 * i + 1 - n) / n;
  }
  if (n % 2 == 1) out[static_cast<std::size_t>(n / 2)] = 0.25 * spacing;
  return out;
}

std::vector<double> seed_uniform(int n, double a, const WellConfig& config) {
  if (!(a < config.half_length())) {
    throw ValidationError("seed half-width must be smaller than L/2");
  }
  return seed_uniform(n, a);
}

namespace {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

std::vector<double> density_quantiles(const std::function<double(double)>& density, double lo,
                                      double hi, std::vector<double> breaks, int n) {
  if (n < 1) throw ValidationError("seed count must be >= 1");
  constexpr int kCells = 512;
  std::vector<double> edges;
  for (int i = 0; i <= kCells; ++i) edges.push_back(lo + (hi - lo) * i / kCells);
  for (double b : breaks) {
    if (b > lo && b < hi) edges.push_back(b);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  QuadratureOptions opts;
  opts.abs_tol = 1e-14;
  std::vector<double> cum(edges.size(), 0.0);
  for (std::size_t i = 1; i < edges.size(); ++i) {
    cum[i] = cum[i - 1] + integrate(density, edges[i - 1], edges[i], {}, opts).value;
  }
  const double total = cum.back();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DomainError("density-weighted seeding: density integrates to zero");
  }

  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const double target = (i - 0.5) / n * total;
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    std::size_t cell = static_cast<std::size_t>(std::distance(cum.begin(), it));
    cell = std::clamp<std::size_t>(cell, 1, edges.size() - 1);
    const double a = edges[cell - 1], b = edges[cell];
    const double base = cum[cell - 1];
    auto F = [&](double x) {
      if (x <= a) return base - target;
      return base + Kronrod::integrate(density, a, x, 0) - target;
    };
    double fa = F(a), fb = cum[cell] - target;
    if (fa >= 0.0) {
      out.push_back(a);
      continue;
    }
    if (fb <= 0.0) {
      out.push_back(b);
      continue;
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(F, a, b, fa, fb,
                                                     boost::math::tools::eps_tolerance<double>(50),
                                                     iters);
    out.push_back(0.5 * (r.first + r.second));
  }
  return out;
}

}  // namespace

std::vector<double> seed_density_weighted(const SpectralState& state, int n) {
  const FieldEvaluator field(state);
  const double half = state.config().half_length();
  return density_quantiles([&](double x) { return field.rho(std::clamp(x, -half, half), 0.0); },
                           -half, half, {}, n);
}

std::vector<double> seed_density_weighted(const ApertureShape& shape, const WellConfig& config,
                                          int n) {
  const double half = config.half_length();
  const double lo = std::max(-half, shape.support_lo());
  const double hi = std::min(half, shape.support_hi());
  return density_quantiles([&](double x) { return shape.density(x); }, lo, hi,
                           shape.breakpoints(), n);
}

}  // namespace qcarpet
