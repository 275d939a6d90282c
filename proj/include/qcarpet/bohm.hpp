#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qcarpet/fields.hpp"
#include "qcarpet/shapes.hpp"
#include "qcarpet/spectral.hpp"

namespace qcarpet {

struct TrajectorySpec {
  double x0 = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  double rtol = 1e-8;
  double atol = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;
  std::vector<double> sample_times;  // sorted, inside [t0, t1]

  // Defaults scaled to the box: atol = 1e-10 L, h_min = 1e-12 tau_r,
  // h_max = 1e-3 tau_r, `samples` evenly spaced output times on [t0, t1].
  static TrajectorySpec with_defaults(const WellConfig& config, double x0, double t1,
                                      std::size_t samples = 401, double t0 = 0.0);

  void validate(const WellConfig& config) const;
};

struct TrajectoryDiagnostics {
  long accepted_steps = 0;
  long rejected_steps = 0;       // error-control rejections
  long near_node_rejections = 0;  // a stage landed on a density node
  long wall_rejections = 0;       // a stage or the step end reached |x| >= L/2
  long evaluations = 0;
  double min_step = 0.0;
  double max_step = 0.0;
  double max_speed = 0.0;
};

enum class PathStatus { Ok, StepUnderflow };

struct Path {
  double x0 = 0.0;
  std::vector<double> t;  // sample times reached
  std::vector<double> x;
  TrajectoryDiagnostics diagnostics;
  PathStatus status = PathStatus::Ok;
  double failure_time = 0.0;
  std::string message;

  bool ok() const noexcept { return status == PathStatus::Ok; }
};

// Step size fell below h_min; carries the samples produced so far.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, Path partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Path& partial() const noexcept { return partial_; }
  double failure_time() const noexcept { return partial_.failure_time; }

 private:
  Path partial_;
};

// Integrates dx/dt = v(x, t) with the Dormand-Prince 5(4) pair, PI step-size
// control and 4th-order dense output at the sample times. Steps whose stages
// hit a density node or whose end point reaches a wall are rejected and the
// step halved. Throws IntegrationError when the step drops below h_min.
Path integrate_trajectory(const FieldEvaluator& field, const TrajectorySpec& spec);
Path integrate_trajectory(const SpectralState& state, const TrajectorySpec& spec);

struct TrajectoryEnsemble {
  std::vector<TrajectorySpec> specs;  // ordered by x0
  std::vector<Path> paths;            // failed members keep their partial path
  long crossing_violations = 0;       // adjacent pairs out of order at a shared sample time
  double worst_crossing = 0.0;        // largest x_i - x_{i+1} seen (<= 0 when ordered)
  double ordering_tolerance = 0.0;

  bool all_ok() const;
  long failures() const;
};

// Integrates every member (in parallel) and verifies the non-crossing
// property at shared sample times within 1e-6 L. Member failures are
// recorded per path rather than thrown. Throws ValidationError for specs not
// strictly ordered by x0 (duplicates included).
TrajectoryEnsemble integrate_ensemble(const SpectralState& state,
                                      std::vector<TrajectorySpec> specs, unsigned jobs = 0);

// n evenly spaced seeds on (-a, a), at cell centres so that neither the end
// points nor (for even n) the stagnation line x = 0 is used. For odd n the
// middle seed is moved from 0 to a quarter spacing.
std::vector<double> seed_uniform(int n, double a);
std::vector<double> seed_uniform(int n, double a, const WellConfig& config);

// Seeds at the (i - 1/2)/n quantiles of the initial density rho(x, 0) of the
// truncated series.
std::vector<double> seed_density_weighted(const SpectralState& state, int n);

// Same, using the exact density |f(x)|^2 of the untruncated profile.
std::vector<double> seed_density_weighted(const ApertureShape& shape, const WellConfig& config,
                                          int n);

}  // namespace qcarpet
