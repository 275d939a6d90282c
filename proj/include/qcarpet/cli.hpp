#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcarpet/shapes.hpp"
#include "qcarpet/spectral.hpp"
#include "qcarpet/well.hpp"

namespace qcarpet {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2, kExitAcceptance = 3 };

struct RunConfig {
  WellConfig well;
  std::string shape = "half-cosine-squared";
  std::optional<double> sigma0;       // Gaussian width, default w / (2 pi)
  std::string profile_csv;            // table for shape "sampled"
  int n_modes = 200;
  int nx = 1001;
  int nt = 1001;
  std::optional<double> t_max;        // default: recurrence time
  int seeds = 20;
  std::optional<double> seed_half_width;  // default w/2, 0.7 w for the Gaussian
  std::string seeding = "uniform";        // or "density"
  std::vector<double> x0;                 // explicit seeds override `seeds`
  int samples = 401;
  double rtol = 1e-8;
  std::optional<double> atol;             // default 1e-10 L
  std::vector<std::string> fields = {"density", "velocity"};
  bool raw_csv = false;
  int fit_lo = 10;
  int fit_hi = 100;
  double spread_threshold = 25.0;
  std::string out = ".";
  unsigned jobs = 0;

  // Throws ValidationError with a message naming the offending setting.
  void validate() const;

  double resolved_t_max() const;
  double resolved_seed_half_width() const;
  ApertureShape make_shape() const;
  SpectralState make_state() const;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& config);
// Accepts a plain config object or any sidecar carrying a "run_config" key.
// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

nlohmann::json cmd_decompose(const RunConfig& config);
nlohmann::json cmd_carpet(const RunConfig& config);
// Writes outputs even when members fail; `failures` reports how many did.
nlohmann::json cmd_trajectories(const RunConfig& config, long* failures = nullptr);

// Entry point of the qcarpet executable; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qcarpet
