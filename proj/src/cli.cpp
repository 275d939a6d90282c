#include "qcarpet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "qcarpet/bohm.hpp"
#include "qcarpet/carpet.hpp"
#include "qcarpet/errors.hpp"
#include "qcarpet/fields.hpp"
#include "qcarpet/io.hpp"
#include "qcarpet/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace qcarpet {

void RunConfig::validate() const {
  well.validate();
  ShapeKind kind;
  try {
    kind = parse_shape(shape);
  } catch (const std::exception&) {
    throw ValidationError("unknown shape '" + shape +
                          "' (expected square, triangle, parabola, half-cosine, "
                          "half-cosine-squared, gaussian or sampled)");
  }
  if (kind == ShapeKind::Sampled && profile_csv.empty()) {
    throw ValidationError("shape 'sampled' needs profile_csv (a CSV of x,re[,im] rows)");
  }
  if (sigma0 && !(*sigma0 > 0.0)) throw ValidationError("sigma0 must be positive");
  if (n_modes < 1) throw ValidationError("n_modes must be >= 1 (got " + std::to_string(n_modes) + ")");
  if (nx < 2 || nt < 2) throw ValidationError("nx and nt must both be >= 2");
  if (t_max && !(*t_max > 0.0)) throw ValidationError("t_max must be positive");
  if (seeds < 1) throw ValidationError("seeds must be >= 1");
  if (seed_half_width &&
      !(*seed_half_width > 0.0 && *seed_half_width < well.half_length())) {
    throw ValidationError("seed_half_width must lie in (0, L/2)");
  }
  if (seeding != "uniform" && seeding != "density") {
    throw ValidationError("seeding must be 'uniform' or 'density'");
  }
  std::vector<double> sorted = x0;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!(std::abs(sorted[i]) < well.half_length())) {
      throw ValidationError("seed x0 = " + format_double(sorted[i]) + " is outside the box");
    }
    if (i > 0 && sorted[i] == sorted[i - 1]) {
      throw ValidationError("duplicate seed x0 = " + format_double(sorted[i]));
    }
  }
  if (samples < 2) throw ValidationError("samples must be >= 2");
  if (!(rtol > 0.0)) throw ValidationError("rtol must be positive");
  if (atol && !(*atol > 0.0)) throw ValidationError("atol must be positive");
  for (const auto& f : fields) {
    try {
      parse_field_kind(f);
    } catch (const std::exception&) {
      throw ValidationError("unknown field '" + f +
                            "' (expected density, velocity or quantum-potential)");
    }
  }
  if (fit_lo < 1 || fit_hi <= fit_lo) throw ValidationError("fit range must satisfy 1 <= fit_lo < fit_hi");
  if (!(spread_threshold >= 0.0)) throw ValidationError("spread_threshold must be >= 0");
  if (!fs::is_directory(out)) {
    throw ValidationError("output directory '" + out + "' does not exist");
  }
}

double RunConfig::resolved_t_max() const { return t_max ? *t_max : recurrence_time(well); }

double RunConfig::resolved_seed_half_width() const {
  if (seed_half_width) return *seed_half_width;
  return parse_shape(shape) == ShapeKind::Gaussian ? 0.7 * well.w : 0.5 * well.w;
}

ApertureShape RunConfig::make_shape() const {
  const ShapeKind kind = parse_shape(shape);
  if (kind == ShapeKind::Sampled) {
    ProfileTable t = read_profile_csv(profile_csv);
    return ApertureShape::sampled(well.w, std::move(t.x), std::move(t.f));
  }
  return ApertureShape::analytic(kind, well.w, sigma0);
}

SpectralState RunConfig::make_state() const {
  const ApertureShape s = make_shape();
  if (s.is_analytic()) return coefficients_analytic(s, n_modes, well);
  return coefficients_quadrature(s, n_modes, well);
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void take_optional(const json& j, const char* key, std::optional<double>& dst) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    dst.reset();
  } else {
    dst = j.at(key).get<double>();
  }
}

}  // namespace

json to_json(const RunConfig& c) {
  return {{"L", c.well.L},
          {"w", c.well.w},
          {"m", c.well.m},
          {"hbar", c.well.hbar},
          {"shape", c.shape},
          {"sigma0", optional_json(c.sigma0)},
          {"profile_csv", c.profile_csv},
          {"n_modes", c.n_modes},
          {"nx", c.nx},
          {"nt", c.nt},
          {"t_max", optional_json(c.t_max)},
          {"seeds", c.seeds},
          {"seed_half_width", optional_json(c.seed_half_width)},
          {"seeding", c.seeding},
          {"x0", c.x0},
          {"samples", c.samples},
          {"rtol", c.rtol},
          {"atol", optional_json(c.atol)},
          {"fields", c.fields},
          {"raw_csv", c.raw_csv},
          {"fit_lo", c.fit_lo},
          {"fit_hi", c.fit_hi},
          {"spread_threshold", c.spread_threshold},
          {"out", c.out},
          {"jobs", c.jobs}};
}

RunConfig run_config_from_json(const json& in) {
  const json& j = in.contains("run_config") ? in.at("run_config") : in;
  if (!j.is_object()) throw ValidationError("run configuration must be a JSON object");
  static const std::set<std::string> known = {
      "L",     "w",       "m",          "hbar",   "shape",  "sigma0",          "profile_csv",
      "n_modes", "nx",    "nt",         "t_max",  "seeds",  "seed_half_width", "seeding",
      "x0",    "samples", "rtol",       "atol",   "fields", "raw_csv",         "fit_lo",
      "fit_hi", "spread_threshold", "out", "jobs"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ValidationError("unknown config key '" + item.key() + "'");
  }
  RunConfig c;
  try {
    take(j, "L", c.well.L);
    take(j, "w", c.well.w);
    take(j, "m", c.well.m);
    take(j, "hbar", c.well.hbar);
    take(j, "shape", c.shape);
    take_optional(j, "sigma0", c.sigma0);
    take(j, "profile_csv", c.profile_csv);
    take(j, "n_modes", c.n_modes);
    take(j, "nx", c.nx);
    take(j, "nt", c.nt);
    take_optional(j, "t_max", c.t_max);
    take(j, "seeds", c.seeds);
    take_optional(j, "seed_half_width", c.seed_half_width);
    take(j, "seeding", c.seeding);
    take(j, "x0", c.x0);
    take(j, "samples", c.samples);
    take(j, "rtol", c.rtol);
    take_optional(j, "atol", c.atol);
    take(j, "fields", c.fields);
    take(j, "raw_csv", c.raw_csv);
    take(j, "fit_lo", c.fit_lo);
    take(j, "fit_hi", c.fit_hi);
    take(j, "spread_threshold", c.spread_threshold);
    take(j, "out", c.out);
    take(j, "jobs", c.jobs);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config value: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

json cmd_decompose(const RunConfig& config) {
  config.validate();
  const SpectralState state = config.make_state();
  const fs::path out(config.out);
  write_coefficients_csv(out / "coefficients.csv", state);
  write_convergence_csv(out / "convergence.csv", state);

  json j;
  j["run_config"] = to_json(config);
  j["N"] = state.size();
  j["parity"] = parity_name(state.parity());
  j["P_N"] = overlap_probability(state);
  j["H_N"] = overlap_probability(state) > 0.0 ? json(expected_energy(state)) : json(nullptr);
  j["tau_r"] = recurrence_time(config.well);
  j["norm_deficit"] = state.info().norm_deficit;
  j["quadrature_error"] = state.info().quadrature_error;
  const int hi = std::min<int>(config.fit_hi, static_cast<int>(state.size()));
  try {
    const DecayFit fit = decay_exponent(state, config.fit_lo, hi);
    j["decay_fit"] = to_json(fit);
    j["decay_fit"]["range"] = {config.fit_lo, hi};
  } catch (const std::exception& e) {
    j["decay_fit"] = {{"error", e.what()}, {"range", {config.fit_lo, hi}}};
  }
  try {
    j["spread"] = {{"threshold_percent", config.spread_threshold},
                   {"count", spread_count(state, config.spread_threshold)}};
  } catch (const std::exception& e) {
    j["spread"] = {{"threshold_percent", config.spread_threshold}, {"error", e.what()}};
  }
  write_json(out / "decompose.json", j);
  return j;
}

json cmd_carpet(const RunConfig& config) {
  config.validate();
  const SpectralState state = config.make_state();
  const fs::path out(config.out);
  const double t_max = config.resolved_t_max();
  json j;
  j["run_config"] = to_json(config);
  j["tau_r"] = recurrence_time(config.well);
  j["T"] = t_max;
  std::optional<FieldGrid> density;
  for (const auto& name : config.fields) {
    const FieldKind kind = parse_field_kind(name);
    FieldGrid grid = render_grid(state, kind, static_cast<std::size_t>(config.nx),
                                 static_cast<std::size_t>(config.nt), t_max, config.jobs);
    json side = grid_sidecar(grid, state);
    side["run_config"] = to_json(config);
    write_pgm(out / (name + ".pgm"), grid);
    write_json(out / (name + ".json"), side);
    if (config.raw_csv) write_grid_csv(out / (name + ".csv"), grid);
    j["grids"][name] = side;
    if (kind == FieldKind::Density) density = std::move(grid);
  }
  // The density raster doubles as the symmetry grid when it spans [0, tau_r].
  SymmetryReport report;
  if (density && t_max == recurrence_time(config.well)) {
    report = symmetry_report(state, *density, config.jobs);
  } else {
    report = symmetry_report(state, static_cast<std::size_t>(config.nx),
                             static_cast<std::size_t>(config.nt), config.jobs);
  }
  json sym = to_json(report);
  sym["parity"] = parity_name(state.parity());
  sym["run_config"] = to_json(config);
  write_json(out / "symmetry.json", sym);
  j["symmetry"] = sym;
  return j;
}

json cmd_trajectories(const RunConfig& config, long* failures) {
  config.validate();
  const SpectralState state = config.make_state();
  const fs::path out(config.out);
  std::vector<double> seeds = config.x0;
  std::sort(seeds.begin(), seeds.end());
  if (seeds.empty()) {
    seeds = config.seeding == "density"
                ? seed_density_weighted(state, config.seeds)
                : seed_uniform(config.seeds, config.resolved_seed_half_width(), config.well);
  }
  const double t_max = config.resolved_t_max();
  std::vector<TrajectorySpec> specs;
  for (double x0 : seeds) {
    auto spec = TrajectorySpec::with_defaults(config.well, x0, t_max,
                                              static_cast<std::size_t>(config.samples));
    spec.rtol = config.rtol;
    if (config.atol) spec.atol = *config.atol;
    specs.push_back(std::move(spec));
  }
  const TrajectoryEnsemble ens = integrate_ensemble(state, std::move(specs), config.jobs);
  write_trajectories_csv(out / "trajectories.csv", ens);
  json j = ensemble_json(ens);
  j["run_config"] = to_json(config);
  j["T"] = t_max;
  j["tau_r"] = recurrence_time(config.well);
  write_json(out / "trajectories.json", j);
  if (failures) *failures = ens.failures();
  return j;
}

namespace {

// Flag values that override the config file only when given.
struct Overrides {
  std::string config_path;
  std::optional<std::string> shape, out, seeding, profile;
  std::optional<double> L, w, m, hbar, t_max, sigma0, half_width, rtol, atol;
  std::optional<int> n_modes, nx, nt, seeds, samples;
  std::optional<unsigned> jobs;
  std::vector<double> x0;
  std::vector<std::string> fields;
  bool raw_csv = false;

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (shape) c.shape = *shape;
    if (profile) c.profile_csv = *profile;
    if (out) c.out = *out;
    if (seeding) c.seeding = *seeding;
    if (L) c.well.L = *L;
    if (w) c.well.w = *w;
    if (m) c.well.m = *m;
    if (hbar) c.well.hbar = *hbar;
    if (t_max) c.t_max = *t_max;
    if (sigma0) c.sigma0 = *sigma0;
    if (half_width) c.seed_half_width = *half_width;
    if (rtol) c.rtol = *rtol;
    if (atol) c.atol = *atol;
    if (n_modes) c.n_modes = *n_modes;
    if (nx) c.nx = *nx;
    if (nt) c.nt = *nt;
    if (seeds) c.seeds = *seeds;
    if (samples) c.samples = *samples;
    if (jobs) c.jobs = *jobs;
    if (!x0.empty()) c.x0 = x0;
    if (!fields.empty()) c.fields = fields;
    if (raw_csv) c.raw_csv = true;
    return c;
  }
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration (or an emitted sidecar)");
  cmd->add_option("--shape", o.shape, "Initial profile shape");
  cmd->add_option("--profile", o.profile, "CSV table x,re[,im] for --shape sampled");
  cmd->add_option("--L", o.L, "Box length");
  cmd->add_option("--w", o.w, "Aperture width");
  cmd->add_option("--m", o.m, "Mass");
  cmd->add_option("--hbar", o.hbar, "Action constant");
  cmd->add_option("--sigma0", o.sigma0, "Gaussian width (default w/(2 pi))");
  cmd->add_option("--n-modes", o.n_modes, "Number of modes N");
  cmd->add_option("--out", o.out, "Existing output directory");
  cmd->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");
}

void print_checks(const std::vector<CheckResult>& checks, std::ostream& out) {
  for (const auto& c : checks) {
    out << (c.passed ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << "  measured "
        << c.measured.dump() << "  expected " << c.expected.dump();
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << '\n';
  }
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum carpets in the infinite square well", "qcarpet"};
  app.require_subcommand(1);
  Overrides o;
  double tau_scale = 1.0;
  std::vector<int> only;
  std::vector<double> px, pt;

  auto* dec = app.add_subcommand("decompose", "Coefficients, P_N, <H>_N, decay fit, spread count");
  add_common(dec, o);

  auto* car = app.add_subcommand("carpet", "Density and velocity rasters plus symmetry report");
  add_common(car, o);
  car->add_option("--nx", o.nx, "Raster points in x");
  car->add_option("--nt", o.nt, "Raster points in t");
  car->add_option("--t-max", o.t_max, "Final time (default tau_r)");
  car->add_option("--fields", o.fields, "density, velocity, quantum-potential");
  car->add_flag("--raw-csv", o.raw_csv, "Also write each raster as a CSV matrix");

  auto* tra = app.add_subcommand("trajectories", "Bohmian trajectory ensemble");
  add_common(tra, o);
  tra->add_option("--seeds", o.seeds, "Number of uniform seeds");
  tra->add_option("--x0", o.x0, "Explicit seed positions")->delimiter(',');
  tra->add_option("--seed-half-width", o.half_width, "Half-width of the uniform seed set");
  tra->add_option("--seeding", o.seeding, "uniform or density");
  tra->add_option("--samples", o.samples, "Output samples per trajectory");
  tra->add_option("--t-max", o.t_max, "Final time (default tau_r)");
  tra->add_option("--rtol", o.rtol, "Relative tolerance");
  tra->add_option("--atol", o.atol, "Absolute tolerance (default 1e-10 L)");

  auto* ver = app.add_subcommand("verify", "Run the acceptance checks");
  ver->add_option("--out", o.out, "Existing output directory for verify.json");
  ver->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");
  ver->add_option("--only", only, "Check ids to run")->delimiter(',');
  ver->add_option("--fault-tau-scale", tau_scale, "Scale the recurrence time (negative control)");

  auto* pnt = app.add_subcommand("point", "rho, v and Q at given points, CSV on stdout");
  add_common(pnt, o);
  pnt->add_option("--x", px, "Positions")->delimiter(',')->required();
  pnt->add_option("--t", pt, "Times")->delimiter(',')->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*ver) {
      const std::string dir = o.out.value_or(".");
      if (!fs::is_directory(dir)) {
        throw ValidationError("output directory '" + dir + "' does not exist");
      }
      VerifyOptions vo;
      vo.jobs = o.jobs.value_or(0);
      vo.tau_scale = tau_scale;
      vo.only = only;
      const auto checks = run_acceptance(vo);
      json report = json::array();
      for (const auto& c : checks) report.push_back(to_json(c));
      const bool all = std::all_of(checks.begin(), checks.end(), [](auto& c) { return c.passed; });
      write_json(fs::path(dir) / "verify.json",
                 {{"checks", report}, {"all_passed", all}, {"tau_scale", tau_scale}});
      print_checks(checks, out);
      return all ? kExitOk : kExitAcceptance;
    }

    const RunConfig config = o.resolve();
    if (*dec) {
      const json j = cmd_decompose(config);
      out << "N=" << j["N"] << " P_N=" << j["P_N"] << " H_N=" << j["H_N"]
          << " tau_r=" << j["tau_r"] << '\n';
    } else if (*car) {
      const json j = cmd_carpet(config);
      out << "T=" << j["T"] << " mirror_error=" << j["symmetry"]["mirror_error"]
          << " time_reversal_error=" << j["symmetry"]["time_reversal_error"]
          << " revival_fidelity=" << j["symmetry"]["revival_fidelity"] << '\n';
    } else if (*tra) {
      long failures = 0;
      const json j = cmd_trajectories(config, &failures);
      out << "trajectories=" << j["count"] << " failures=" << failures
          << " crossing_violations=" << j["crossing_violations"] << '\n';
      if (failures > 0) {
        for (const auto& m : j["members"]) {
          if (m["status"] != "ok") err << "trajectory " << m["traj_id"] << ": " << m["message"].get<std::string>() << '\n';
        }
        return kExitNumerical;
      }
    } else if (*pnt) {
      config.validate();
      const FieldEvaluator field(config.make_state());
      out << "x,t,rho,v,q,flags\n";
      for (double x : px) {
        for (double t : pt) {
          const FieldSample s = field.sample(x, t);
          out << format_double(x) << ',' << format_double(t) << ',' << format_double(s.rho) << ','
              << format_double(s.v) << ',' << format_double(s.q) << ','
              << (s.near_node ? "near_node" : "") << '\n';
        }
      }
    }
    return kExitOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const UnsupportedError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace qcarpet
