#include "qcarpet/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qcarpet/errors.hpp"

namespace qcarpet {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::out : std::ios::out);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_coefficients_csv(const std::filesystem::path& path, const SpectralState& state) {
  auto out = open_out(path);
  out << "alpha,re_c,im_c,weight,energy\n";
  for (const Mode& mode : state.modes()) {
    out << mode.alpha << ',' << format_double(mode.c.real()) << ','
        << format_double(mode.c.imag()) << ',' << format_double(std::norm(mode.c)) << ','
        << format_double(energy(mode.alpha, state.config())) << '\n';
  }
  finish(out, path);
}

void write_convergence_csv(const std::filesystem::path& path, const SpectralState& state) {
  const ConvergenceCurve curve = convergence_curve(state);
  auto out = open_out(path);
  out << "N,P_N,H_N\n";
  for (std::size_t i = 0; i < curve.overlap.size(); ++i) {
    out << i + 1 << ',' << format_double(curve.overlap[i]) << ','
        << format_double(curve.energy[i]) << '\n';
  }
  finish(out, path);
}

void write_pgm(const std::filesystem::path& path, const FieldGrid& grid) {
  auto out = open_out(path, true);
  out << "P5\n" << grid.nx << ' ' << grid.nt << "\n65535\n";
  const double span = grid.clip_hi - grid.clip_lo;
  std::vector<unsigned char> row(2 * grid.nx);
  for (std::size_t jj = 0; jj < grid.nt; ++jj) {
    const std::size_t j = grid.nt - 1 - jj;
    for (std::size_t i = 0; i < grid.nx; ++i) {
      double u = span > 0.0 ? (grid.at(i, j) - grid.clip_lo) / span : 0.0;
      if (!(u >= 0.0)) u = 0.0;  // also maps NaN to the floor
      if (u > 1.0) u = 1.0;
      const auto p = static_cast<std::uint16_t>(std::lround(u * 65535.0));
      row[2 * i] = static_cast<unsigned char>(p >> 8);
      row[2 * i + 1] = static_cast<unsigned char>(p & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  finish(out, path);
}

PgmImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string magic;
  PgmImage img;
  in >> magic >> img.width >> img.height >> img.maxval;
  if (magic != "P5" || !in || img.maxval == 0 || img.maxval > 65535) {
    throw std::runtime_error(path.string() + " is not a binary PGM");
  }
  in.get();
  const std::size_t bytes = img.maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(img.width * img.height * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!in) throw std::runtime_error(path.string() + " is truncated");
  img.pixels.resize(img.width * img.height);
  for (std::size_t k = 0; k < img.pixels.size(); ++k) {
    img.pixels[k] = bytes == 2 ? static_cast<std::uint16_t>((raw[2 * k] << 8) | raw[2 * k + 1])
                               : raw[k];
  }
  return img;
}

void write_grid_csv(const std::filesystem::path& path, const FieldGrid& grid) {
  auto out = open_out(path);
  for (std::size_t j = 0; j < grid.nt; ++j) {
    for (std::size_t i = 0; i < grid.nx; ++i) {
      if (i) out << ',';
      out << format_double(grid.at(i, j));
    }
    out << '\n';
  }
  finish(out, path);
}

nlohmann::json grid_sidecar(const FieldGrid& grid, const SpectralState& state) {
  nlohmann::json j;
  j["kind"] = field_kind_name(grid.kind);
  j["nx"] = grid.nx;
  j["nt"] = grid.nt;
  j["L"] = grid.config.L;
  j["T"] = grid.t_max();
  j["clip"] = {grid.clip_lo, grid.clip_hi};
  j["tau_r"] = recurrence_time(grid.config);
  j["P_N"] = overlap_probability(state);
  j["x_range"] = {grid.x_axis.front(), grid.x_axis.back()};
  j["t_range"] = {grid.t_axis.front(), grid.t_axis.back()};
  j["layout"] = "row-major, x fastest; first row is t = T (t increasing upward)";
  j["max_value"] = grid.max_value();
  j["temporal_variation"] = grid.temporal_variation();
  j["near_node_samples"] =
      std::count(grid.near_node.begin(), grid.near_node.end(), std::uint8_t{1});
  return j;
}

void write_trajectories_csv(const std::filesystem::path& path, const TrajectoryEnsemble& ens) {
  auto out = open_out(path);
  out << "traj_id,t,x\n";
  for (std::size_t k = 0; k < ens.paths.size(); ++k) {
    const Path& p = ens.paths[k];
    for (std::size_t s = 0; s < p.t.size(); ++s) {
      out << k << ',' << format_double(p.t[s]) << ',' << format_double(p.x[s]) << '\n';
    }
  }
  finish(out, path);
}

nlohmann::json to_json(const WellConfig& config) {
  return {{"L", config.L}, {"w", config.w}, {"m", config.m}, {"hbar", config.hbar}};
}

nlohmann::json to_json(const DecayFit& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"points", fit.points},
          {"envelope", fit.envelope},
          {"slope_lower", fit.slope_lower},
          {"slope_upper", fit.slope_upper},
          {"power_law", fit.power_law}};
}

nlohmann::json to_json(const SymmetryReport& r) {
  nlohmann::json j = {{"mirror_error", r.mirror_error},
                      {"time_reversal_error", r.time_reversal_error},
                      {"revival_fidelity", r.revival_fidelity},
                      {"max_rho", r.max_rho},
                      {"nx", r.nx},
                      {"nt", r.nt}};
  if (r.half_time_split_checked) {
    j["half_time_split_error"] = r.half_time_split_error;
  } else {
    j["half_time_split_error"] = nullptr;
    j["half_time_split_notice"] = r.half_time_split_notice;
  }
  return j;
}

nlohmann::json to_json(const TrajectoryDiagnostics& d) {
  return {{"accepted_steps", d.accepted_steps},
          {"rejected_steps", d.rejected_steps},
          {"near_node_rejections", d.near_node_rejections},
          {"wall_rejections", d.wall_rejections},
          {"evaluations", d.evaluations},
          {"min_step", d.min_step},
          {"max_step", d.max_step},
          {"max_speed", d.max_speed}};
}

nlohmann::json ensemble_json(const TrajectoryEnsemble& ens) {
  nlohmann::json members = nlohmann::json::array();
  for (std::size_t k = 0; k < ens.paths.size(); ++k) {
    const Path& p = ens.paths[k];
    nlohmann::json m = {{"traj_id", k},
                        {"x0", p.x0},
                        {"status", p.ok() ? "ok" : "step_underflow"},
                        {"samples", p.t.size()},
                        {"diagnostics", to_json(p.diagnostics)}};
    if (!p.x.empty()) {
      double max_abs = 0.0, max_disp = 0.0;
      for (double x : p.x) {
        max_abs = std::max(max_abs, std::abs(x));
        max_disp = std::max(max_disp, std::abs(x - p.x0));
      }
      m["x_final"] = p.x.back();
      m["max_abs_x"] = max_abs;
      m["max_displacement"] = max_disp;
    }
    if (!p.ok()) {
      m["failure_time"] = p.failure_time;
      m["message"] = p.message;
    }
    members.push_back(std::move(m));
  }
  return {{"members", members},
          {"count", ens.paths.size()},
          {"failures", ens.failures()},
          {"crossing_violations", ens.crossing_violations},
          {"worst_crossing", ens.worst_crossing},
          {"ordering_tolerance", ens.ordering_tolerance}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

ProfileTable read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open profile " + path.string());
  ProfileTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, re, im = 0.0;
    if (!(ss >> x >> re)) {
      if (lineno == 1) continue;  // header
      throw ValidationError("profile " + path.string() + ": bad row at line " +
                            std::to_string(lineno));
    }
    ss >> im;
    table.x.push_back(x);
    table.f.emplace_back(re, im);
  }
  if (table.x.size() < 2) throw ValidationError("profile " + path.string() + " needs >= 2 rows");
  return table;
}

}  // namespace qcarpet
