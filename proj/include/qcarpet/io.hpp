#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcarpet/bohm.hpp"
#include "qcarpet/carpet.hpp"
#include "qcarpet/spectral.hpp"

namespace qcarpet {

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// alpha,re_c,im_c,weight,energy
void write_coefficients_csv(const std::filesystem::path& path, const SpectralState& state);

// N,P_N,H_N for every truncation N = 1..size().
void write_convergence_csv(const std::filesystem::path& path, const SpectralState& state);

// 16-bit binary PGM (P5, big-endian samples). Values are clipped to
// [clip_lo, clip_hi] and mapped linearly onto 0..65535. Rows are written with
// the last time first so that t increases upward in a viewer; x runs left to
// right.
void write_pgm(const std::filesystem::path& path, const FieldGrid& grid);

struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  unsigned maxval = 0;
  std::vector<std::uint16_t> pixels;  // row-major, top row first
};
PgmImage read_pgm(const std::filesystem::path& path);

// nt rows of nx comma-separated values, first row t = 0.
void write_grid_csv(const std::filesystem::path& path, const FieldGrid& grid);

// {kind, nx, nt, L, T, clip, tau_r, P_N, ...}
nlohmann::json grid_sidecar(const FieldGrid& grid, const SpectralState& state);

// traj_id,t,x in long format, one row per sample.
void write_trajectories_csv(const std::filesystem::path& path, const TrajectoryEnsemble& ens);

nlohmann::json to_json(const WellConfig& config);
nlohmann::json to_json(const DecayFit& fit);
nlohmann::json to_json(const SymmetryReport& report);
nlohmann::json to_json(const TrajectoryDiagnostics& diag);
nlohmann::json ensemble_json(const TrajectoryEnsemble& ens);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Complex profile table with columns x,re[,im] (header line optional).
struct ProfileTable {
  std::vector<double> x;
  std::vector<std::complex<double>> f;
};
ProfileTable read_profile_csv(const std::filesystem::path& path);

}  // namespace qcarpet
