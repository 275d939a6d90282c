#include "qcarpet/well.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qcarpet/errors.hpp"

namespace qcarpet {
namespace {

void require_mode(int alpha, const char* op) {
  if (alpha < 1) {
    throw DomainError(std::string(op) + ": mode index must be >= 1, got " +
                      std::to_string(alpha));
  }
}

void require_inside(double x, const WellConfig& config, const char* op) {
  if (!(std::abs(x) <= config.half_length())) {
    throw DomainError(std::string(op) + ": position " + std::to_string(x) +
                      " lies outside the box");
  }
}

}  // namespace

void WellConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(L)) throw ValidationError("box length L must be positive and finite");
  if (!positive(w)) throw ValidationError("aperture width w must be positive and finite");
  if (!positive(m)) throw ValidationError("mass m must be positive and finite");
  if (!positive(hbar)) throw ValidationError("hbar must be positive and finite");
  if (w > L) {
    throw ValidationError("aperture width w = " + std::to_string(w) +
                          " does not fit in box of length L = " + std::to_string(L));
  }
}

double wavenumber(int alpha, const WellConfig& config) {
  require_mode(alpha, "wavenumber");
  return std::numbers::pi * alpha / config.L;
}

double energy(int alpha, const WellConfig& config) {
  require_mode(alpha, "energy");
  const double p = config.hbar * std::numbers::pi * alpha / config.L;
  return p * p / (2.0 * config.m);
}

double beat_frequency(int alpha, int alpha_prime, const WellConfig& config) {
  require_mode(alpha, "beat_frequency");
  require_mode(alpha_prime, "beat_frequency");
  // (a^2 - a'^2) is formed exactly in integers so equal indices give 0 exactly
  // and exchanging them flips the sign exactly.
  const double diff = static_cast<double>(static_cast<long long>(alpha) * alpha -
                                          static_cast<long long>(alpha_prime) * alpha_prime);
  const double unit = std::numbers::pi * std::numbers::pi * config.hbar /
                      (2.0 * config.m * config.L * config.L);
  return unit * diff;
}

double recurrence_time(const WellConfig& config) {
  return config.m * config.L * config.L / (2.0 * std::numbers::pi * config.hbar);
}

double eigenfunction(int alpha, double x, const WellConfig& config) {
  require_mode(alpha, "eigenfunction");
  require_inside(x, config, "eigenfunction");
  // Exact zeros at the walls; the trig evaluation leaves O(1e-17) residue.
  if (std::abs(x) == config.half_length()) return 0.0;
  const double k = std::numbers::pi * alpha / config.L;
  const double norm = std::sqrt(2.0 / config.L);
  return (alpha % 2 == 1) ? norm * std::cos(k * x) : norm * std::sin(k * x);
}

double eigenfunction_derivative(int alpha, double x, const WellConfig& config) {
  require_mode(alpha, "eigenfunction_derivative");
  require_inside(x, config, "eigenfunction_derivative");
  const double k = std::numbers::pi * alpha / config.L;
  const double norm = std::sqrt(2.0 / config.L);
  return (alpha % 2 == 1) ? -norm * k * std::sin(k * x) : norm * k * std::cos(k * x);
}

}  // namespace qcarpet
