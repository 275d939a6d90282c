#pragma once

#include <complex>
#include <functional>
#include <span>

namespace qcarpet {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;   // summed Gauss/Kronrod discrepancy over all intervals
  int intervals = 0;
};

struct QuadratureOptions {
  double abs_tol = 1e-10;
  int max_intervals = 4000;
};

// Globally adaptive Gauss-Kronrod (10/21) integration of f over [a, b]. The
// range is first split at every breakpoint strictly inside it; afterwards the
// interval with the largest error estimate is bisected until the summed
// estimate falls to abs_tol. Throws AccuracyError when the interval budget is
// exhausted first.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints = {},
                           const QuadratureOptions& options = {});

// Real and imaginary parts integrated separately, each to options.abs_tol.
std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b,
                                       std::span<const double> breakpoints = {},
                                       const QuadratureOptions& options = {},
                                       double* error = nullptr);

}  // namespace qcarpet
