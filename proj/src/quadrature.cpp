#include "qcarpet/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qcarpet/errors.hpp"

namespace qcarpet {
namespace {

using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& o) const { return error < o.error; }
};

Piece apply_rule(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  const double v = Rule::integrate(f, a, b, 0, 0.0, &err);
  return {a, b, v, err};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           std::span<const double> breakpoints,
                           const QuadratureOptions& options) {
  if (!(b > a)) {
    if (a == b) return {};
    throw DomainError("integrate: lower limit exceeds upper limit");
  }
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Piece> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Piece p = apply_rule(f, cuts[i], cuts[i + 1]);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }

  const double min_width = 1e-13 * (b - a);
  int intervals = static_cast<int>(heap.size());
  while (total_err > options.abs_tol) {
    if (intervals >= options.max_intervals) {
      throw AccuracyError("integrate: interval budget exhausted at error estimate " +
                              std::to_string(total_err),
                          total_err, options.abs_tol);
    }
    Piece worst = heap.top();
    if (worst.b - worst.a < min_width) {
      throw AccuracyError("integrate: interval width underflow at error estimate " +
                              std::to_string(total_err),
                          total_err, options.abs_tol);
    }
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Piece left = apply_rule(f, worst.a, mid);
    Piece right = apply_rule(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }

  // Re-sum from scratch so the value does not carry incremental round-off.
  double value = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {value, err, intervals};
}

std::complex<double> integrate_complex(const std::function<std::complex<double>(double)>& f,
                                       double a, double b,
                                       std::span<const double> breakpoints,
                                       const QuadratureOptions& options, double* error) {
  auto re = integrate([&](double x) { return f(x).real(); }, a, b, breakpoints, options);
  auto im = integrate([&](double x) { return f(x).imag(); }, a, b, breakpoints, options);
  if (error) *error = std::hypot(re.error, im.error);
  return {re.value, im.value};
}

}  // namespace qcarpet
