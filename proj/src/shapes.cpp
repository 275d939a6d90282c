#include "qcarpet/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qcarpet/errors.hpp"

namespace qcarpet {

using std::numbers::pi;

double sinc(double x) {
  // Taylor branch keeps full precision where sin(x)/x would lose digits.
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

ApertureShape ApertureShape::analytic(ShapeKind kind, double w, std::optional<double> sigma0) {
  if (kind == ShapeKind::Sampled) {
    throw ValidationError("ApertureShape::analytic: use ApertureShape::sampled for tables");
  }
  if (!(w > 0.0) || !std::isfinite(w)) throw ValidationError("aperture width must be positive");
  ApertureShape s;
  s.kind_ = kind;
  s.w_ = w;
  s.sigma0_ = sigma0.value_or(w / (2.0 * pi));
  if (!(s.sigma0_ > 0.0)) throw ValidationError("gaussian sigma0 must be positive");
  return s;
}

ApertureShape ApertureShape::sampled(double w, std::vector<double> x,
                                     std::vector<std::complex<double>> f) {
  if (!(w > 0.0)) throw ValidationError("aperture width must be positive");
  if (x.size() != f.size()) throw ValidationError("sampled profile: x and f sizes differ");
  if (x.size() < 2) throw ValidationError("sampled profile needs at least two nodes");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw ValidationError("sampled profile: x must be strictly increasing");
  }
  const double half = 0.5 * w * (1.0 + 1e-12);
  if (x.front() < -half || x.back() > half) {
    throw ValidationError("sampled profile nodes must lie within |x| <= w/2");
  }
  ApertureShape s;
  s.kind_ = ShapeKind::Sampled;
  s.w_ = w;
  s.xs_ = std::move(x);
  s.fs_ = std::move(f);
  return s;
}

std::complex<double> ApertureShape::operator()(double x) const {
  const double h = 0.5 * w_;
  if (kind_ == ShapeKind::Gaussian) {
    const double s2 = sigma0_ * sigma0_;
    return std::pow(2.0 * pi * s2, -0.25) * std::exp(-x * x / (4.0 * s2));
  }
  if (kind_ == ShapeKind::Sampled) {
    if (x < xs_.front() || x > xs_.back()) return 0.0;
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    if (it == xs_.end()) return fs_.back();
    const auto i = static_cast<std::size_t>(it - xs_.begin());
    const double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
    return (1.0 - t) * fs_[i - 1] + t * fs_[i];
  }
  if (std::abs(x) > h) return 0.0;
  const double k0 = pi / w_;
  switch (kind_) {
    case ShapeKind::Square:
      return 1.0 / std::sqrt(w_);
    case ShapeKind::Triangle:
      return std::sqrt(3.0 / w_) * (1.0 - 2.0 * std::abs(x) / w_);
    case ShapeKind::Parabola: {
      const double u = 2.0 * x / w_;
      return std::sqrt(15.0 / (8.0 * w_)) * (1.0 - u * u);
    }
    case ShapeKind::HalfCosine:
      return std::sqrt(2.0 / w_) * std::cos(k0 * x);
    case ShapeKind::HalfCosineSquared: {
      const double c = std::cos(k0 * x);
      return std::sqrt(8.0 / (3.0 * w_)) * c * c;
    }
    default:
      return 0.0;
  }
}

std::vector<double> ApertureShape::breakpoints() const {
  switch (kind_) {
    case ShapeKind::Gaussian:
      return {0.0};
    case ShapeKind::Sampled:
      return xs_;
    default:
      return {-0.5 * w_, 0.0, 0.5 * w_};
  }
}

double ApertureShape::support_lo() const {
  if (kind_ == ShapeKind::Gaussian) return -INFINITY;
  if (kind_ == ShapeKind::Sampled) return xs_.front();
  return -0.5 * w_;
}

double ApertureShape::support_hi() const {
  if (kind_ == ShapeKind::Gaussian) return INFINITY;
  if (kind_ == ShapeKind::Sampled) return xs_.back();
  return 0.5 * w_;
}

std::string ApertureShape::name() const { return shape_name(kind_); }

std::string shape_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Square: return "square";
    case ShapeKind::Triangle: return "triangle";
    case ShapeKind::Parabola: return "parabola";
    case ShapeKind::HalfCosine: return "half-cosine";
    case ShapeKind::HalfCosineSquared: return "half-cosine-squared";
    case ShapeKind::Gaussian: return "gaussian";
    case ShapeKind::Sampled: return "sampled";
  }
  return "unknown";
}

ShapeKind parse_shape(std::string_view name) {
  for (auto k : {ShapeKind::Square, ShapeKind::Triangle, ShapeKind::Parabola,
                 ShapeKind::HalfCosine, ShapeKind::HalfCosineSquared, ShapeKind::Gaussian,
                 ShapeKind::Sampled}) {
    if (shape_name(k) == name) return k;
  }
  throw ValidationError("unknown shape '" + std::string(name) +
                        "' (expected square, triangle, parabola, half-cosine, "
                        "half-cosine-squared, gaussian)");
}

}  // namespace qcarpet
