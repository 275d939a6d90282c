#pragma once

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qcarpet {

enum class ShapeKind { Square, Triangle, Parabola, HalfCosine, HalfCosineSquared, Gaussian, Sampled };

// Initial aperture profile f(x). The six analytic variants are real, even and
// unit-normalised (the Gaussian on the whole real line, the others on
// |x| <= w/2). A sampled profile is a complex table on |x| <= w/2, linearly
// interpolated between nodes and zero outside them.
class ApertureShape {
 public:
  // Analytic variant of width w. For the Gaussian, sigma0 defaults to w/(2 pi).
  static ApertureShape analytic(ShapeKind kind, double w,
                                std::optional<double> sigma0 = std::nullopt);
  static ApertureShape sampled(double w, std::vector<double> x,
                               std::vector<std::complex<double>> f);

  ShapeKind kind() const noexcept { return kind_; }
  double width() const noexcept { return w_; }
  double sigma0() const noexcept { return sigma0_; }
  bool is_analytic() const noexcept { return kind_ != ShapeKind::Sampled; }

  std::complex<double> operator()(double x) const;
  double density(double x) const { return std::norm((*this)(x)); }

  // Points where the profile or one of its low derivatives is discontinuous;
  // quadrature splits its range there.
  std::vector<double> breakpoints() const;

  // Support of the profile: [-w/2, w/2] except for the Gaussian (whole line)
  // and sampled tables (first to last node).
  double support_lo() const;
  double support_hi() const;

  std::string name() const;

 private:
  ApertureShape() = default;

  ShapeKind kind_ = ShapeKind::Square;
  double w_ = 0.0;
  double sigma0_ = 0.0;
  std::vector<double> xs_;
  std::vector<std::complex<double>> fs_;
};

// "square", "triangle", "parabola", "half-cosine", "half-cosine-squared",
// "gaussian", "sampled".
std::string shape_name(ShapeKind kind);
ShapeKind parse_shape(std::string_view name);

inline constexpr ShapeKind kAnalyticShapes[] = {
    ShapeKind::Square,     ShapeKind::Triangle,          ShapeKind::Parabola,
    ShapeKind::HalfCosine, ShapeKind::HalfCosineSquared, ShapeKind::Gaussian};

// Unnormalised sinc: sin(x)/x with sinc(0) = 1.
double sinc(double x);

}  // namespace qcarpet
