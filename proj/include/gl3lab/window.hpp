#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "gl3lab/quadrature.hpp"

namespace gl3lab {

/// Smooth bump supported on [a, b] within [1, 2]:
/// w(x) = amplitude * exp(-c v^2/(1 - v^2)), v = (2x - a - b)/(b - a).
///
/// The sharpness c trades derivative size for Mellin decay: |w~(1/2 + i tau)|
/// is below 1e-9 at tau = 200 for c = 16, against 5e-5 for c = 1.
/// amplitude = 0 gives the zero window, which every transform maps to 0.
class WindowFunction {
 public:
  WindowFunction() = default;
  WindowFunction(double a, double b, double amplitude = 1.0, double sharpness = 16.0);

  static WindowFunction zero() { return WindowFunction(1.0, 2.0, 0.0); }

  double a() const { return a_; }
  double b() const { return b_; }
  double amplitude() const { return amplitude_; }
  double sharpness() const { return sharpness_; }
  bool is_zero() const { return amplitude_ == 0.0; }

  double operator()(double x) const;

  /// w, w', ..., w'''' at x.
  std::array<double, 5> derivatives(double x) const;

  /// Mellin transform int_a^b w(x) x^{s-1} dx.
  cplx mellin(cplx s) const;

  /// sup |w^{(j)}| for j = 0..4, sampled on a fine grid.
  std::array<double, 5> derivative_bounds() const;

 private:
  double a_ = 1.0, b_ = 2.0, amplitude_ = 1.0, sharpness_ = 16.0;
};

/// int_a^b f(x) x^{s-1} dx for a smooth f on [a, b] by composite
/// Gauss-Legendre, with enough panels to resolve x^{i Im s}.
cplx mellin_on(const std::function<cplx(double)>& f, double a, double b, cplx s);

/// Samples f once on composite Gauss nodes over [a, b] so that Mellin
/// transforms at many s reuse the samples. Resolves |Im s| up to max_height
/// plus the oscillation of f itself (given as a frequency in log x).
class MellinTable {
 public:
  MellinTable(const std::function<cplx(double)>& f, double a, double b, double max_height,
              double own_frequency = 0.0);
  cplx operator()(cplx s) const;
  double max_height() const { return max_height_; }
  const std::vector<double>& log_nodes() const { return log_x_; }
  const std::vector<cplx>& weighted() const { return weighted_; }

 private:
  std::vector<double> log_x_;
  std::vector<cplx> weighted_;  // quadrature weight * f(x)
  double max_height_;
};

/// k(t) = amplitude * (exp(-(t - T)^2/M^2) + exp(-(t + T)^2/M^2)).
struct SpectralWindow {
  double T = 10.0;
  double M = 2.0;
  double amplitude = 1.0;

  void validate() const;
  double operator()(double t) const {
    const double a = (t - T) / M, b = (t + T) / M;
    return amplitude * (std::exp(-a * a) + std::exp(-b * b));
  }
  /// T^eps <= M <= T^{1-eps}.
  bool admissible(double eps) const;
  /// Upper end of the t-range where k exceeds exp(-100): T + 10M.
  double t_max() const { return T + 10.0 * M; }
  /// Lower end of the positive t-range, max(0, T - 10M).
  double t_min() const { return std::max(0.0, T - 10.0 * M); }
};

}  // namespace gl3lab
