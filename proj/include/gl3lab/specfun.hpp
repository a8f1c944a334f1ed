#pragma once

#include <complex>
#include <functional>
#include <span>

#include "gl3lab/quadrature.hpp"

namespace gl3lab {

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

/// e(x) = exp(2 pi i x).
inline cplx e_of(double x) { return std::polar(1.0, kTwoPi * x); }

/// Principal branch of log Gamma(z): continuous off the negative real axis,
/// real on the positive axis. Throws PoleError at z = 0, -1, -2, ...
cplx log_gamma(cplx z);

/// Riemann zeta via Euler-Maclaurin. Throws PoleError at s = 1.
cplx zeta(cplx s);
/// sum_{n >= 0} (n + a)^{-s}, a > 0, by the same Euler-Maclaurin scheme.
cplx hurwitz_zeta(cplx s, double a);

/// J_{2it}(x) for real t and x > 0.
cplx bessel_j_imag_order(double t, double x);

/// J_{2it}(x) / cosh(pi t); finite for every t.
cplx bessel_j_imag_order_scaled(double t, double x);

/// K_{2it}(x) for x > 0; real. Returns 0 when the value underflows
/// (see bessel_k_underflows).
double bessel_k_imag_order(double t, double x);

/// exp(pi |t|) K_{2it}(x); O(1) over the oscillatory range x < 2|t|.
double bessel_k_imag_order_scaled(double t, double x);

/// True when K_{2it}(x) is below the double range (x > 700 or the scaled
/// value times exp(-pi|t|) underflows). Distinct from a failed evaluation.
bool bessel_k_underflows(double t, double x);

namespace detail {
// Individual evaluation routes for J_{2it}(x)/cosh(pi t); exposed for
// cross-checking the two against each other.
cplx j_scaled_by_series(double t, double x);
cplx j_scaled_by_integral(double t, double x);
}  // namespace detail

/// Vertical line Re s = real_part, truncated to |Im s| <= height_cut.
struct ContourSpec {
  double real_part = 0.0;
  double height_cut = 10.0;
  double node_density = 16.0;  // nodes per unit height

  void validate() const;
};

/// Default truncation height for a contour whose integrand is governed by
/// the scale T: 10 log(2 + T).
double default_height_cut(double T);

/// (1/2 pi i) * integral of F(s) ds along the contour.
///
/// err combines the difference against a half-density rule and a tail
/// estimate |F(s_end)| * height_cut for integrands decaying like |Im s|^-2.
/// Throws PoleError if a listed pole lies within one node spacing of the line.
QuadResult mellin_barnes(const std::function<cplx(cplx)>& F, const ContourSpec& contour,
                         std::span<const cplx> poles = {});

}  // namespace gl3lab
