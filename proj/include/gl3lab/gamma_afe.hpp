#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <vector>

#include "gl3lab/forms.hpp"
#include "gl3lab/specfun.hpp"
#include "gl3lab/window.hpp"

namespace gl3lab {

/// Offset of the AFE and functional-equation contours from the imaginary axis.
inline constexpr double kContourEps = 0.01;

/// log gamma(s, phi) = -(3s/2) log pi + sum of log Gamma((s + m)/2), m in {-mu, 0, mu}.
/// Throws PoleError naming the factor that hits a pole.
cplx log_gamma_factor(cplx s, const GL3Form& form);
cplx gamma_factor(cplx s, const GL3Form& form);

/// gamma(1/2 + it - s) / gamma(1/2 - it + s); unimodular on Re s = 0.
cplx fe_quotient(cplx s, double t, const GL3Form& form);

/// G^{sign}(s) = gamma(1-s)/gamma(s) + sign * i^3 gamma(2-s)/gamma(1+s).
cplx voronoi_G(int sign, cplx s, const GL3Form& form);

/// G(u, t) = gamma(1/2+it+u) gamma(1/2-it+u) / (gamma(1/2+it) gamma(1/2-it)) * exp(u^2).
cplx afe_G(cplx u, double t, const GL3Form& form);

/// V(y; t) truncated at |Im u| <= U, evaluated for many y at fixed t.
///
/// The integrand is holomorphic in Re u > 0, so the line Re u = eps is
/// replaced by Re u = 1, where 1/u is smooth; the two truncated integrals
/// differ by the horizontal connectors at height U, below e^{1-U^2} y^{-1}
/// times |G| there (reported by connector_bound).
class VKernel {
 public:
  VKernel(double t, const GL3Form& form, double U = 6.0);
  cplx operator()(double y) const;
  double t() const { return t_; }
  double connector_bound(double y) const;

  /// Shifted-contour bound |V(y; t)| <= min_sigma y^{-sigma} (1/2 pi) int |G(sigma + i tau, t)| / |sigma + i tau| d tau,
  /// sigma in 1..16, with the moments computed on first use.
  double decay_bound(double y) const;

  /// Smallest Y for which the dropped terms y > Y of an AFE sum are below tol,
  /// with the coefficients bounded on average by 2 (log y)^5 / 5!.
  double truncation_point(double tol) const;

 private:
  double t_, U_, h_;
  int K_;
  struct Moments {
    std::once_flag once;
    std::vector<double> m;  // m[k] for sigma = k + 1
  };
  const std::vector<double>& moments() const;

  GL3Form form_;
  std::shared_ptr<Moments> moments_ = std::make_shared<Moments>();
  std::vector<cplx> c_;         // u = 1 + i k h, k = -K..K: weight * G(u, t) / u / (2 pi)
  double g_edge_;               // max |G| on the horizontal connectors
};

/// One-off evaluation of V(y; t) with truncation height U.
cplx V(double y, double t, const GL3Form& form, double U = 6.0);

/// W(y; t) on Re s = 0 for a fixed window, evaluated for many y.
class WKernel {
 public:
  WKernel(double t, const GL3Form& form, const WindowFunction& w, double height = 400.0);
  cplx operator()(double y) const;
  /// sup |w~| on the line times its length: the uniform bound on |W|.
  double uniform_bound() const { return bound_; }

 private:
  double h_ = 0.0;
  int K_ = 0;
  std::vector<cplx> c_;  // s = i k h, k = -K..K: weight * quotient * w~(s) / (2 pi)
  double bound_ = 0.0;
};

cplx W_fe(double y, double t, const GL3Form& form, const WindowFunction& w);

struct AfeValue {
  double value = 0.0;
  double imag = 0.0;        // diagnostic: vanishes for self-dual forms
  double tail_bound = 0.0;  // estimate of the dropped terms
  double polar = 0.0;        // divisor3 only: pole contribution, included in value
  double polar_bound = 0.0;  // its quadrature error
  std::size_t terms = 0;
};

/// Precomputed (n1, n2, A(n1, n2)) for n1 n2^2 <= Y sorted by y = n1 n2^2;
/// reused across t.
struct AfeTerms {
  double Y = 0.0;
  std::vector<std::uint32_t> n1, y;
  std::vector<double> coeff;  // A(n1, n2) / sqrt(n1 n2^2)

  AfeTerms(const GL3Form& form, double Y);
  std::size_t count_below(double limit) const;
};

/// Truncation point of the AFE sums at t: cutoff_mult times the point where
/// the decay bound puts the tail below tail_tol.
double afe_length(const GL3Form& form, double t, double cutoff_mult = 1.0,
                  double tail_tol = 1e-8, double U = 6.0);

/// |L(1/2 + it)|^2 by the approximate functional equation over
/// n1 n2^2 <= afe_length(...). Throws DataRangeError if the provider does not
/// cover that range.
AfeValue L_abs_sq(const GL3Form& form, double t, double cutoff_mult = 1.0,
                  double tail_tol = 1e-8, double U = 6.0);
/// Same, over a precomputed term list truncated at min(terms.Y, Y_limit).
AfeValue L_abs_sq(const AfeTerms& terms, const GL3Form& form, double t, double U = 6.0,
                  double Y_limit = std::numeric_limits<double>::infinity());

/// L(1/2, phi x f_j) by the approximate functional equation.
AfeValue L_rankin_central(const GL3Form& form, const GL2SpectralDatum& datum,
                          double cutoff_mult = 1.0, double tail_tol = 1e-8, double U = 6.0);

struct DualSum {
  cplx lhs, rhs;
  /// Residue at s = 1/2 + it of w~(s) N^s L(1/2 - it + s) (divisor3 only):
  /// lhs = rhs + polar.
  cplx polar;
  double budget = 0.0;
  std::size_t lhs_terms = 0, rhs_terms = 0;
};

/// Both sides of sum A(1,n) n^{-1/2+it} w(n/N) = sum A(1,n) n^{-1/2-it} W(nN; t).
DualSum fe_dual_sum(const GL3Form& form, double t, const WindowFunction& w, double N);

}  // namespace gl3lab
