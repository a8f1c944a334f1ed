#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gl3lab/forms.hpp"
#include "gl3lab/specfun.hpp"
#include "gl3lab/window.hpp"

namespace gl3lab {

/// S(m, n; c) = sum over x mod c coprime to c of e((m x + n xbar)/c).
/// The imaginary part (zero up to rounding) is stored in *imag when given.
double kloosterman(long long m, long long n, u64 c, double* imag = nullptr);

/// (1/pi) int k(t) tanh(pi t) t dt.
double h_const(const SpectralWindow& k);

/// The Kuznetsov kernels with k(t) G(u, t) as test function:
///   H+(x) = i int h(t) J_{2it}(x) / cosh(pi t) t dt,
///   H-(x) = (2/pi) int h(t) K_{2it}(x) sinh(pi t) t dt,   h = k G(u, .).
///
/// For T >= 4M both are evaluated through
///   H+(x) = (2/pi) int_0^inf cos(x cosh xi) h^(xi) d xi,
///   H-(x) = (2/pi) int_0^inf cos(x sinh xi) h^(xi) d xi,
/// h^(xi) = int h(t) t tanh(pi t) cos(2 t xi) dt, which follow from the
/// Mehler-Sonine integrals for J_{2it} - J_{-2it} and K_{2it}; h^ decays like
/// exp(-M^2 xi^2) and is tabulated once. Narrow windows fall back to direct
/// t-quadrature over J and K.
///
/// For x <= 4 and windows ending below t = 60, the power series of J and I
/// give instead
///   H+-(x) = i int h(t) t / cosh(pi t) sum_k (-+x^2/4)^k (x/2)^{2it} / (k! Gamma(k + 1 + 2it)) dt
/// on fixed nodes, using K_{2it} = pi (I_{-2it} - I_{2it}) / (2i sinh 2 pi t).
class BesselTransform {
 public:
  BesselTransform(const SpectralWindow& k, cplx u = 0.0, const GL3Form& form = GL3Form{});

  cplx plus(double x) const;
  cplx minus(double x) const;
  cplx operator()(int sign, double x) const { return sign > 0 ? plus(x) : minus(x); }

  /// Direct t-quadrature, independent of the xi route.
  cplx plus_direct(double x) const;
  cplx minus_direct(double x) const;

  const SpectralWindow& window() const { return k_; }
  cplx u() const { return u_; }
  /// Frequency bound of H^{sign}(4 pi D sqrt(x)) in log x, x in [1, 2].
  double log_bandwidth(double D) const;

 private:
  struct XiNodes;

  cplx h(double t) const;
  cplx hhat(double xi) const;
  bool xi_route(double x) const;
  template <class Kernel>
  cplx xi_integral(double x, double phase, Kernel kernel) const;
  bool series_route(double x) const;
  cplx series(int sign, double x) const;

  SpectralWindow k_;
  cplx u_;
  GL3Form form_;
  double t_lo_ = 0.0, t_hi_ = 0.0, xi_max_ = 0.0;
  std::vector<cplx> hhat_c_;  // Chebyshev coefficients of h^ on [0, xi_max]
  std::shared_ptr<XiNodes> nodes_;
  std::vector<double> series_t_;
  std::vector<cplx> series_w_;  // weight * h(t) t
  std::vector<cplx> series_c_;  // 1/(k! Gamma(k + 1 + 2it) cosh(pi t)), k-major per node
};

cplx h_plus(double x, const SpectralWindow& k, cplx u, const GL3Form& form);
cplx h_minus(double x, const SpectralWindow& k, cplx u, const GL3Form& form);

// ---------------------------------------------------------------------------
// Hankel transforms

/// A function supported in [a, b] within (0, inf) whose Mellin transform on
/// Re s = 1/2 is negligible beyond |Im s| = bandwidth.
struct BandLimited {
  std::function<cplx(double)> f;
  double a = 1.0, b = 2.0;
  double bandwidth = 400.0;
};

/// W(y) = int f(x) J_phi(x y) dx = (1/2 pi i) int G^{sgn y}(s) f~(s) |y|^{s-1} ds,
/// for all y at once.
///
/// The line is Re s = 1/2, where |G^+-| <= 2; moving it from Re s = -3 crosses
/// no poles (G is regular for Re s < 1). f~ comes from one FFT of the samples
/// of f in log x, after which every y costs one sum over the tau-grid.
class HankelPlan {
 public:
  HankelPlan(const BandLimited& f, const GL3Form& form);
  cplx operator()(double y) const;
  std::size_t nodes() const { return plus_.size(); }

 private:
  double h_ = 0.0, tau0_ = 0.0;
  std::vector<cplx> plus_, minus_;  // G^{+-} f~ h / (2 pi) on tau0 + k h
};

/// Hankel transform of w(x) x^{-u}.
cplx hankel_mb(double y, const WindowFunction& w, cplx u, const GL3Form& form);

/// J_phi(+-x) ~ e(+-3 x^{1/3}) x^{-1/3} sum_k B^{+-}_k x^{-k/3}.
struct BesselKernelExpansion {
  int K_terms = 0;
  std::vector<cplx> B_plus, B_minus;
  double fit_residual = 0.0;

  void validate() const;
};

/// int f(x) J_phi(x y) dx with J_phi replaced by its expansion; |y| >= 1e3.
cplx hankel_asym(double y, const BandLimited& f, const BesselKernelExpansion& e);
cplx hankel_asym(double y, const WindowFunction& w, cplx u, const BesselKernelExpansion& e);

/// Probe b(x) e(-+3 (x |y|)^{1/3}) for y of sign +-: it cancels the phase of
/// J_phi(x y), so its transform isolates sum_k B_k |y|^{-(k+1)/3} int b x^{-(k+1)/3}.
BandLimited kernel_probe(double y, const WindowFunction& b = WindowFunction());

/// Least-squares fit of B^{+-}_0..B^{+-}_{K-1} against hankel_mb on probes at
/// 40 log-spaced |y| in [1e4, 1e8]. Throws ConvergenceError when the relative
/// fit residual exceeds 1e-3.
BesselKernelExpansion calibrate_kernel(const GL3Form& form, int K);

// ---------------------------------------------------------------------------
// The twisted transform

/// W~(y; D) = e(+-y/D^2) W(y; D), W the Hankel transform of
/// w+-(x; D) = w(x) x^{-u} H^{+-}(4 pi D sqrt(x)).
class TwistedHankel {
 public:
  TwistedHankel(int sign, double D, const BesselTransform& H, const WindowFunction& w,
                const GL3Form& form);
  cplx W(double y) const { return plan_(y); }
  cplx tilde(double y) const { return e_of(sign_ * y / (D_ * D_)) * plan_(y); }
  /// w+-(x; D) itself.
  cplx weight(double x) const;
  double D() const { return D_; }

 private:
  int sign_;
  double D_;
  BesselTransform H_;
  WindowFunction w_;
  HankelPlan plan_;
};

cplx w_tilde(double y, double D, int sign, const SpectralWindow& k, const WindowFunction& w,
             cplx u, const GL3Form& form);

/// Support constants for "asymp" and the "D >> T" threshold.
inline constexpr double kAsympLo = 0.25, kAsympHi = 4.0, kDggT = 8.0, kSupportEps = 0.02;

struct StationaryPhaseProfile {
  double X = 0.0;  // y / D^2 scale
  double D = 0.0;
  double T = 0.0, M = 0.0;
};

struct SupportVerdict {
  bool in_support = false;
  double U_window = 0.0;  // U+ = T^2/|X| or U- = |X|^{1/3} T^{2/3}
  bool sandwich = false;  // T^eps < U < T / M^{1-eps}
  std::string reason;
};

/// Throws DomainError unless |X| < T^{2-eps}.
SupportVerdict support_check(const StationaryPhaseProfile& p, int sign);

}  // namespace gl3lab
