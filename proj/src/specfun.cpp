#include "gl3lab/specfun.hpp"

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace gl3lab {

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("QuadratureSpec: tolerances must be > 0");
  if (max_nodes < 16) throw DomainError("QuadratureSpec: max_nodes must be >= 16");
}

const GaussRule& gauss_legendre_rule(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (slot) return *slot;
  auto rule = std::make_unique<GaussRule>();
  rule->x.resize(n);
  rule->w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule->x[i] = -x;
    rule->x[n - 1 - i] = x;
    rule->w[i] = rule->w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  slot = std::move(rule);
  return *slot;
}

// ---------------------------------------------------------------------------
// log Gamma

namespace {

constexpr std::array<double, 12> kBernoulli2k = {
    1.0 / 6.0,           -1.0 / 30.0,           1.0 / 42.0,        -1.0 / 30.0,
    5.0 / 66.0,          -691.0 / 2730.0,       7.0 / 6.0,         -3617.0 / 510.0,
    43867.0 / 798.0,     -174611.0 / 330.0,     854513.0 / 138.0,  -236364091.0 / 2730.0};

cplx stirling(cplx w) {
  const cplx inv = 1.0 / w;
  const cplx inv2 = inv * inv;
  cplx series = 0.0;
  cplx pw = inv;
  for (std::size_t k = 1; k <= kBernoulli2k.size(); ++k) {
    series += kBernoulli2k[k - 1] / (2.0 * k * (2.0 * k - 1.0)) * pw;
    pw *= inv2;
  }
  return (w - 0.5) * std::log(w) - w + 0.5 * std::log(kTwoPi) + series;
}

}  // namespace

cplx log_gamma(cplx z) {
  if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
    throw PoleError("log_gamma: pole at non-positive integer " + std::to_string(z.real()));
  }
  const double floor_re = std::abs(z.imag()) >= 15.0 ? 0.0 : 15.0;
  cplx shift = 0.0;
  while (z.real() < floor_re) {
    shift += std::log(z);
    z += 1.0;
  }
  return stirling(z) - shift;
}

// ---------------------------------------------------------------------------
// zeta

namespace {

struct Kahan {
  cplx sum = 0.0;
  cplx comp = 0.0;
  void add(cplx v) {
    const cplx y = v - comp;
    const cplx t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// B_{2k} / (2k)! = (-1)^{k+1} 2 zeta(2k) / (2 pi)^{2k}.
double bernoulli_over_factorial(int k) {
  const double pi2 = kPi * kPi;
  double z2k = 0.0;
  if (k == 1) {
    z2k = pi2 / 6.0;
  } else if (k == 2) {
    z2k = pi2 * pi2 / 90.0;
  } else if (k == 3) {
    z2k = pi2 * pi2 * pi2 / 945.0;
  } else {
    // Midpoint tail correction; the remainder is below 1e-16 for k >= 4.
    z2k = std::pow(60.5, 1.0 - 2.0 * k) / (2.0 * k - 1.0);
    for (int n = 60; n >= 1; --n) z2k += std::pow(static_cast<double>(n), -2.0 * k);
  }
  const double v = 2.0 * z2k / std::pow(kTwoPi, 2.0 * k);
  return (k % 2 == 1) ? v : -v;
}

}  // namespace

cplx hurwitz_zeta(cplx s, double a) {
  if (!(a > 0.0)) throw DomainError("hurwitz_zeta: a must be positive");
  if (s == cplx(1.0, 0.0)) throw PoleError("zeta: pole at s = 1");
  constexpr int kTerms = 30;
  static const std::array<double, kTerms + 1> coeff = [] {
    std::array<double, kTerms + 1> c{};
    for (int k = 1; k <= kTerms; ++k) c[k] = bernoulli_over_factorial(k);
    return c;
  }();
  const int N = static_cast<int>(std::ceil((std::abs(s) + 2.0 * kTerms) / kPi)) + 5;
  Kahan head;
  for (int n = 0; n < N; ++n) head.add(std::exp(-s * std::log(n + a)));
  const double x = N + a;
  const cplx x_pow = std::exp(-s * std::log(x));  // x^{-s}
  head.add(x_pow * x / (s - 1.0));
  head.add(0.5 * x_pow);
  cplx poch = s;
  cplx power = x_pow / x;  // x^{-s-1}
  for (int k = 1; k <= kTerms; ++k) {
    if (k > 1) {
      poch *= (s + (2.0 * k - 3.0)) * (s + (2.0 * k - 2.0));
      power /= x * x;
    }
    const cplx term = coeff[k] * poch * power;
    head.add(term);
    if (std::abs(term) < 1e-18 * std::abs(head.sum)) break;
  }
  return head.sum;
}

cplx zeta(cplx s) { return hurwitz_zeta(s, 1.0); }

// ---------------------------------------------------------------------------
// Bessel functions of imaginary order

namespace {

double log_cosh_pi(double t) {
  const double a = kPi * std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

// log of the largest |term| / |first term| of the power series.
double series_growth(double t, double x) {
  const double q = 0.25 * x * x;
  double acc = 0.0, best = 0.0;
  for (int k = 1; k < 100000; ++k) {
    const double ratio = q / (k * std::hypot(static_cast<double>(k), 2.0 * t));
    if (ratio < 1.0) break;
    acc += std::log(ratio);
    best = std::max(best, acc);
  }
  return best;
}

// J_{2it}(x) * exp(-log_scale) by the power series.
cplx j_series(double t, double x, double log_scale) {
  const cplx nu(0.0, 2.0 * t);
  const cplx log_pref = nu * std::log(0.5 * x) - log_gamma(nu + 1.0) - log_scale;
  const double q = 0.25 * x * x;
  Kahan sum;
  cplx term = 1.0;
  sum.add(term);
  for (int k = 1; k < 100000; ++k) {
    term *= -q / (static_cast<double>(k) * (nu + static_cast<double>(k)));
    sum.add(term);
    if (std::abs(term) < 1e-18 * std::abs(sum.sum) && k > x) break;
  }
  return std::exp(log_pref) * sum.sum;
}

// I(t, x) = int_0^inf exp(i x cosh v) cos(2 t v) dv on the path 0 -> i b -> i b + inf.
cplx cosh_phase_integral(double t, double x) {
  const double at = std::abs(t);
  const double beta = std::min(1.2, at > 0 ? 3.0 / at : 1.2);
  QuadratureSpec spec;
  spec.rel_tol = 1e-14;
  spec.abs_tol = 1e-16 * std::cosh(2.0 * t * beta);  // integrand size on the path
  spec.max_nodes = 20'000'000;

  auto vertical = [&](double b) {
    return kI * std::exp(kI * (x * std::cos(b))) * std::cosh(2.0 * t * b);
  };
  const double v_phase = x * (1.0 - std::cos(beta)) + 1.0;
  spec.method = QuadMethod::oscillatory_segmented;
  spec.segments = static_cast<int>(std::ceil(v_phase / kPi));
  QuadResult part1 = integrate(vertical, 0.0, beta, spec);

  const double sb = std::sin(beta), cb = std::cos(beta);
  const double A = std::asinh(45.0 / (x * sb));
  auto horizontal = [&](double a) {
    const cplx v(a, beta);
    return std::exp(kI * x * std::cosh(v)) * std::cos(2.0 * t * v);
  };
  const double h_phase = x * (std::cosh(A) * cb - cb) + 2.0 * at * A + 1.0;
  spec.segments = static_cast<int>(std::ceil(h_phase / kPi));
  QuadResult part2 = integrate(horizontal, 0.0, A, spec);
  (void)sb;
  return part1.value + part2.value;
}

void check_bessel_args(double t, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("Bessel: x must be positive and finite");
  if (!std::isfinite(t)) throw DomainError("Bessel: t must be finite");
  if (x * (std::abs(t) + 1.0) > 1e8) throw DomainError("Bessel: x*|t| beyond supported range");
}

}  // namespace

namespace detail {

cplx j_scaled_by_series(double t, double x) { return j_series(t, x, log_cosh_pi(t)); }

cplx j_scaled_by_integral(double t, double x) {
  const cplx I = cosh_phase_integral(t, x);
  const double up = 2.0 / (1.0 + std::exp(-2.0 * kPi * t));   // e^{pi t} / cosh(pi t)
  const double down = 2.0 / (1.0 + std::exp(2.0 * kPi * t));  // e^{-pi t} / cosh(pi t)
  return (up * I - down * std::conj(I)) / (kI * kPi);
}

}  // namespace detail

cplx bessel_j_imag_order_scaled(double t, double x) {
  check_bessel_args(t, x);
  if (series_growth(t, x) <= std::log(1e4)) return detail::j_scaled_by_series(t, x);
  return detail::j_scaled_by_integral(t, x);
}

cplx bessel_j_imag_order(double t, double x) {
  check_bessel_args(t, x);
  if (kPi * std::abs(t) > 700.0) throw DomainError("bessel_j_imag_order: cosh(pi t) overflows");
  if (series_growth(t, x) <= std::log(1e4)) return j_series(t, x, 0.0);
  return bessel_j_imag_order_scaled(t, x) * std::cosh(kPi * t);
}

double bessel_k_imag_order_scaled(double t, double x) {
  check_bessel_args(t, x);
  const double at = std::abs(t);
  // |K_{2it}(x)| <= K_0(x) <= sqrt(pi / 2x) e^{-x}.
  if (kPi * at - x + 0.5 * std::log(kPi / (2.0 * x)) < -745.0) return 0.0;
  // Shift the line of integration towards the saddle of -x cosh w - 2 i t w.
  const double saddle = std::asin(std::min(1.0, 2.0 * at / x));
  double delta = 0.5 * kPi - saddle;
  if (at > 0.0) delta = std::max(delta, std::min(0.5 * kPi, 1.5 / at));
  const cplx beta(0.0, -(0.5 * kPi - delta));
  const double sd = std::sin(delta);
  auto integrand = [&](double a) {
    return std::exp(-x * std::cosh(cplx(a, 0.0) + beta) - cplx(0.0, 2.0 * at * a) +
                    x * sd);
  };
  const double A = std::acosh(1.0 + 45.0 / (x * sd));
  QuadratureSpec spec;
  spec.method = QuadMethod::oscillatory_segmented;
  spec.rel_tol = 1e-14;
  spec.abs_tol = 1e-16;  // the integrand is bounded by 1
  spec.max_nodes = 20'000'000;
  const double phase = x * std::sinh(A) * std::cos(delta) + 2.0 * at * A + 1.0;
  spec.segments = static_cast<int>(std::ceil(phase / kPi));
  const QuadResult r = integrate(integrand, 0.0, A, spec);
  // integrand carries exp(x sin delta); undo it together with exp(2|t| delta).
  return std::exp(2.0 * at * delta - x * sd) * r.value.real();
}

bool bessel_k_underflows(double t, double x) {
  (void)t;
  return x > 700.0;
}

double bessel_k_imag_order(double t, double x) {
  check_bessel_args(t, x);
  if (bessel_k_underflows(t, x)) return 0.0;
  return bessel_k_imag_order_scaled(t, x) * std::exp(-kPi * std::abs(t));
}

// ---------------------------------------------------------------------------
// Mellin-Barnes

void ContourSpec::validate() const {
  if (!(height_cut > 0.0)) throw DomainError("ContourSpec: height_cut must be > 0");
  if (!(node_density >= 4.0)) throw DomainError("ContourSpec: node_density must be >= 4");
}

double default_height_cut(double T) { return 10.0 * std::log(2.0 + std::abs(T)); }

QuadResult mellin_barnes(const std::function<cplx(cplx)>& F, const ContourSpec& contour,
                         std::span<const cplx> poles) {
  contour.validate();
  const double spacing = 1.0 / contour.node_density;
  for (const cplx& p : poles) {
    if (std::abs(p.real() - contour.real_part) < spacing &&
        std::abs(p.imag()) <= contour.height_cut + spacing) {
      throw PoleError("mellin_barnes: contour passes within one node spacing of a pole");
    }
  }
  const double U = contour.height_cut;
  const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * U)));
  const int order = static_cast<int>(std::ceil(contour.node_density * 2.0 * U / panels));
  auto along = [&](double tau) { return F(cplx(contour.real_part, tau)); };
  const cplx full = composite_gauss(along, -U, U, panels, std::max(order, 4));
  const cplx half = composite_gauss(along, -U, U, panels, std::max(order / 2, 3));
  const double tail =
      (std::abs(along(U)) + std::abs(along(-U))) * U;
  QuadResult out;
  out.value = full / kTwoPi;
  out.err = (std::abs(full - half) + tail) / kTwoPi;
  out.nodes = static_cast<long>(panels) * (order + order / 2);
  return out;
}

}  // namespace gl3lab
