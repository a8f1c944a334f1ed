#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "gl3lab/errors.hpp"
#include "gl3lab/gamma_afe.hpp"
#include "gl3lab/transforms.hpp"

using namespace gl3lab;

namespace {

const BesselKernelExpansion& expansion(int K) {
  static const BesselKernelExpansion e3 = calibrate_kernel(GL3Form{}, 3);
  static const BesselKernelExpansion e4 = calibrate_kernel(GL3Form{}, 4);
  static const BesselKernelExpansion e6 = calibrate_kernel(GL3Form{}, 6);
  return K == 3 ? e3 : K == 4 ? e4 : e6;
}

// u = i v puts the stationary point of w(x) x^{-u} J_phi(x y) at x = x0.
cplx stationary_u(double y, double x0) {
  return cplx(0.0, (y > 0 ? 1.0 : -1.0) * kTwoPi * std::cbrt(x0 * std::abs(y)));
}

}  // namespace

TEST_CASE("Kloosterman sums") {
  CHECK(kloosterman(1, 1, 1) == doctest::Approx(1.0));
  CHECK(kloosterman(1, 1, 3) == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(kloosterman(1, 1, 5) == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-13));
  CHECK(kloosterman(3, -7, 10) == doctest::Approx(kloosterman(-7, 3, 10)).epsilon(1e-12));
  for (u64 c = 1; c <= 500; ++c) {
    double im = 0.0;
    const double s = kloosterman(1, 1, c, &im);
    CAPTURE(c);
    CHECK(std::abs(s) <= divisor_count(c) * std::sqrt(static_cast<double>(c)) + 1e-9);
    CHECK(std::abs(im) < 1e-12 * static_cast<double>(c));
  }
  CHECK_THROWS_AS(kloosterman(1, 1, 0), DomainError);
}

TEST_CASE("Kloosterman sums against the defining sum") {
  for (u64 c : {4u, 12u, 36u, 60u, 97u, 128u, 210u, 243u, 1001u}) {
    for (auto [m, n] : {std::pair<long long, long long>{1, 1}, {2, -3}, {6, 4}, {-5, 0}, {0, 0}}) {
      double re = 0.0;
      const long long cc = static_cast<long long>(c);
      for (long long x = 1; x < cc; ++x) {
        if (std::gcd(x, cc) != 1) continue;
        long long xb = 1;
        while (x * xb % cc != 1) ++xb;
        re += std::cos(kTwoPi * static_cast<double>(((m * x + n * xb) % cc + cc) % cc) / cc);
      }
      CAPTURE(c);
      CAPTURE(m);
      CAPTURE(n);
      CHECK(std::abs(kloosterman(m, n, c) - re) < 1e-10);
    }
  }
}

TEST_CASE("h_const") {
  const SpectralWindow k{100.0, 10.0, 1.0};
  double riemann = 0.0;
  const double step = 1e-3;
  for (double t = 0.5 * step; t < 300.0; t += step) riemann += k(t) * std::tanh(kPi * t) * t;
  riemann *= 2.0 * step / kPi;
  CHECK(h_const(k) == doctest::Approx(riemann).epsilon(1e-8));
  CHECK(h_const(SpectralWindow{100.0, 10.0, 0.0}) == 0.0);
  const double ratio = h_const(SpectralWindow{1000.0, 20.0}) / h_const(SpectralWindow{1000.0, 10.0});
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("Kuznetsov transforms: xi route against direct t-quadrature") {
  const SpectralWindow k{100.0, 10.0, 1.0};
  const BesselTransform H(k, cplx(0.5, 1.0), GL3Form{});
  const cplx a = H.plus(1000.0), b = H.plus_direct(1000.0);
  CHECK(std::abs(a) > 1.0);
  CHECK(std::abs(a - b) < 1e-9 * std::abs(a));
  CHECK(std::abs(H.minus(314.0) - H.minus_direct(314.0)) < 1e-9);
  CHECK(h_plus(1.0, SpectralWindow{100.0, 10.0, 0.0}, 0.0, GL3Form{}) == cplx(0.0));
  CHECK_THROWS_AS(H.plus(0.0), DomainError);
}

TEST_CASE("H- decays past 4T") {
  const SpectralWindow k{100.0, 10.0, 1.0};
  const BesselTransform H(k);
  // log |H-(x)| + x/2 never exceeds its value at 4T.
  const double start = std::log(std::abs(H.minus(400.0))) + 200.0;
  CHECK(std::isfinite(start));
  for (double x = 450.0; x <= 4000.0; x *= 1.3) {
    const double v = std::abs(H.minus(x));
    CAPTURE(x);
    CHECK((v == 0.0 || std::log(v) + 0.5 * x <= start));
  }
}

TEST_CASE("H+ is negligible below the D >> T threshold") {
  const SpectralWindow k{100.0, 10.0, 1.0};
  const BesselTransform H(k);
  const double below = std::abs(H.plus(4.0 * kPi * k.T / 4.0));
  const double above = std::abs(H.plus(4.0 * kPi * kDggT * k.T));
  CHECK(above > 1.0);
  CHECK(below < 1e-6 * above);
}

TEST_CASE("Hankel transform: Mellin-Barnes against an independent contour") {
  const GL3Form f;
  const WindowFunction w;
  const MellinTable wt([&](double x) { return cplx(w(x)); }, 1.0, 2.0, 500.0);
  ContourSpec c;
  c.real_part = 0.3;
  c.height_cut = 480.0;
  for (double y : {-50.0, 3.0, 200.0}) {
    const int sg = y > 0 ? 1 : -1;
    const QuadResult r = mellin_barnes(
        [&](cplx s) { return voronoi_G(sg, s, f) * wt(s) * std::exp((s - 1.0) * std::log(std::abs(y))); }, c);
    CAPTURE(y);
    CHECK(std::abs(hankel_mb(y, w, 0.0, f) - r.value) < 1e-9);
  }
  CHECK(hankel_mb(5.0, WindowFunction::zero(), 0.0, f) == cplx(0.0));
  CHECK_THROWS_AS(hankel_mb(0.0, w, 0.0, f), DomainError);
  // Conjugation: W(y; conj u) = conj W(-y; u) for real mu.
  const cplx u(0.3, 7.0);
  CHECK(std::abs(hankel_mb(40.0, w, std::conj(u), f) - std::conj(hankel_mb(-40.0, w, u, f))) < 1e-12);
}

TEST_CASE("Bessel kernel calibration") {
  const BesselKernelExpansion& e = expansion(3);
  CHECK(e.fit_residual < 1e-5);
  const BesselKernelExpansion again = calibrate_kernel(GL3Form{}, 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(again.B_plus[k] - e.B_plus[k]) < 1e-8);
    CHECK(std::abs(again.B_minus[k] - e.B_minus[k]) < 1e-8);
  }
  CHECK(std::abs(std::abs(e.B_plus[0]) - std::abs(e.B_minus[0])) < 1e-8);
  // Leading constant of the GL(3) kernel at mu = 0.
  CHECK(std::abs(e.B_plus[0] - cplx(0.0, 2.0 / std::sqrt(3.0))) < 1e-7);
  CHECK_THROWS_AS(calibrate_kernel(GL3Form{}, 7), DomainError);
  BesselKernelExpansion bad;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("Hankel transform: dual evaluators agree") {
  const GL3Form f;
  const WindowFunction w;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 6; ++i) {
    const double y = (i % 2 ? 1.0 : -1.0) * std::pow(10.0, 4.0 + 3.0 * unif(rng));
    const cplx u = stationary_u(y, 1.15 + 0.7 * unif(rng));
    const cplx mb = hankel_mb(y, w, u, f);
    CAPTURE(y);
    CHECK(std::abs(hankel_asym(y, w, u, expansion(3)) - mb) < 1e-4 * std::abs(mb));
    // Truncation error of the expansion.
    CHECK(std::abs(hankel_asym(y, w, u, expansion(4)) - hankel_asym(y, w, u, expansion(6))) <
          std::pow(std::abs(y), -5.0 / 3.0));
  }
  CHECK(hankel_asym(1e4, WindowFunction::zero(), 0.0, expansion(3)) == cplx(0.0));
  CHECK_THROWS_AS(hankel_asym(500.0, w, 0.0, expansion(3)), DomainError);
}

TEST_CASE("asymptotic evaluator: leading phase against a fine grid") {
  BesselKernelExpansion unit;
  unit.K_terms = 1;
  unit.B_plus = {1.0};
  unit.B_minus = {1.0};
  const WindowFunction w;
  for (double y : {2e4, -3e5}) {
    const cplx u = stationary_u(y, 1.4);
    const double ay = std::abs(y), sg = y > 0 ? 1.0 : -1.0;
    const int n = 400000;
    const double h = 1.0 / n;
    cplx oracle = 0.0;
    for (int j = 0; j < n; ++j) {
      const double x = 1.0 + (j + 0.5) * h;
      const double z = std::cbrt(x * ay);
      oracle += w(x) * std::exp(-u * std::log(x)) * e_of(sg * 3.0 * z) / z;
    }
    oracle *= h;
    CAPTURE(y);
    CHECK(std::abs(hankel_asym(y, w, u, unit) - oracle) < 1e-6 * std::abs(oracle));
  }
}

TEST_CASE("twisted transform") {
  const SpectralWindow k{100.0, 10.0, 1.0};
  const GL3Form f;
  const WindowFunction w;
  const BesselTransform H(k, 0.0, f);
  const double D = 2.0 * k.M * k.T;
  const TwistedHankel tw(1, D, H, w, f);
  // Stationary point x = (X/D)^2 inside the window.
  const double y = 1.2 * D * D * D;
  const double inside = std::abs(tw.tilde(y));
  CHECK(inside * std::sqrt(y) > 1e-3 * k.M * std::pow(k.T, 1.0 + kSupportEps));
  CHECK(std::abs(tw.tilde(y)) == doctest::Approx(std::abs(tw.W(y))));
  CHECK(std::abs(tw.tilde(3.0 * D * D * D)) < 1e-8 * inside);
  CHECK(std::abs(tw.weight(1.5) - w(1.5) * H.plus(4.0 * kPi * D * std::sqrt(1.5))) < 1e-15);
  CHECK(w_tilde(y, D, 1, k, WindowFunction::zero(), 0.0, f) == cplx(0.0));
  CHECK_THROWS_AS(TwistedHankel(1, 0.0, H, w, f), DomainError);
}

TEST_CASE("support verdicts") {
  const double T = 100.0, M = 10.0;
  const double D = 2.0 * M * T;
  const SupportVerdict plus = support_check({D, D, T, M}, 1);
  CHECK(plus.in_support);
  CHECK(plus.U_window == doctest::Approx(T * T / D));
  CHECK(plus.sandwich);
  const SupportVerdict minus = support_check({0.01, T / 10.0, T, M}, -1);
  CHECK_FALSE(minus.in_support);
  CHECK(minus.reason.find("comparable") != std::string::npos);
  CHECK_THROWS_AS(support_check({std::pow(T, 2.0), D, T, M}, 1), DomainError);
  // Core ranges: |X| in [D, 3D/2] with D in [2MT, 5MT] (+), and
  // D in [T/4, T] with |X| up to D/M^3 (-).
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double Dp = 2.0 * M * T * std::pow(2.5, unif(rng));
    const SupportVerdict vp = support_check({Dp * (1.0 + 0.5 * unif(rng)), Dp, T, M}, 1);
    CHECK(vp.in_support);
    CHECK(vp.sandwich);
    const double Dm = T * std::pow(4.0, -unif(rng));
    const double Xm = 2.0 * std::pow(T, 3.0 * kSupportEps - 2.0) * std::pow(Dm / (M * M * M) / (2.0 * std::pow(T, 3.0 * kSupportEps - 2.0)), unif(rng));
    const SupportVerdict vm = support_check({-Xm, Dm, T, M}, -1);
    CHECK(vm.in_support);
    CHECK(vm.sandwich);
  }
  // At the edge of the comparability band the window leaves the sandwich.
  const SupportVerdict edge = support_check({D / 4.0, D, T, M}, 1);
  CHECK(edge.in_support);
  CHECK_FALSE(edge.sandwich);
}
