#include <doctest.h>

#include <cmath>

#include "gl3lab/errors.hpp"
#include "gl3lab/specfun.hpp"
#include "gl3lab/window.hpp"

using namespace gl3lab;

TEST_CASE("bump support and shape") {
  const WindowFunction w;
  CHECK(w(1.0) == 0.0);
  CHECK(w(2.0) == 0.0);
  CHECK(w(0.5) == 0.0);
  CHECK(w(2.5) == 0.0);
  CHECK(w(1.5) == doctest::Approx(1.0));
  CHECK(w(1.05) > 0.0);
  CHECK(w(1.3) == doctest::Approx(w(1.7)).epsilon(1e-14));
  CHECK(WindowFunction::zero()(1.5) == 0.0);
  CHECK_THROWS_AS(WindowFunction(0.5, 2.0), DomainError);
  CHECK_THROWS_AS(WindowFunction(1.5, 1.2), DomainError);
}

TEST_CASE("bump derivatives against finite differences") {
  const WindowFunction w(1.1, 1.8, 2.0);
  for (double x : {1.15, 1.3, 1.45, 1.62, 1.77}) {
    const auto d = w.derivatives(x);
    CHECK(d[0] == doctest::Approx(w(x)).epsilon(1e-14));
    // Each derivative against a central difference of the one below it.
    const double h = 1e-5;
    for (int k = 1; k < 5; ++k) {
      const double fd = (w.derivatives(x + h)[k - 1] - w.derivatives(x - h)[k - 1]) / (2.0 * h);
      CAPTURE(k);
      CAPTURE(x);
      CHECK(d[k] == doctest::Approx(fd).epsilon(1e-5).scale(std::abs(d[k - 1]) + 1.0));
    }
  }
  const auto bounds = WindowFunction().derivative_bounds();
  CHECK(bounds[0] == doctest::Approx(1.0).epsilon(1e-6));
  for (double b : bounds) CHECK(std::isfinite(b));
}

TEST_CASE("Mellin transform against adaptive quadrature") {
  const WindowFunction w;
  QuadratureSpec spec;
  spec.rel_tol = 1e-13;
  spec.abs_tol = 1e-16;
  for (cplx s : {cplx(1.0, 0.0), cplx(0.5, 3.0), cplx(-3.0, 40.0), cplx(0.01, -120.0),
                 cplx(2.0, 400.0)}) {
    const cplx direct =
        integrate([&](double x) { return w(x) * std::exp((s - 1.0) * std::log(x)); }, 1.0, 2.0, spec)
            .value;
    CAPTURE(s);
    CHECK(std::abs(w.mellin(s) - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
  }
  CHECK(WindowFunction::zero().mellin(cplx(0.5, 2.0)) == cplx(0.0));
  // Conjugate symmetry of a real window.
  CHECK(std::abs(w.mellin(cplx(0.3, -7.0)) - std::conj(w.mellin(cplx(0.3, 7.0)))) < 1e-14);
}

TEST_CASE("Mellin inversion recovers the window") {
  const WindowFunction w;
  ContourSpec c;
  c.real_part = 0.0;
  c.height_cut = 500.0;
  const MellinTable table([&](double x) { return cplx(w(x)); }, 1.0, 2.0, c.height_cut);
  for (double y : {1.1, 1.35, 1.5, 1.9}) {
    const QuadResult r =
        mellin_barnes([&](cplx s) { return table(s) * std::exp(-s * std::log(y)); }, c);
    CAPTURE(y);
    CHECK(std::abs(r.value - w(y)) < 1e-8);
  }
}

TEST_CASE("MellinTable agrees with direct transform") {
  const WindowFunction w(1.2, 1.9);
  auto f = [&](double x) { return w(x) * std::polar(1.0, 30.0 * std::sqrt(x)); };
  const MellinTable table(f, 1.2, 1.9, 100.0, 30.0);
  for (cplx s : {cplx(0.0, 0.0), cplx(-3.0, 55.0), cplx(0.5, -99.0)}) {
    CHECK(std::abs(table(s) - mellin_on(f, 1.2, 1.9, s)) < 1e-12);
  }
  CHECK_THROWS_AS(table(cplx(0.0, 150.0)), DomainError);
}

TEST_CASE("spectral window") {
  const SpectralWindow k{100.0, 10.0};
  CHECK(k(100.0) == doctest::Approx(1.0));
  CHECK(k(-100.0) == doctest::Approx(1.0));
  CHECK(k(0.0) == doctest::Approx(2.0 * std::exp(-100.0)));
  CHECK(k.admissible(0.02));
  CHECK_FALSE((SpectralWindow{100.0, 1.0}).admissible(0.02));
  CHECK_FALSE((SpectralWindow{100.0, 99.0}).admissible(0.02));
  CHECK(k.t_max() == 200.0);
  CHECK(k.t_min() == 0.0);
  CHECK_THROWS_AS((SpectralWindow{-1.0, 1.0}).validate(), DomainError);
  CHECK((SpectralWindow{10.0, 2.0, 0.0})(10.0) == 0.0);
}
