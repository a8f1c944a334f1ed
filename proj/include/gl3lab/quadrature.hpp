#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "gl3lab/errors.hpp"

namespace gl3lab {

using cplx = std::complex<double>;

enum class QuadMethod { gauss_legendre, double_exponential, oscillatory_segmented };

struct QuadratureSpec {
  QuadMethod method = QuadMethod::gauss_legendre;
  double rel_tol = 1e-12;
  double abs_tol = 1e-15;
  long max_nodes = 4'000'000;
  // oscillatory-segmented only: number of equal segments, 0 picks one per
  // observed half-oscillation of the integrand.
  int segments = 0;

  void validate() const;
};

/// Value plus a nonnegative error estimate.
struct QuadResult {
  cplx value{};
  double err = 0.0;
  long nodes = 0;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Cached; safe to call concurrently.
const GaussRule& gauss_legendre_rule(int n);

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (positive half).
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  cplx value;
  double err;
  double abs_value;  // integral of |f| by the Kronrod rule
  bool operator<(const Panel& o) const { return err < o.err; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const cplx fc = cplx(f(c));
  cplx k = fc * kWgk[7];
  cplx g = fc * kWg[3];
  double asum = std::abs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const cplx f1 = cplx(f(c - dx));
    const cplx f2 = cplx(f(c + dx));
    k += (f1 + f2) * kWgk[j];
    asum += (std::abs(f1) + std::abs(f2)) * kWgk[j];
    if (j % 2 == 1) g += (f1 + f2) * kWg[j / 2];
  }
  return {a, b, k * h, std::abs((k - g) * h), asum * std::abs(h)};
}

template <class F>
QuadResult adaptive_gk(F& f, double a, double b, double rel_tol, double abs_tol, long max_nodes) {
  if (a == b) return {};
  std::priority_queue<Panel> heap;
  heap.push(gk15(f, a, b));
  long nodes = 15;
  cplx total = heap.top().value;
  double err = heap.top().err;
  double abs_sum = heap.top().abs_value;
  // Local differences below this are roundoff, not discretisation error.
  auto floor = [&] { return 50.0 * std::numeric_limits<double>::epsilon() * abs_sum; };
  auto done = [&] { return err <= std::max({abs_tol, rel_tol * std::abs(total), floor()}); };
  while (!done()) {
    if (nodes + 30 > max_nodes) {
      throw ConvergenceError("adaptive quadrature did not converge within " +
                             std::to_string(max_nodes) + " nodes (estimate " +
                             std::to_string(err) + ")");
    }
    Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    Panel l = gk15(f, p.a, m);
    Panel r = gk15(f, m, p.b);
    nodes += 30;
    total += l.value + r.value - p.value;
    err += l.err + r.err - p.err;
    abs_sum += l.abs_value + r.abs_value - p.abs_value;
    heap.push(l);
    heap.push(r);
    if (heap.size() % 256 == 0 || done()) {
      // Re-sum to remove drift from the incremental updates.
      err = 0.0;
      total = 0.0;
      auto copy = heap;
      while (!copy.empty()) {
        total += copy.top().value;
        err += copy.top().err;
        copy.pop();
      }
    }
  }
  // Roundoff floor.
  err += floor();
  return {total, err, nodes};
}

template <class F>
QuadResult tanh_sinh(F& f, double a, double b, double rel_tol, double abs_tol, long max_nodes) {
  constexpr double kPiHalf = 1.5707963267948966;
  const double hw = 0.5 * (b - a);
  auto term = [&](double t) -> cplx {
    const double s = kPiHalf * std::sinh(t);
    const double ch = std::cosh(s);
    const double x = std::tanh(s);
    const double w = kPiHalf * std::cosh(t) / (ch * ch);
    // Distance from the nearer endpoint, computed without cancellation.
    const double d = hw / (std::exp(std::abs(s)) * ch);
    const double pt = x >= 0 ? b - d : a + d;
    if (d <= 0.0 || w < 1e-300) return 0.0;
    return cplx(f(pt)) * w;
  };
  const double tmax = 4.5;
  double h = 0.5;
  cplx sum = term(0.0);
  long nodes = 1;
  for (double t = h; t <= tmax; t += h) {
    sum += term(t) + term(-t);
    nodes += 2;
  }
  cplx prev = sum * h * hw;
  double err = std::numeric_limits<double>::infinity();
  for (int level = 0; level < 12; ++level) {
    h *= 0.5;
    cplx add = 0.0;
    for (double t = h; t <= tmax; t += 2 * h) {
      add += term(t) + term(-t);
      nodes += 2;
    }
    sum += add;
    const cplx cur = sum * h * hw;
    err = std::abs(cur - prev);
    prev = cur;
    if (level >= 2 && err <= std::max(abs_tol, rel_tol * std::abs(cur))) {
      return {cur, err + 1e-15 * std::abs(cur), nodes};
    }
    if (nodes > max_nodes) break;
  }
  throw ConvergenceError("double-exponential quadrature did not converge (estimate " +
                         std::to_string(err) + ")");
}

}  // namespace detail

/// Integrates f over [a, b]. f may return double or complex.
///
/// The reported err is the sum of local Kronrod-Gauss differences plus a
/// roundoff floor; non-convergence throws ConvergenceError.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(std::isfinite(a) && std::isfinite(b))) throw DomainError("integrate: infinite limits");
  switch (spec.method) {
    case QuadMethod::gauss_legendre:
      return detail::adaptive_gk(f, a, b, spec.rel_tol, spec.abs_tol, spec.max_nodes);
    case QuadMethod::double_exponential:
      return detail::tanh_sinh(f, a, b, spec.rel_tol, spec.abs_tol, spec.max_nodes);
    case QuadMethod::oscillatory_segmented: {
      int segments = spec.segments;
      if (segments <= 0) {
        // One segment per sign change of Re f and Im f on a probe grid.
        constexpr int kProbe = 2048;
        int changes = 0;
        cplx prev = cplx(f(a));
        for (int i = 1; i <= kProbe; ++i) {
          const cplx cur = cplx(f(a + (b - a) * i / kProbe));
          if ((cur.real() > 0) != (prev.real() > 0)) ++changes;
          if ((cur.imag() > 0) != (prev.imag() > 0)) ++changes;
          prev = cur;
        }
        segments = std::max(1, changes / 2);
      }
      QuadResult out;
      const double width = (b - a) / segments;
      for (int i = 0; i < segments; ++i) {
        const double lo = a + i * width;
        const double hi = (i + 1 == segments) ? b : lo + width;
        QuadResult part = detail::adaptive_gk(f, lo, hi, spec.rel_tol, spec.abs_tol / segments,
                                              spec.max_nodes);
        out.value += part.value;
        out.err += part.err;
        out.nodes += part.nodes;
      }
      return out;
    }
  }
  return {};
}

/// Fixed composite Gauss-Legendre rule: `panels` equal panels of `order` nodes.
template <class F>
cplx composite_gauss(F&& f, double a, double b, int panels, int order) {
  const GaussRule& rule = gauss_legendre_rule(order);
  const double width = (b - a) / panels;
  cplx sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * width;
    cplx part = 0.0;
    for (int i = 0; i < order; ++i) part += cplx(f(c + 0.5 * width * rule.x[i])) * rule.w[i];
    sum += part;
  }
  return sum * (0.5 * width);
}

}  // namespace gl3lab
