#include "gl3lab/window.hpp"

#include <algorithm>

#include "gl3lab/errors.hpp"
#include "gl3lab/specfun.hpp"

namespace gl3lab {

namespace {

constexpr int kOrder = 20;

int panels_for(double frequency, double log_span) {
  return 12 + static_cast<int>(std::ceil(std::abs(frequency) * log_span / 2.0));
}

}  // namespace

WindowFunction::WindowFunction(double a, double b, double amplitude, double sharpness)
    : a_(a), b_(b), amplitude_(amplitude), sharpness_(sharpness) {
  if (!(sharpness > 0.0)) throw DomainError("WindowFunction: sharpness must be positive");
  if (!(1.0 <= a && a < b && b <= 2.0)) throw DomainError("WindowFunction: need 1 <= a < b <= 2");
  if (!std::isfinite(amplitude)) throw DomainError("WindowFunction: amplitude must be finite");
}

double WindowFunction::operator()(double x) const {
  if (!(x > a_ && x < b_) || amplitude_ == 0.0) return 0.0;
  const double v = (2.0 * x - a_ - b_) / (b_ - a_);
  return amplitude_ * std::exp(-sharpness_ * v * v / (1.0 - v * v));
}

std::array<double, 5> WindowFunction::derivatives(double x) const {
  std::array<double, 5> out{};
  if (!(x > a_ && x < b_) || amplitude_ == 0.0) return out;
  const double c = 2.0 / (b_ - a_);
  const double v0 = (2.0 * x - a_ - b_) / (b_ - a_);
  // Taylor coefficients in v: q = 1 - v^2, r = 1/q, g = c (1 - r), e = exp(g).
  const double q[5] = {1.0 - v0 * v0, -2.0 * v0, -1.0, 0.0, 0.0};
  double r[5], g[5], e[5];
  r[0] = 1.0 / q[0];
  for (int k = 1; k < 5; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += q[j] * r[k - j];
    r[k] = -s / q[0];
  }
  g[0] = sharpness_ * (1.0 - r[0]);
  for (int k = 1; k < 5; ++k) g[k] = -sharpness_ * r[k];
  e[0] = std::exp(g[0]);
  for (int k = 1; k < 5; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * g[j] * e[k - j];
    e[k] = s / k;
  }
  double fact = 1.0, ck = 1.0;
  for (int k = 0; k < 5; ++k) {
    if (k > 0) {
      fact *= k;
      ck *= c;
    }
    out[k] = amplitude_ * fact * ck * e[k];
  }
  return out;
}

cplx WindowFunction::mellin(cplx s) const {
  if (amplitude_ == 0.0) return 0.0;
  return mellin_on([this](double x) { return cplx((*this)(x)); }, a_, b_, s);
}

std::array<double, 5> WindowFunction::derivative_bounds() const {
  std::array<double, 5> out{};
  constexpr int kGrid = 4000;
  for (int i = 1; i < kGrid; ++i) {
    const auto d = derivatives(a_ + (b_ - a_) * i / kGrid);
    for (int k = 0; k < 5; ++k) out[k] = std::max(out[k], std::abs(d[k]));
  }
  return out;
}

cplx mellin_on(const std::function<cplx(double)>& f, double a, double b, cplx s) {
  const double la = std::log(a), lb = std::log(b);
  const int panels = panels_for(s.imag(), lb - la);
  const GaussRule& rule = gauss_legendre_rule(kOrder);
  // Integrate in log x so x^{s-1} dx = exp(s log x) d(log x) is a pure exponential.
  const double width = (lb - la) / panels;
  cplx sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = la + (p + 0.5) * width;
    for (int i = 0; i < kOrder; ++i) {
      const double lx = c + 0.5 * width * rule.x[i];
      sum += rule.w[i] * f(std::exp(lx)) * std::exp(s * lx);
    }
  }
  return sum * (0.5 * width);
}

MellinTable::MellinTable(const std::function<cplx(double)>& f, double a, double b,
                         double max_height, double own_frequency)
    : max_height_(max_height) {
  const double la = std::log(a), lb = std::log(b);
  const int panels = panels_for(max_height + own_frequency, lb - la);
  const GaussRule& rule = gauss_legendre_rule(kOrder);
  const double width = (lb - la) / panels;
  log_x_.reserve(panels * kOrder);
  weighted_.reserve(panels * kOrder);
  for (int p = 0; p < panels; ++p) {
    const double c = la + (p + 0.5) * width;
    for (int i = 0; i < kOrder; ++i) {
      const double lx = c + 0.5 * width * rule.x[i];
      const cplx v = f(std::exp(lx));
      if (v == cplx(0.0)) continue;
      log_x_.push_back(lx);
      weighted_.push_back(0.5 * width * rule.w[i] * v);
    }
  }
}

cplx MellinTable::operator()(cplx s) const {
  if (std::abs(s.imag()) > max_height_ * (1.0 + 1e-12)) {
    throw DomainError("MellinTable: |Im s| beyond the resolved height");
  }
  cplx sum = 0.0;
  for (std::size_t i = 0; i < log_x_.size(); ++i) sum += weighted_[i] * std::exp(s * log_x_[i]);
  return sum;
}

void SpectralWindow::validate() const {
  if (!(T > 0.0) || !(M > 0.0)) throw DomainError("SpectralWindow: T and M must be positive");
  if (!std::isfinite(amplitude)) throw DomainError("SpectralWindow: amplitude must be finite");
}

bool SpectralWindow::admissible(double eps) const {
  return M >= std::pow(T, eps) && M <= std::pow(T, 1.0 - eps);
}

}  // namespace gl3lab
