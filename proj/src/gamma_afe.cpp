#include "gl3lab/gamma_afe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <tuple>
#include <string>

#include "gl3lab/errors.hpp"

namespace gl3lab {

namespace {

constexpr double kLogPi = 1.14472988584940017414342735135305871;
// Stieltjes constants gamma_0, gamma_1.
constexpr double kGamma0 = 0.57721566490153286061;
constexpr double kGamma1 = -0.07281584548367672486;
// Trapezoid steps for the V and W lines.
constexpr double kStepV = 0.1;
constexpr double kStepW = 0.08;

bool at_pole(cplx z) {
  const double k = std::round(z.real());
  return k <= 0.0 && std::abs(z - cplx(k, 0.0)) < 1e-13;
}

// sum_{k=0}^{n-1} c[k] z^k by Horner; |z| = 1 keeps it stable.
cplx horner(const std::vector<cplx>& c, cplx z) {
  cplx acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
  return acc;
}

}  // namespace

cplx log_gamma_factor(cplx s, const GL3Form& form) {
  static const char* names[3] = {"Gamma((s - mu)/2)", "Gamma(s/2)", "Gamma((s + mu)/2)"};
  const cplx shifts[3] = {-form.mu, 0.0, form.mu};
  cplx out = -1.5 * s * kLogPi;
  for (int j = 0; j < 3; ++j) {
    const cplx z = 0.5 * (s + shifts[j]);
    if (at_pole(z)) throw PoleError("gamma factor: " + std::string(names[j]) + " has a pole");
    out += log_gamma(z);
  }
  return out;
}

cplx gamma_factor(cplx s, const GL3Form& form) { return std::exp(log_gamma_factor(s, form)); }

cplx fe_quotient(cplx s, double t, const GL3Form& form) {
  return std::exp(log_gamma_factor(cplx(0.5, t) - s, form) -
                  log_gamma_factor(cplx(0.5, -t) + s, form));
}

cplx voronoi_G(int sign, cplx s, const GL3Form& form) {
  const cplx a = std::exp(log_gamma_factor(1.0 - s, form) - log_gamma_factor(s, form));
  const cplx b = std::exp(log_gamma_factor(2.0 - s, form) - log_gamma_factor(1.0 + s, form));
  return a - static_cast<double>(sign) * kI * b;
}

cplx afe_G(cplx u, double t, const GL3Form& form) {
  const cplx p(0.5, t), m(0.5, -t);
  return std::exp(log_gamma_factor(p + u, form) + log_gamma_factor(m + u, form) -
                  log_gamma_factor(p, form) - log_gamma_factor(m, form) + u * u);
}

// ---------------------------------------------------------------------------

VKernel::VKernel(double t, const GL3Form& form, double U) : t_(t), U_(U), form_(form) {
  if (!(U > 0.0)) throw DomainError("VKernel: U must be positive");
  // Trapezoidal rule on Re u = 1: the integrand is analytic for 0 < Re u < 2,
  // so the error is of order exp(-2 pi / h) y^{+-1}.
  K_ = static_cast<int>(std::ceil(U / kStepV));
  h_ = U / K_;
  for (int k = -K_; k <= K_; ++k) {
    const cplx u(1.0, k * h_);
    const double edge = (std::abs(k) == K_) ? 0.5 : 1.0;
    c_.push_back(edge * h_ * afe_G(u, t, form) / u / kTwoPi);
  }
  g_edge_ = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double sigma = kContourEps + (1.0 - kContourEps) * i / 20.0;
    g_edge_ = std::max({g_edge_, std::abs(afe_G(cplx(sigma, U), t, form)),
                        std::abs(afe_G(cplx(sigma, -U), t, form))});
  }
}

const std::vector<double>& VKernel::moments() const {
  std::call_once(moments_->once, [&] {
    QuadratureSpec spec;
    spec.rel_tol = 1e-6;
    spec.abs_tol = 1e-300;
    for (int k = 1; k <= 16; ++k) {
      const double sigma = k;
      auto g = [&](double tau) {
        const cplx u(sigma, tau);
        return cplx(std::abs(afe_G(u, t_, form_)) / std::abs(u));
      };
      const double H = sigma + 12.0;
      moments_->m.push_back((integrate(g, -H, 0.0, spec).value + integrate(g, 0.0, H, spec).value).real() /
                            kTwoPi);
    }
  });
  return moments_->m;
}

double VKernel::decay_bound(double y) const {
  if (!(y > 0.0)) throw DomainError("V: y must be positive");
  const double ly = std::log(y);
  double best = std::numeric_limits<double>::infinity();
  const std::vector<double>& m = moments();
  for (std::size_t k = 0; k < m.size(); ++k) {
    best = std::min(best, std::log(m[k]) - (k + 1.0) * ly);
  }
  return std::exp(best);
}

double VKernel::truncation_point(double tol) const {
  if (!(tol > 0.0)) throw DomainError("truncation_point: tol must be positive");
  // Tail integral int_Y^inf 2 (log y)^5/5! y^{-1/2} bound(y) dy in l = log y.
  constexpr double h = 0.02;
  constexpr int n = 5000;
  std::vector<double> f(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double l = i * h;
    f[i] = 2.0 * std::pow(l + 1.0, 5) / 120.0 * std::exp(0.5 * l) * decay_bound(std::exp(l)) * h;
  }
  double tail = 0.0;
  int i = n;
  for (; i > 0; --i) {
    if (tail + f[i - 1] >= tol) break;
    tail += f[i - 1];
  }
  return std::exp(i * h);
}

cplx VKernel::operator()(double y) const {
  if (!(y > 0.0)) throw DomainError("V: y must be positive");
  const double ly = std::log(y);
  const cplx z = std::polar(1.0, -h_ * ly);
  return horner(c_, z) * std::exp(cplx(-ly, K_ * h_ * ly));
}

double VKernel::connector_bound(double y) const {
  return 2.0 * g_edge_ * std::max(1.0, 1.0 / y) / (kTwoPi * U_);
}

cplx V(double y, double t, const GL3Form& form, double U) { return VKernel(t, form, U)(y); }

WKernel::WKernel(double t, const GL3Form& form, const WindowFunction& w, double height) {
  if (w.is_zero()) return;
  // Trapezoidal rule on Re s = 0 with w~(i k h) built by phase recurrences
  // over the Mellin samples of w.
  const MellinTable table([&](double x) { return cplx(w(x)); }, w.a(), w.b(), height);
  K_ = static_cast<int>(std::ceil(height / kStepW));
  h_ = height / K_;
  const auto& lx = table.log_nodes();
  const auto& wx = table.weighted();
  std::vector<cplx> phase(lx.size()), step(lx.size());
  for (std::size_t j = 0; j < lx.size(); ++j) {
    step[j] = std::polar(1.0, h_ * lx[j]);
    phase[j] = std::polar(1.0, -K_ * h_ * lx[j]);
  }
  c_.reserve(2 * K_ + 1);
  for (int k = -K_; k <= K_; ++k) {
    cplx m = 0.0;
    for (std::size_t j = 0; j < lx.size(); ++j) {
      m += wx[j] * phase[j];
      phase[j] *= step[j];
    }
    bound_ = std::max(bound_, std::abs(m));
    const double edge = (std::abs(k) == K_) ? 0.5 : 1.0;
    c_.push_back(edge * h_ * fe_quotient(cplx(0.0, k * h_), t, form) * m / kTwoPi);
  }
  bound_ *= 2.0 * height / kTwoPi;
}

cplx WKernel::operator()(double y) const {
  if (!(y > 0.0)) throw DomainError("W: y must be positive");
  if (c_.empty()) return 0.0;
  const double ly = std::log(y);
  return horner(c_, std::polar(1.0, h_ * ly)) * std::polar(1.0, -K_ * h_ * ly);
}

cplx W_fe(double y, double t, const GL3Form& form, const WindowFunction& w) {
  return WKernel(t, form, w)(y);
}

// ---------------------------------------------------------------------------

AfeTerms::AfeTerms(const GL3Form& form, double Y_) : Y(Y_) {
  const u64 ymax = static_cast<u64>(std::floor(Y));
  if (ymax >= 1 && !form.provider.covers(ymax)) {
    throw DataRangeError("AFE sum needs coefficients up to n1 n2^2 = " + std::to_string(ymax),
                         static_cast<double>(ymax));
  }
  if (ymax > 0xffffffffULL) throw DomainError("AFE sum: length beyond 2^32");
  // A(m, n2) = A(m, 1) A(1, n2) for coprime m, n2; the rest go to the provider.
  const std::vector<double> a1 = form.provider.a1_table(std::max<u64>(ymax, 1));
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> rows;
  for (u64 n2 = 1; n2 * n2 <= ymax; ++n2) {
    for (u64 m = 1; m * n2 * n2 <= ymax; ++m) {
      const double a = std::gcd(m, n2) == 1 ? a1[m] * a1[n2] : form.A(m, n2);
      if (a == 0.0) continue;
      const u64 yy = m * n2 * n2;
      rows.emplace_back(static_cast<std::uint32_t>(yy), static_cast<std::uint32_t>(m),
                        a / std::sqrt(static_cast<double>(yy)));
    }
  }
  std::sort(rows.begin(), rows.end());
  n1.reserve(rows.size());
  y.reserve(rows.size());
  coeff.reserve(rows.size());
  for (const auto& [yy, m, c] : rows) {
    y.push_back(yy);
    n1.push_back(m);
    coeff.push_back(c);
  }
}

std::size_t AfeTerms::count_below(double limit) const {
  return std::upper_bound(y.begin(), y.end(), limit,
                          [](double l, std::uint32_t v) { return l < static_cast<double>(v); }) -
         y.begin();
}

namespace {

// V tabulated in log y and interpolated by 4-point Lagrange; V is band-limited
// to |frequency| <= U in log y, so a step of 1e-3 is far inside tolerance.
class VTable {
 public:
  VTable(const VKernel& V, double Y) {
    n_ = static_cast<int>(std::ceil((std::log(std::max(Y, 2.0)) + 2 * kStep) / kStep)) + 2;
    v_.resize(n_ + 2);
    for (int i = 0; i < n_ + 2; ++i) v_[i] = V(std::exp((i - 1) * kStep));
  }
  cplx operator()(double ly) const {
    const double x = ly / kStep + 1.0;
    const int i = std::clamp(static_cast<int>(x), 1, n_ - 1);
    const double f = x - i;
    const double w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
    const double w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    const double w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
    const double w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
    return w0 * v_[i - 1] + w1 * v_[i] + w2 * v_[i + 1] + w3 * v_[i + 2];
  }

 private:
  static constexpr double kStep = 1e-3;
  int n_;
  std::vector<cplx> v_;
};

// 2 Re sum coeff * weight(n1) * V(y) over the first `count` terms.
template <class Weight>
AfeValue afe_sum(const AfeTerms& terms, std::size_t count, double Y, const VKernel& V,
                 Weight&& weight) {
  AfeValue out;
  const VTable vt(V, Y);
  cplx sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    sum += terms.coeff[i] * weight(terms.n1[i]) * vt(std::log(static_cast<double>(terms.y[i])));
  }
  out.value = 2.0 * sum.real();
  out.imag = 2.0 * sum.imag();
  out.terms = count;
  // Dropped range y > Y against the decay bound, plus the truncation at height U.
  double tail = 0.0;
  for (double l = std::log(Y); l < std::log(Y) + 100.0; l += 0.02) {
    tail += 2.0 * std::pow(l + 1.0, 5) / 120.0 * std::exp(0.5 * l) * V.decay_bound(std::exp(l)) * 0.02;
  }
  out.tail_bound = 2.0 * tail + 2.0 * V.connector_bound(1.0) * static_cast<double>(count);
  return out;
}

u64 max_n1(const AfeTerms& terms, std::size_t count) {
  u64 m = 0;
  for (std::size_t i = 0; i < count; ++i) m = std::max<u64>(m, terms.n1[i]);
  return m;
}

}  // namespace

AfeValue L_abs_sq(const AfeTerms& terms, const GL3Form& form, double t, double U, double Y_limit) {
  const VKernel V(t, form, U);
  const double Y = std::min(terms.Y, Y_limit);
  const std::size_t count = terms.count_below(Y);
  const u64 n1_max = max_n1(terms, count);
  // tau_it(n) = sum_{ab = n} (a/b)^{it}, filled by a sieve over a.
  std::vector<cplx> tau(n1_max + 1, 0.0);
  std::vector<cplx> pw(n1_max + 1);
  for (u64 a = 1; a <= n1_max; ++a) pw[a] = std::polar(1.0, t * std::log(static_cast<double>(a)));
  for (u64 a = 1; a <= n1_max; ++a) {
    for (u64 b = 1; a * b <= n1_max; ++b) tau[a * b] += pw[a] * std::conj(pw[b]);
  }
  AfeValue out = afe_sum(terms, count, Y, V, [&](std::uint32_t m) { return tau[m]; });
  if (form.provider.kind() == ProviderKind::divisor3) {
    // zeta^3(1/2 +- it + u) has triple poles at u = 1/2 -+ it, which the
    // contour at Re u = 1 passes: |L|^2 = 2 (sum) - 2 (residues there).
    auto F = [&](cplx u) {
      const cplx z = zeta(cplx(0.5, t) + u) * zeta(cplx(0.5, -t) + u);
      return afe_G(u, t, form) * z * z * z / u;
    };
    auto circle = [&](cplx c, double r, int n) {
      cplx acc = 0.0;
      for (int k = 0; k < n; ++k) {
        const cplx e = std::polar(1.0, kTwoPi * (k + 0.5) / n);
        acc += F(c + r * e) * r * e;
      }
      return acc / static_cast<double>(n);
    };
    // One circle around both poles while they are close, else one each.
    const bool merged = std::abs(t) <= 0.3;
    cplx fine = 0.0, coarse = 0.0;
    if (merged) {
      fine = circle(0.5, 0.45, 512);
      coarse = circle(0.5, 0.45, 256);
    } else {
      for (double sg : {1.0, -1.0}) {
        fine += circle(cplx(0.5, sg * t), 0.25, 128);
        coarse += circle(cplx(0.5, sg * t), 0.25, 64);
      }
    }
    out.polar = -2.0 * fine.real();
    out.value += out.polar;
    out.polar_bound = 2.0 * std::abs(fine - coarse) + 1e-15 * std::abs(out.polar);
  }
  return out;
}

double afe_length(const GL3Form& form, double t, double cutoff_mult, double tail_tol, double U) {
  if (!(cutoff_mult >= 1.0)) throw DomainError("afe_length: cutoff_mult must be at least 1");
  return cutoff_mult * VKernel(t, form, U).truncation_point(tail_tol);
}

AfeValue L_abs_sq(const GL3Form& form, double t, double cutoff_mult, double tail_tol, double U) {
  return L_abs_sq(AfeTerms(form, afe_length(form, t, cutoff_mult, tail_tol, U)), form, t, U);
}

AfeValue L_rankin_central(const GL3Form& form, const GL2SpectralDatum& datum, double cutoff_mult,
                          double tail_tol, double U) {
  const AfeTerms terms(form, afe_length(form, datum.t, cutoff_mult, tail_tol, U));
  const u64 n1_max = max_n1(terms, terms.y.size());
  if (n1_max > datum.n_max()) {
    throw DataRangeError("L_rankin_central: lambda_j needed up to n = " + std::to_string(n1_max),
                         static_cast<double>(n1_max));
  }
  const VKernel V(datum.t, form, U);
  return afe_sum(terms, terms.y.size(), terms.Y, V,
                 [&](std::uint32_t m) { return cplx(datum.lambda[m - 1]); });
}

// ---------------------------------------------------------------------------

DualSum fe_dual_sum(const GL3Form& form, double t, const WindowFunction& w, double N) {
  if (!(N >= 1.0)) throw DomainError("fe_dual_sum: N must be at least 1");
  DualSum out;
  const u64 lo = static_cast<u64>(std::ceil(w.a() * N));
  const u64 hi = static_cast<u64>(std::floor(w.b() * N));
  // W(y; t) is concentrated near y = (|t|/2 pi)^3 and decays rapidly past
  // (|t| + 1)^3, so the dual sum stops at n N = 8 (|t| + 1)^3.
  const u64 dual = static_cast<u64>(std::ceil(8.0 * std::pow(std::abs(t) + 1.0, 3) / N));
  const u64 need = std::max(hi, dual);
  if (!form.provider.covers(need)) {
    throw DataRangeError("fe_dual_sum: coefficients needed up to n = " + std::to_string(need),
                         static_cast<double>(need));
  }
  const std::vector<double> a = form.provider.a1_table(need);
  for (u64 n = lo; n <= hi; ++n) {
    const double x = static_cast<double>(n);
    const double wv = w(x / N);
    if (wv == 0.0) continue;
    out.lhs += a[n] * wv * std::exp(cplx(-0.5, t) * std::log(x));
    ++out.lhs_terms;
  }
  const WKernel W(t, form, w);
  for (u64 n = 1; n <= dual; ++n) {
    if (a[n] == 0.0) continue;
    const double x = static_cast<double>(n);
    out.rhs += a[n] * std::exp(cplx(-0.5, -t) * std::log(x)) * W(x * N);
    ++out.rhs_terms;
  }
  if (form.provider.kind() == ProviderKind::divisor3) {
    // f(s) = w~(s) N^s; zeta(1 + z)^3 = z^-3 + 3 g0 z^-2 + 3 (g0^2 - g1) z^-1 + O(1).
    const cplx s0(0.5, t);
    const double lN = std::log(N);
    cplx m[3];
    for (int k = 0; k < 3; ++k) {
      m[k] = mellin_on([&](double x) { return cplx(w(x) * std::pow(std::log(x), k)); }, w.a(),
                       w.b(), s0);
    }
    const cplx Ns = std::exp(s0 * lN);
    const cplx f0 = m[0] * Ns;
    const cplx f1 = (m[1] + lN * m[0]) * Ns;
    const cplx f2 = (m[2] + 2.0 * lN * m[1] + lN * lN * m[0]) * Ns;
    out.polar = 0.5 * f2 + 3.0 * kGamma0 * f1 + 3.0 * (kGamma0 * kGamma0 - kGamma1) * f0;
  }
  out.budget = 1e-6 + 1e-9 * (std::abs(out.lhs) + std::abs(out.polar));
  return out;
}

}  // namespace gl3lab
