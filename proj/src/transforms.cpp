#include "gl3lab/transforms.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "gl3lab/errors.hpp"
#include "gl3lab/gamma_afe.hpp"

namespace gl3lab {

namespace {

long long mod_inverse(long long a, long long c) {
  long long g = c, x = 0, x1 = 1, r = a;
  while (r != 0) {
    const long long q = g / r;
    std::tie(g, r) = std::make_pair(r, g - q * r);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  return ((x % c) + c) % c;
}

// Composite Gauss-Legendre over [a, b] with `panels` equal panels.
template <class F>
cplx composite(F&& f, double a, double b, int panels, int order = 16) {
  const GaussRule& rule = gauss_legendre_rule(order);
  const double w = (b - a) / panels;
  cplx sum = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * w;
    for (int i = 0; i < order; ++i) sum += rule.w[i] * f(c + 0.5 * w * rule.x[i]);
  }
  return sum * (0.5 * w);
}

std::vector<cplx> cheb_fit(const std::function<cplx(double)>& f, double a, double b, int n) {
  std::vector<cplx> v(n), c(n);
  for (int k = 0; k < n; ++k) {
    v[k] = f(0.5 * (a + b) + 0.5 * (b - a) * std::cos(kPi * (k + 0.5) / n));
  }
  for (int j = 0; j < n; ++j) {
    cplx s = 0.0;
    for (int k = 0; k < n; ++k) s += v[k] * std::cos(kPi * j * (k + 0.5) / n);
    c[j] = s * (2.0 / n);
  }
  c[0] *= 0.5;
  return c;
}

cplx cheb_eval(const std::vector<cplx>& c, double a, double b, double x) {
  const double u = (2.0 * x - a - b) / (b - a);
  cplx b1 = 0.0, b2 = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) {
    const cplx b0 = 2.0 * u * b1 - b2 + c[j];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + c[0];
}

constexpr double kSeriesTop = 60.0;
constexpr double kSeriesReach = 4.0;
constexpr int kSeriesTerms = 32;

}  // namespace

namespace {

// S(m, n; q) by direct summation, m and n already reduced mod q. For prime q
// the inverses come from inv(x) = -(q/x) inv(q mod x).
cplx kloosterman_direct(long long m, long long n, long long q, bool prime) {
  std::vector<long long> inv;
  if (prime) {
    inv.assign(q, 0);
    if (q > 1) inv[1] = 1;
    for (long long x = 2; x < q; ++x) inv[x] = (q - (q / x) * inv[q % x] % q) % q;
  }
  double re = 0.0, im = 0.0;
  for (long long x = 0; x < q; ++x) {
    if (q > 1 && (prime ? x == 0 : std::gcd(x, q) != 1)) continue;
    const long long xb = prime ? inv[x] : mod_inverse(x, q);
    // Reduce the numerator mod q before dividing so the phase stays exact.
    const long long num = static_cast<long long>((static_cast<__int128>(m) * x + static_cast<__int128>(n) * xb) % q);
    const double th = kTwoPi * static_cast<double>(num) / static_cast<double>(q);
    re += std::cos(th);
    im += std::sin(th);
  }
  return {re, im};
}

}  // namespace

double kloosterman(long long m, long long n, u64 c_, double* imag) {
  if (c_ == 0) throw DomainError("kloosterman: modulus must be positive");
  const long long c = static_cast<long long>(c_);
  m = ((m % c) + c) % c;
  n = ((n % c) + c) % c;
  // S(m, n; q r) = S(m rbar, n rbar; q) S(m qbar, n qbar; r) for coprime q, r.
  cplx s = 1.0;
  for (const auto& [p, e] : factorize(c_)) {
    long long q = 1;
    for (int i = 0; i < e; ++i) q *= static_cast<long long>(p);
    const long long r = c / q;
    const long long rb = mod_inverse(r % q, q);
    const auto mq = static_cast<long long>(static_cast<__int128>(m) * rb % q);
    const auto nq = static_cast<long long>(static_cast<__int128>(n) * rb % q);
    s *= kloosterman_direct(mq, nq, q, e == 1);
  }
  if (imag) *imag = s.imag();
  return s.real();
}

double h_const(const SpectralWindow& k) {
  k.validate();
  if (k.amplitude == 0.0) return 0.0;
  QuadratureSpec spec;
  spec.rel_tol = 1e-13;
  spec.abs_tol = 1e-300;
  auto f = [&](double t) { return cplx(k(t) * std::tanh(kPi * t) * t); };
  // k is even, so (1/pi) int over R = (2/pi) int over t >= 0.
  double v = 0.0;
  const double lo = k.t_min(), hi = k.t_max();
  if (lo > 0.0) v += integrate(f, 0.0, lo, spec).value.real();
  v += integrate(f, lo, k.T, spec).value.real() + integrate(f, k.T, hi, spec).value.real();
  return 2.0 / kPi * v;
}

// ---------------------------------------------------------------------------

BesselTransform::BesselTransform(const SpectralWindow& k, cplx u, const GL3Form& form)
    : k_(k), u_(u), form_(form) {
  k.validate();
  t_lo_ = k.t_min();
  t_hi_ = k.t_max();
  if (k.amplitude == 0.0) return;
  if (t_hi_ <= kSeriesTop) {
    const GaussRule& rule = gauss_legendre_rule(16);
    const int panels = static_cast<int>(std::ceil((t_hi_ - t_lo_) / 0.125));
    const double width = (t_hi_ - t_lo_) / panels;
    for (int p = 0; p < panels; ++p) {
      for (int i = 0; i < 16; ++i) {
        const double t = t_lo_ + (p + 0.5 + 0.5 * rule.x[i]) * width;
        series_t_.push_back(t);
        series_w_.push_back(0.5 * width * rule.w[i] * h(t) * t);
        // log cosh(pi t) without overflow.
        const double lc = kPi * t + std::log1p(std::exp(-kTwoPi * t)) - std::log(2.0);
        cplx g = std::exp(-log_gamma(cplx(1.0, 2.0 * t)) - lc);
        for (int j = 0; j < kSeriesTerms; ++j) {
          series_c_.push_back(g);
          g /= static_cast<double>(j + 1) * cplx(j + 1.0, 2.0 * t);
        }
      }
    }
  }
  if (k.T < 4.0 * k.M) return;
  xi_max_ = 6.5 / k.M;
  // h^(xi) = 2 int_0^inf h(t) t tanh(pi t) cos(2 t xi) dt on fixed Gauss nodes.
  const int panels = static_cast<int>(std::ceil(t_hi_ / (0.5 * k.M) + 2.0 * xi_max_ * t_hi_ / 3.0)) + 4;
  const GaussRule& rule = gauss_legendre_rule(16);
  std::vector<double> ts;
  std::vector<cplx> ws;
  const double a = t_lo_ > 0.0 ? t_lo_ : 0.0;
  const double width = (t_hi_ - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * width;
    for (int i = 0; i < 16; ++i) {
      const double t = c + 0.5 * width * rule.x[i];
      ts.push_back(t);
      ws.push_back(2.0 * 0.5 * width * rule.w[i] * h(t) * t * std::tanh(kPi * t));
    }
  }
  const int n = static_cast<int>(std::ceil(1.2 * t_hi_ * xi_max_)) + 40;
  hhat_c_ = cheb_fit(
      [&](double xi) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < ts.size(); ++j) s += ws[j] * std::cos(2.0 * ts[j] * xi);
        return s;
      },
      0.0, xi_max_, n);
  nodes_ = std::make_shared<XiNodes>();
}

cplx BesselTransform::h(double t) const {
  const cplx g = (u_ == cplx(0.0)) ? cplx(1.0) : afe_G(u_, t, form_);
  return k_(t) * g;
}

cplx BesselTransform::hhat(double xi) const { return cheb_eval(hhat_c_, 0.0, xi_max_, xi); }

bool BesselTransform::xi_route(double x) const {
  return !hhat_c_.empty() && x * std::cosh(xi_max_) < 1e6;
}

double BesselTransform::log_bandwidth(double D) const {
  return 0.5 * (4.0 * kPi * D * std::sqrt(2.0) + 2.0 * t_hi_);
}

// Gauss nodes on [0, xi_max] with the weights folded into h^, one set per
// power-of-two panel count.
struct BesselTransform::XiNodes {
  std::mutex lock;
  std::map<int, std::pair<std::vector<double>, std::vector<cplx>>> by_panels;
};

template <class Kernel>
cplx BesselTransform::xi_integral(double x, double phase, Kernel kernel) const {
  int panels = 8;
  while (panels < phase / 4.0 + 8.0) panels *= 2;
  const std::pair<std::vector<double>, std::vector<cplx>>* set = nullptr;
  {
    std::lock_guard<std::mutex> g(nodes_->lock);
    auto it = nodes_->by_panels.find(panels);
    if (it == nodes_->by_panels.end()) {
      const GaussRule& rule = gauss_legendre_rule(16);
      const double width = xi_max_ / panels;
      std::vector<double> xs;
      std::vector<cplx> ws;
      for (int p = 0; p < panels; ++p) {
        for (int i = 0; i < 16; ++i) {
          const double xi = (p + 0.5 + 0.5 * rule.x[i]) * width;
          xs.push_back(xi);
          ws.push_back(0.5 * width * rule.w[i] * hhat(xi));
        }
      }
      it = nodes_->by_panels.emplace(panels, std::make_pair(std::move(xs), std::move(ws))).first;
    }
    set = &it->second;  // map nodes are stable
  }
  cplx sum = 0.0;
  for (std::size_t j = 0; j < set->first.size(); ++j) sum += std::cos(x * kernel(set->first[j])) * set->second[j];
  return 2.0 / kPi * sum;
}

bool BesselTransform::series_route(double x) const {
  return !series_t_.empty() && x <= kSeriesReach && x >= 1e-12;
}

cplx BesselTransform::series(int sign, double x) const {
  const double z = (sign > 0 ? -0.25 : 0.25) * x * x;
  const double L = std::log(0.5 * x);
  cplx sum = 0.0;
  for (std::size_t i = 0; i < series_t_.size(); ++i) {
    const cplx* c = series_c_.data() + i * kSeriesTerms;
    cplx p = c[kSeriesTerms - 1];
    for (int j = kSeriesTerms - 1; j-- > 0;) p = p * z + c[j];
    // h is even, so the t < 0 half turns E into E - conj(E).
    sum += series_w_[i] * (std::polar(1.0, 2.0 * series_t_[i] * L) * p).imag();
  }
  return -2.0 * sum;
}

cplx BesselTransform::plus(double x) const {
  if (!(x > 0.0)) throw DomainError("H+: x must be positive");
  if (k_.amplitude == 0.0) return 0.0;
  if (series_route(x)) return series(1, x);
  if (!xi_route(x)) return plus_direct(x);
  const double phase = x * (std::cosh(xi_max_) - 1.0) + 2.0 * t_hi_ * xi_max_;
  return xi_integral(x, phase, [](double xi) { return std::cosh(xi); });
}

cplx BesselTransform::minus(double x) const {
  if (!(x > 0.0)) throw DomainError("H-: x must be positive");
  if (k_.amplitude == 0.0) return 0.0;
  if (series_route(x)) return series(-1, x);
  // Past the turning point of every K_{2it} the direct route is cheap and
  // accurate relative to the (tiny) value; the xi route only absolutely.
  if (!xi_route(x) || x >= 2.0 * t_hi_) return minus_direct(x);
  const double phase = x * std::sinh(xi_max_) + 2.0 * t_hi_ * xi_max_;
  return xi_integral(x, phase, [](double xi) { return std::sinh(xi); });
}

cplx BesselTransform::plus_direct(double x) const {
  if (k_.amplitude == 0.0) return 0.0;
  QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  spec.abs_tol = 1e-13 * k_.amplitude * k_.M * (1.0 + t_hi_);
  auto f = [&](double t) {
    return h(t) * t * (bessel_j_imag_order_scaled(t, x) - bessel_j_imag_order_scaled(-t, x));
  };
  return kI * integrate(f, t_lo_, t_hi_, spec).value;
}

cplx BesselTransform::minus_direct(double x) const {
  if (k_.amplitude == 0.0) return 0.0;
  QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  spec.abs_tol = x >= 2.0 * t_hi_ ? 1e-300 : 1e-13 * k_.amplitude * k_.M * (1.0 + t_hi_);
  // sinh(pi t) K_{2it}(x) = e^{pi t} K_{2it}(x) (1 - e^{-2 pi t}) / 2; even in t.
  auto f = [&](double t) {
    return h(t) * t * bessel_k_imag_order_scaled(t, x) * 0.5 * -std::expm1(-kTwoPi * t);
  };
  return 2.0 * (2.0 / kPi) * integrate(f, t_lo_, t_hi_, spec).value;
}

cplx h_plus(double x, const SpectralWindow& k, cplx u, const GL3Form& form) {
  return BesselTransform(k, u, form).plus(x);
}

cplx h_minus(double x, const SpectralWindow& k, cplx u, const GL3Form& form) {
  return BesselTransform(k, u, form).minus(x);
}

// ---------------------------------------------------------------------------

HankelPlan::HankelPlan(const BandLimited& f, const GL3Form& form) {
  if (!(f.a > 0.0 && f.b > f.a)) throw DomainError("HankelPlan: need 0 < a < b");
  const double la = std::log(f.a), lb = std::log(f.b);
  const double dl = kPi / (1.25 * f.bandwidth + 20.0);
  const int J = static_cast<int>(std::ceil((lb - la) / dl)) + 1;
  constexpr double kMaxStep = 0.05;
  std::size_t N = 1;
  while (N < 2 * static_cast<std::size_t>(J) || kTwoPi / (N * dl) > kMaxStep) N *= 2;
  std::vector<cplx> g(N, 0.0), out;
  bool any = false;
  for (int j = 0; j < J; ++j) {
    const double l = la + j * dl;
    if (l > lb) break;
    g[j] = f.f(std::exp(l)) * std::exp(0.5 * l) * dl;
    any = any || g[j] != cplx(0.0);
  }
  if (!any) return;
  Eigen::FFT<double> fft;
  fft.inv(out, g);  // out_k = (1/N) sum_j g_j exp(2 pi i j k / N)
  h_ = kTwoPi / (N * dl);
  const long half = static_cast<long>(N / 2);
  const long kmax = std::min(half - 1, static_cast<long>(std::ceil(1.1 * f.bandwidth / h_)));
  std::vector<cplx> ft(2 * kmax + 1);
  double peak = 0.0;
  for (long k = -kmax; k <= kmax; ++k) {
    const std::size_t idx = k >= 0 ? static_cast<std::size_t>(k) : N + k;
    ft[k + kmax] = static_cast<double>(N) * out[idx] * std::polar(1.0, k * h_ * la);
    peak = std::max(peak, std::abs(ft[k + kmax]));
  }
  long lo = 0, hi = 2 * kmax;
  while (lo < hi && std::abs(ft[lo]) < 1e-17 * peak) ++lo;
  while (hi > lo && std::abs(ft[hi]) < 1e-17 * peak) --hi;
  tau0_ = (lo - kmax) * h_;
  for (long k = lo; k <= hi; ++k) {
    const cplx s(0.5, (k - kmax) * h_);
    const cplx a = std::exp(log_gamma_factor(1.0 - s, form) - log_gamma_factor(s, form));
    const cplx b = std::exp(log_gamma_factor(2.0 - s, form) - log_gamma_factor(1.0 + s, form));
    const cplx m = ft[k] * (h_ / kTwoPi);
    plus_.push_back((a - kI * b) * m);
    minus_.push_back((a + kI * b) * m);
  }
  plus_.resize((plus_.size() + 3) / 4 * 4, 0.0);
  minus_.resize(plus_.size(), 0.0);
}

cplx HankelPlan::operator()(double y) const {
  if (y == 0.0) throw DomainError("Hankel transform: y must be nonzero");
  if (plus_.empty()) return 0.0;
  const std::vector<cplx>& c = y > 0.0 ? plus_ : minus_;
  const double ly = std::log(std::abs(y));
  const cplx z = std::polar(1.0, h_ * ly);
  // Four interleaved Horner chains in z^4 (the arrays are padded to a
  // multiple of 4) break the dependency on a single accumulator.
  const cplx z2 = z * z, z4 = z2 * z2;
  cplx a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  for (std::size_t m = c.size() / 4; m-- > 0;) {
    const cplx* q = c.data() + 4 * m;
    a0 = a0 * z4 + q[0];
    a1 = a1 * z4 + q[1];
    a2 = a2 * z4 + q[2];
    a3 = a3 * z4 + q[3];
  }
  const cplx acc = a0 + z * a1 + z2 * (a2 + z * a3);
  return acc * std::polar(1.0 / std::sqrt(std::abs(y)), tau0_ * ly);
}

cplx hankel_mb(double y, const WindowFunction& w, cplx u, const GL3Form& form) {
  if (w.is_zero()) return 0.0;
  BandLimited f{[&](double x) { return w(x) * std::exp(-u * std::log(x)); }, w.a(), w.b(),
                400.0 + std::abs(u.imag())};
  return HankelPlan(f, form)(y);
}

void BesselKernelExpansion::validate() const {
  if (K_terms < 1 || static_cast<int>(B_plus.size()) != K_terms ||
      static_cast<int>(B_minus.size()) != K_terms) {
    throw DomainError("BesselKernelExpansion: need K_terms >= 1 constants per sign");
  }
}

cplx hankel_asym(double y, const BandLimited& f, const BesselKernelExpansion& e) {
  e.validate();
  if (std::abs(y) < 1e3) throw DomainError("hankel_asym: needs |y| >= 1e3");
  const double ay = std::abs(y);
  const int sg = y > 0.0 ? 1 : -1;
  const std::vector<cplx>& B = sg > 0 ? e.B_plus : e.B_minus;
  // Integrate in v = x^{1/3}, where the phase 3 (x |y|)^{1/3} is linear.
  const double va = std::cbrt(f.a), vb = std::cbrt(f.b), cy = std::cbrt(ay);
  const double phase = kTwoPi * 3.0 * cy * (vb - va) + f.bandwidth * std::log(f.b / f.a);
  const int panels = static_cast<int>(std::ceil(phase / 3.0)) + 8;
  auto g = [&](double v) {
    const double x = v * v * v;
    const double z13 = v * cy;  // (x |y|)^{1/3}
    cplx s = 0.0, p = 1.0;
    for (int k = 0; k < e.K_terms; ++k) {
      s += B[k] * p;
      p /= z13;
    }
    return f.f(x) * e_of(sg * 3.0 * z13) / z13 * s * (3.0 * v * v);
  };
  return composite(g, va, vb, panels);
}

cplx hankel_asym(double y, const WindowFunction& w, cplx u, const BesselKernelExpansion& e) {
  if (w.is_zero()) return 0.0;
  BandLimited f{[&](double x) { return w(x) * std::exp(-u * std::log(x)); }, w.a(), w.b(),
                400.0 + std::abs(u.imag())};
  return hankel_asym(y, f, e);
}

BandLimited kernel_probe(double y, const WindowFunction& b) {
  if (y == 0.0) throw DomainError("kernel_probe: y must be nonzero");
  const double ay = std::abs(y);
  const double sg = y > 0.0 ? -1.0 : 1.0;
  return BandLimited{[b, ay, sg](double x) { return b(x) * e_of(sg * 3.0 * std::cbrt(x * ay)); },
                     b.a(), b.b(), kTwoPi * std::cbrt(b.b() * ay) + 400.0};
}

namespace {

constexpr int kProbePoints = 40;
constexpr double kProbeLo = 1e4, kProbeHi = 1e8;

double probe_abs_y(int i) { return kProbeLo * std::pow(kProbeHi / kProbeLo, i / (kProbePoints - 1.0)); }

// Transforms of the probes depend on the form only through mu.
const std::vector<cplx>& probe_values(const GL3Form& form) {
  static std::mutex mu_lock;
  static std::vector<std::pair<cplx, std::vector<cplx>>> cache;
  {
    std::lock_guard<std::mutex> g(mu_lock);
    for (const auto& [mu, v] : cache) {
      if (mu == form.mu) return v;
    }
  }
  std::vector<cplx> v(2 * kProbePoints);
  for (int i = 0; i < 2 * kProbePoints; ++i) {
    const double y = (i < kProbePoints ? 1.0 : -1.0) * probe_abs_y(i % kProbePoints);
    v[i] = HankelPlan(kernel_probe(y), form)(y);
  }
  std::lock_guard<std::mutex> g(mu_lock);
  for (const auto& [mu, w] : cache) {
    if (mu == form.mu) return w;
  }
  cache.emplace_back(form.mu, std::move(v));
  return cache.back().second;
}

}  // namespace

BesselKernelExpansion calibrate_kernel(const GL3Form& form, int K) {
  if (K < 1 || K > 6) throw DomainError("calibrate_kernel: need 1 <= K <= 6");
  const WindowFunction b;
  std::vector<double> m(K);
  for (int k = 0; k < K; ++k) {
    m[k] = mellin_on([&](double x) { return cplx(b(x)); }, b.a(), b.b(), 1.0 - (k + 1.0) / 3.0).real();
  }
  const std::vector<cplx>& values = probe_values(form);
  BesselKernelExpansion out;
  out.K_terms = K;
  for (int branch = 0; branch < 2; ++branch) {
    // Rows in units of |y| = 1e4 keep the columns of comparable size.
    Eigen::MatrixXcd A(kProbePoints, K);
    Eigen::VectorXcd rhs(kProbePoints);
    for (int i = 0; i < kProbePoints; ++i) {
      const double ay = probe_abs_y(i);
      for (int k = 0; k < K; ++k) A(i, k) = std::pow(ay / kProbeLo, -k / 3.0) * (m[k] / m[0]);
      rhs(i) = values[branch * kProbePoints + i] / (std::pow(ay, -1.0 / 3.0) * m[0]);
    }
    const Eigen::VectorXcd beta = A.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXcd r = A * beta - rhs;
    for (int i = 0; i < kProbePoints; ++i) {
      out.fit_residual = std::max(out.fit_residual, std::abs(r(i)) / std::abs(rhs(i)));
    }
    std::vector<cplx>& B = branch == 0 ? out.B_plus : out.B_minus;
    for (int k = 0; k < K; ++k) B.push_back(beta(k) * std::pow(kProbeLo, k / 3.0));
  }
  if (out.fit_residual > 1e-3) {
    throw ConvergenceError("calibrate_kernel: fit residual " + std::to_string(out.fit_residual) +
                           " exceeds 1e-3");
  }
  return out;
}

// ---------------------------------------------------------------------------

TwistedHankel::TwistedHankel(int sign, double D, const BesselTransform& H, const WindowFunction& w,
                             const GL3Form& form)
    : sign_(sign > 0 ? 1 : -1),
      D_(D),
      H_(H),
      w_(w),
      plan_(BandLimited{[this](double x) { return weight(x); }, w.a(), w.b(),
                        H.log_bandwidth(D) + std::abs(H.u().imag()) + 400.0},
            form) {
  if (!(D > 0.0)) throw DomainError("TwistedHankel: D must be positive");
}

cplx TwistedHankel::weight(double x) const {
  const double wx = w_(x);
  if (wx == 0.0) return 0.0;
  return wx * std::exp(-H_.u() * std::log(x)) * H_(sign_, 4.0 * kPi * D_ * std::sqrt(x));
}

cplx w_tilde(double y, double D, int sign, const SpectralWindow& k, const WindowFunction& w,
             cplx u, const GL3Form& form) {
  if (w.is_zero() || k.amplitude == 0.0) return 0.0;
  const BesselTransform H(k, u, form);
  return TwistedHankel(sign, D, H, w, form).tilde(y);
}

SupportVerdict support_check(const StationaryPhaseProfile& p, int sign) {
  if (!(p.T > 1.0 && p.M > 0.0 && p.D > 0.0)) throw DomainError("support_check: need T > 1, M, D > 0");
  const double eps = kSupportEps;
  const double aX = std::abs(p.X);
  if (!(aX < std::pow(p.T, 2.0 - eps))) {
    throw DomainError("support_check: requires |X| < T^{2-eps}");
  }
  SupportVerdict v;
  auto asymp = [](double a, double b) { return a >= kAsympLo * b && a <= kAsympHi * b; };
  if (sign > 0) {
    const bool c1 = p.T < p.D / std::pow(p.M, 1.0 - eps);
    const bool c2 = asymp(aX, p.D);
    v.in_support = c1 && c2;
    v.U_window = aX > 0.0 ? p.T * p.T / aX : 0.0;
    if (!c1) v.reason = "T >= D / M^{1-eps}";
    else if (!c2) v.reason = "|X| not comparable to D";
  } else {
    const bool c1 = aX < p.D / std::pow(p.M, 3.0 - eps);
    const bool c2 = asymp(p.T, p.D);
    v.in_support = c1 && c2;
    v.U_window = std::cbrt(aX) * std::pow(p.T, 2.0 / 3.0);
    if (!c1) v.reason = "|X| >= D / M^{3-eps}";
    else if (!c2) v.reason = "T not comparable to D";
  }
  v.sandwich = v.U_window > std::pow(p.T, eps) && v.U_window < p.T / std::pow(p.M, 1.0 - eps);
  return v;
}

}  // namespace gl3lab
