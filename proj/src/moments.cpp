#include "gl3lab/moments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "gl3lab/errors.hpp"

namespace gl3lab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// k(t) / peak >= 1e-12 for |t - T| <= kReach M.
const double kReach = std::sqrt(12.0 * std::log(10.0));

// Barycentric weights for Lagrange interpolation through the nodes of rule.
std::vector<double> barycentric_weights(const GaussRule& rule) {
  const std::size_t n = rule.x.size();
  std::vector<double> b(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) b[i] /= rule.x[i] - rule.x[j];
    }
  }
  return b;
}

double interpolate(const GaussRule& rule, const std::vector<double>& bary, const double* f, double x) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) {
    const double d = x - rule.x[i];
    if (d == 0.0) return f[i];
    const double c = bary[i] / d;
    num += c * f[i];
    den += c;
  }
  return num / den;
}

// int_a^b g(t) f(t) dt with the expensive f sampled at `order` Gauss nodes per
// panel of width about `width` and interpolated under a finer rule for the
// cheap factor g.
template <class F, class G>
double interpolated_integral(F&& f, G&& g, double a, double b, double width, int order, int sub,
                             std::vector<MomentPiece>* pieces) {
  if (!(b > a)) return 0.0;
  const GaussRule& coarse = gauss_legendre_rule(order);
  const GaussRule& fine = gauss_legendre_rule(order);
  const std::vector<double> bary = barycentric_weights(coarse);
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
  const double h = (b - a) / panels;
  double total = 0.0;
  std::vector<double> fv(order);
  for (int p = 0; p < panels; ++p) {
    const double c = a + (p + 0.5) * h;
    for (int i = 0; i < order; ++i) {
      const double t = c + 0.5 * h * coarse.x[i];
      double budget = 0.0;
      fv[i] = f(t, &budget);
      if (pieces) pieces->push_back({t, 0.0, fv[i], budget, false});
    }
    const std::size_t first = pieces ? pieces->size() - order : 0;
    for (int s = 0; s < sub; ++s) {
      const double lo = -1.0 + 2.0 * s / sub, hi = lo + 2.0 / sub;
      for (int i = 0; i < order; ++i) {
        const double v = 0.5 * (lo + hi) + 0.5 * (hi - lo) * fine.x[i];
        const double w = 0.5 * h * 0.5 * (hi - lo) * fine.w[i];
        const double gv = g(c + 0.5 * h * v);
        total += w * gv * interpolate(coarse, bary, fv.data(), v);
        // Attribute the weight to the nearest sample for the breakdown.
        if (pieces) {
          std::size_t near = 0;
          for (int j = 1; j < order; ++j) {
            if (std::abs(coarse.x[j] - v) < std::abs(coarse.x[near] - v)) near = j;
          }
          (*pieces)[first + near].weight += w * gv;
        }
      }
    }
  }
  return total;
}

double omega_over_4pi(double t) {
  if (t == 0.0) return 0.0;
  return 1.0 / std::norm(zeta(cplx(1.0, 2.0 * t)));
}

}  // namespace

// ---------------------------------------------------------------------------

double diagonal_term(const SpectralWindow& k, const GL3Form& form, const std::vector<double>& a1) {
  k.validate();
  if (k.amplitude == 0.0 || a1.empty()) return 0.0;
  const double lo = k.t_min(), hi = k.t_max();
  const int order = 12;
  const int panels = std::max(4, static_cast<int>(std::ceil((hi - lo) / (0.5 * k.M))));
  auto f = [&](double t) {
    const VKernel V(t, form);
    double s = 0.0;
    for (std::size_t i = 0; i < a1.size(); ++i) {
      if (a1[i] == 0.0) continue;
      const double n = static_cast<double>(i + 1);
      s += a1[i] / n * V(n * n).real();
    }
    return k(t) * std::tanh(kPi * t) * t * s;
  };
  // The integrand is even in t.
  return 2.0 * (2.0 / kPi) * composite_gauss(f, lo, hi, panels, order).real();
}

double diagonal_term(const MomentRequest& req) {
  const SpectralWindow& k = req.window;
  k.validate();
  const double Y = afe_length(req.form, k.t_max(), req.cutoff_mult, req.tail_tol);
  const u64 n2_max = std::max<u64>(1, static_cast<u64>(std::floor(std::sqrt(Y))));
  if (!req.form.provider.covers(n2_max)) {
    throw DataRangeError("diagonal_term: coefficients needed up to n2 = " + std::to_string(n2_max),
                         static_cast<double>(n2_max));
  }
  const std::vector<double> table = req.form.provider.a1_table(n2_max);
  return diagonal_term(k, req.form, std::vector<double>(table.begin() + 1, table.end()));
}

MomentResult smoothed_moment(const MomentRequest& req) {
  const SpectralWindow& k = req.window;
  k.validate();
  req.form.validate();
  MomentResult out;
  out.partial = req.dataset.completeness_height < k.t_max();
  for (const GL2SpectralDatum& d : req.dataset.items) {
    if (std::abs(d.t - k.T) > 10.0 * k.M) continue;
    const AfeValue L = L_rankin_central(req.form, d, req.cutoff_mult, req.tail_tol);
    const double weight = k(d.t) * d.omega;
    out.discrete += weight * L.value;
    out.budget += std::abs(weight) * (L.tail_bound + L.polar_bound);
    out.breakdown.push_back({d.t, weight, L.value, std::abs(weight) * (L.tail_bound + L.polar_bound), true});
  }
  if (req.include_continuous && k.amplitude != 0.0) {
    const double lo = std::max(0.0, k.T - kReach * k.M), hi = k.T + kReach * k.M;
    const AfeTerms terms(req.form, afe_length(req.form, hi, req.cutoff_mult, req.tail_tol));
    auto L2 = [&](double t, double* budget) {
      const AfeValue v = L_abs_sq(terms, req.form, t, 6.0,
                                  afe_length(req.form, t, req.cutoff_mult, req.tail_tol));
      *budget = v.tail_bound + v.polar_bound;
      return v.value;
    };
    // (1/4 pi) int_R k omega |L|^2 = 2 int_0^inf k |L|^2 / |zeta(1 + 2it)|^2.
    auto g = [&](double t) { return 2.0 * k(t) * omega_over_4pi(t); };
    const std::size_t first = out.breakdown.size();
    out.continuous = interpolated_integral(L2, g, lo, hi, 2.0, 10, 8, &out.breakdown);
    for (std::size_t i = first; i < out.breakdown.size(); ++i) {
      out.breakdown[i].budget *= std::abs(out.breakdown[i].weight);
      out.budget += out.breakdown[i].budget;
    }
  }
  out.total = out.discrete + out.continuous;
  return out;
}

// ---------------------------------------------------------------------------

void VerificationReport::settle() {
  residual = std::abs(lhs - rhs);
  pass = residual <= budget;
}

void write_json(std::ostream& out, const std::vector<VerificationReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const VerificationReport& r : reports) {
    nlohmann::ordered_json j;
    j["name"] = r.name;
    j["lhs_re"] = r.lhs.real();
    j["lhs_im"] = r.lhs.imag();
    j["rhs_re"] = r.rhs.real();
    j["rhs_im"] = r.rhs.imag();
    j["residual"] = r.residual;
    j["budget"] = r.budget;
    j["pass"] = r.pass;
    j["runtime_s"] = r.runtime;
    if (!r.warning.empty()) j["warning"] = r.warning;
    arr.push_back(j);
  }
  out << arr.dump(2) << '\n';
}

void write_csv(std::ostream& out, const std::vector<VerificationReport>& reports) {
  out << "name,lhs_re,lhs_im,rhs_re,rhs_im,residual,budget,pass,runtime_s\n";
  char buf[512];
  for (const VerificationReport& r : reports) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.6e,%.6e,%d,%.3f\n", r.name.c_str(),
                  r.lhs.real(), r.lhs.imag(), r.rhs.real(), r.rhs.imag(), r.residual, r.budget,
                  r.pass ? 1 : 0, r.runtime);
    out << buf;
  }
}

// ---------------------------------------------------------------------------

VerificationReport kuznetsov_residual(u64 n1, u64 n2, const SpectralWindow& k,
                                      const SpectralDataset& dataset) {
  if (n1 == 0 || n2 == 0) throw DomainError("kuznetsov_residual: n1, n2 must be positive");
  k.validate();
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.name = "kuznetsov(" + std::to_string(n1) + "," + std::to_string(n2) + ")";
  if (k.amplitude == 0.0) {
    rep.settle();
    rep.runtime = seconds_since(t0);
    return rep;
  }
  const double dn1 = static_cast<double>(n1), dn2 = static_cast<double>(n2);

  // Spectral side.
  double discrete_abs = 0.0;
  for (const GL2SpectralDatum& d : dataset.items) {
    const double term = k(d.t) * d.omega * d.lambda_at(n1) * d.lambda_at(n2);
    rep.lhs += term;
    discrete_abs += std::abs(term);
  }
  QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-15;
  const QuadResult cont = integrate(
      [&](double t) { return omega_over_4pi(t) * k(t) * (tau_it(n1, t) * tau_it(n2, t)).real(); },
      0.0, k.t_max(), spec);
  rep.lhs += 2.0 * cont.value.real();
  double budget = 2.0 * cont.err;

  // Forms above the declared height: density t/12, omega_j <= 4 pi (1 + log(1 + t)),
  // |lambda_j(n)| <= d(n) n^{7/64}.
  const double height = std::max(dataset.declared_height, dataset.completeness_height);
  const double lam = static_cast<double>(divisor_count(n1) * divisor_count(n2)) *
                     std::pow(dn1 * dn2, 7.0 / 64.0);
  if (height < k.t_max()) {
    const QuadResult tail = integrate(
        [&](double t) { return k(t) * (t / 12.0 + 1.0) * 4.0 * kPi * (1.0 + std::log1p(t)) * lam; },
        height, k.t_max() + 10.0 * k.M, spec);
    budget += tail.value.real();
  }
  budget += 4.0 * discrete_abs * std::pow(10.0, -dataset.data_precision);

  // Geometric side.
  if (n1 == n2) rep.rhs += 0.5 * h_const(k);
  const BesselTransform H(k);
  const double g = static_cast<double>(std::gcd(n1, n2));
  const double x0 = 4.0 * kPi * std::sqrt(dn1 * dn2);
  cplx sum = 0.0;
  double sum_abs = 0.0;
  u64 c = 1;
  const u64 c_cap = 1u << 14;
  double tail = 0.0;
  for (u64 block = 64;; block *= 2) {
    double slope = 0.0;
    for (; c <= block; ++c) {
      const double x = x0 / static_cast<double>(c);
      const cplx hp = H.plus(x), hm = H.minus(x);
      const double sp = kloosterman(static_cast<long long>(n1), static_cast<long long>(n2), c);
      const double sm = kloosterman(static_cast<long long>(n1), -static_cast<long long>(n2), c);
      const cplx term = (sp * hp + sm * hm) / static_cast<double>(c);
      sum += term;
      sum_abs += std::abs(term);
      if (2 * c > block) slope = std::max(slope, (std::abs(hp) + std::abs(hm)) / x);
    }
    // |H(x)| <= slope x below the last block, and |S(m, n; c)| <= d(c) sqrt(g c):
    // sum_{c > C} d(c) c^{-3/2} <= 2 (log C + 2.2) / sqrt C.
    const double C = static_cast<double>(block);
    tail = slope * x0 * std::sqrt(g) * 2.0 * (std::log(C) + 2.2) / std::sqrt(C);
    if (tail < 1e-10 || block >= c_cap) break;
  }
  rep.rhs += sum;
  budget += tail + 1e-9 * sum_abs + 1e-12;
  rep.budget = budget;
  rep.settle();
  if (budget > 0.1 * std::max(std::abs(rep.lhs), std::abs(rep.rhs))) {
    rep.warning = "budget dominates: data does not decide the identity";
  }
  rep.runtime = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

struct RPlan {
  std::vector<u64> r;
  std::vector<double> skipped_bound;  // |H| samples of the r left out
  std::vector<u64> skipped;
  double peak = 0.0;
};

// The r for which H(4 pi sqrt(N x)/r), x in [a, b], is not negligible.
RPlan plan_r(double N, int sign, const BesselTransform& H, const WindowFunction& w, u64 force_r) {
  RPlan plan;
  if (force_r > 0) {
    plan.r.push_back(force_r);
    return plan;
  }
  std::vector<double> smax;
  const int samples = 7;
  int quiet = 0;
  for (u64 r = 1;; ++r) {
    const double D = std::sqrt(N) / static_cast<double>(r);
    double m = 0.0;
    for (int i = 0; i < samples; ++i) {
      const double x = w.a() + (w.b() - w.a()) * i / (samples - 1);
      m = std::max(m, std::abs(H(sign, 4.0 * kPi * D * std::sqrt(x))));
    }
    smax.push_back(m);
    plan.peak = std::max(plan.peak, m);
    quiet = (m < 1e-10 * plan.peak) ? quiet + 1 : 0;
    if (quiet >= 3 && r > 4) break;
    if (r >= 4096) throw DomainError("s_pm: r-range does not close");
  }
  for (std::size_t i = 0; i < smax.size(); ++i) {
    if (smax[i] >= 1e-8 * plan.peak) {
      plan.r.push_back(i + 1);
    } else {
      plan.skipped.push_back(i + 1);
      plan.skipped_bound.push_back(smax[i]);
    }
  }
  return plan;
}

// Left-out r: the sampled |H| bounds each term; |S(n1, 1; q)| <= d(q) sqrt q.
double truncation_bound(const RPlan& plan, double N) {
  double left = 0.0;
  for (std::size_t i = 0; i < plan.skipped.size(); ++i) {
    const double r = static_cast<double>(plan.skipped[i]);
    left += 10.0 * plan.skipped_bound[i] * N * std::pow(std::log(2.0 * N + 2.0), 3) * std::sqrt(r) *
            static_cast<double>(divisor_count(plan.skipped[i]));
  }
  return left;
}


// sum_{m = b mod q, m >= 1} d3(m) m^{-s} for b = 0..q-1.
std::vector<cplx> d3_progressions(cplx s, u64 q) {
  std::vector<cplx> hz(q);
  const cplx qs = std::exp(-s * std::log(static_cast<double>(q)));
  for (u64 b = 1; b <= q; ++b) hz[b - 1] = qs * hurwitz_zeta(s, static_cast<double>(b) / q);
  std::vector<cplx> out(q, 0.0);
  for (u64 i = 1; i <= q; ++i) {
    for (u64 j = 1; j <= q; ++j) {
      const cplx ij = hz[i - 1] * hz[j - 1];
      for (u64 k = 1; k <= q; ++k) out[(i * j * k) % q] += ij * hz[k - 1];
    }
  }
  return out;
}

// Dirichlet series of the Kloosterman side at modulus r for divisor3:
//   sum_{n2 | r} n2^{1-2s} sum_{n1} A(n1, n2) S(n1, a; r/n2) n1^{-s},
// with A(n1, n2) = sum_{d | (n1, n2)} mu(d) d3(n1/d) d3(n2/d).
cplx kloosterman_series(cplx s, u64 r, int a) {
  cplx total = 0.0;
  for (u64 n2 = 1; n2 <= r; ++n2) {
    if (r % n2) continue;
    const u64 q = r / n2;
    std::vector<double> S(q);
    for (u64 b = 0; b < q; ++b) S[b] = kloosterman(static_cast<long long>(b), a, q);
    const std::vector<cplx> prog = d3_progressions(s, q);
    cplx inner = 0.0;
    for (u64 d = 1; d <= n2; ++d) {
      if (n2 % d) continue;
      int mu = 1;
      for (const auto& [p, e] : factorize(d)) mu = e > 1 ? 0 : -mu;
      if (mu == 0) continue;
      const cplx ds = std::exp(-s * std::log(static_cast<double>(d)));
      // n1 = d m runs over the class b = d m mod q.
      cplx sum_m = 0.0;
      for (u64 m0 = 0; m0 < q; ++m0) sum_m += S[(d * m0) % q] * prog[m0];
      inner += static_cast<double>(mu) * static_cast<double>(d3(n2 / d)) * ds * sum_m;
    }
    total += std::exp((1.0 - 2.0 * s) * std::log(static_cast<double>(n2))) * inner;
  }
  return total;
}

// Res_{s=1} N^s w~+-(s) Z_r(s) / r on |s - 1| = 1/2, with the difference
// between 64 and 128 nodes as its error.
std::pair<cplx, double> kloosterman_polar(double N, u64 r, int a, const TwistedHankel& tw,
                                          double bandwidth, double wa, double wb) {
  const MellinTable wt([&](double x) { return tw.weight(x); }, wa, wb, 1.0, bandwidth);
  auto integrand = [&](double theta) {
    const cplx z = 0.5 * std::polar(1.0, theta);
    const cplx s = 1.0 + z;
    return std::exp(s * std::log(N)) * wt(s) * kloosterman_series(s, r, a) * z;
  };
  cplx coarse = 0.0, fine = 0.0;
  const int K = 64;
  for (int k = 0; k < 2 * K; ++k) {
    const cplx v = integrand(kPi * k / K);
    fine += v;
    if (k % 2 == 0) coarse += v;
  }
  fine /= 2.0 * K * static_cast<double>(r);
  coarse /= static_cast<double>(K) * static_cast<double>(r);
  return {fine, 2.0 * std::abs(fine - coarse) + 1e-14 * std::abs(fine)};
}

void check_pm_args(double N, const WindowFunction& w, const GL3Form& form) {
  if (!(N >= 1.0)) throw DomainError("s_pm: N must be at least 1");
  if (N > 1e6) throw DomainError("s_pm: N above 1e6 exceeds the desk-scale cost guard");
  form.validate();
  const u64 need = static_cast<u64>(std::floor(w.b() * N));
  if (!form.provider.covers(need)) {
    throw DataRangeError("s_pm: coefficients needed up to n = " + std::to_string(need),
                         static_cast<double>(need));
  }
}

}  // namespace

PmSum s_pm_direct(double N, int sign, const SpectralWindow& k, cplx u, const GL3Form& form,
                  const WindowFunction& w, u64 force_r) {
  check_pm_args(N, w, form);
  sign = sign > 0 ? 1 : -1;
  PmSum out;
  if (w.is_zero() || k.amplitude == 0.0) return out;
  const BesselTransform H(k, u, form);
  const RPlan plan = plan_r(N, sign, H, w, force_r);
  double mag = 0.0;
  for (u64 r : plan.r) {
    out.r_max = std::max(out.r_max, r);
    const double D = std::sqrt(N) / static_cast<double>(r);
    cplx sum_r = 0.0;
    for (u64 n2 = 1; n2 <= r; ++n2) {
      if (r % n2) continue;
      const u64 q = r / n2;
      const double m2 = static_cast<double>(n2 * n2);
      const u64 lo = static_cast<u64>(std::ceil(w.a() * N / m2));
      const u64 hi = static_cast<u64>(std::floor(w.b() * N / m2));
      for (u64 n1 = std::max<u64>(lo, 1); n1 <= hi; ++n1) {
        const double x = static_cast<double>(n1) * m2 / N;
        const double wx = w(x);
        if (wx == 0.0) continue;
        const double a = form.A(n1, n2);
        if (a == 0.0) continue;
        const double s = kloosterman(static_cast<long long>(n1), sign, q);
        if (s == 0.0) continue;
        const cplx term = static_cast<double>(n2) * a * s * wx * std::exp(-u * std::log(x)) *
                          H(sign, 4.0 * kPi * D * std::sqrt(x));
        sum_r += term;
        mag += std::abs(term) / static_cast<double>(r);
        ++out.terms;
      }
    }
    out.value += sum_r / static_cast<double>(r);
  }
  out.budget = 1e-9 * mag;
  out.truncation = truncation_bound(plan, N);
  return out;
}

PmSum s_pm_voronoi(double N, int sign, const SpectralWindow& k, cplx u, const GL3Form& form,
                   const WindowFunction& w, double n_cut_mult, u64 force_r) {
  check_pm_args(N, w, form);
  sign = sign > 0 ? 1 : -1;
  PmSum out;
  if (w.is_zero() || k.amplitude == 0.0) return out;
  const BesselTransform H(k, u, form);
  const RPlan plan = plan_r(N, sign, H, w, force_r);
  double mag = 0.0, edge = 0.0;
  for (u64 r : plan.r) {
    out.r_max = std::max(out.r_max, r);
    const double dr = static_cast<double>(r);
    const double D = std::sqrt(N) / dr;
    const TwistedHankel tw(sign, D, H, w, form);
    // W+-(y) is negligible once 2 pi (a |y|)^{1/3} passes the bandwidth of w+-.
    const double bw = H.log_bandwidth(D) + std::abs(u.imag()) + 100.0;
    const double y_cut = std::pow(bw / kTwoPi, 3) / w.a();
    const u64 n_cut = std::max<u64>(1, static_cast<u64>(std::ceil(n_cut_mult * y_cut * dr * dr * dr / N)));
    if (!form.provider.covers(n_cut)) {
      throw DataRangeError("s_pm_voronoi: coefficients needed up to n = " + std::to_string(n_cut),
                           static_cast<double>(n_cut));
    }
    const std::vector<double> a = form.provider.a1_table(n_cut);
    cplx sum_r = 0.0;
    double edge_r = 0.0;
    for (u64 n = 1; n <= n_cut; ++n) {
      if (a[n] == 0.0) continue;
      const double y = N * static_cast<double>(n) / (dr * dr * dr);
      const cplx twist = e_of(-sign * static_cast<double>(n % r) / dr);
      const cplx term = a[n] * (twist * tw.W(y) + std::conj(twist) * tw.W(-y));
      sum_r += term;
      mag += N * std::abs(term) / (dr * dr);
      if (10 * n > 9 * n_cut) edge_r += std::abs(term);
      ++out.terms;
    }
    out.value += 0.5 * N * sum_r / (dr * dr);
    edge += 0.5 * N * edge_r / (dr * dr);
    if (form.provider.kind() == ProviderKind::divisor3) {
      const auto [p, err] = kloosterman_polar(N, r, sign, tw, H.log_bandwidth(D) + std::abs(u.imag()),
                                              w.a(), w.b());
      out.polar += p;
      out.polar_bound += err;
    }
  }
  out.value += out.polar;
  out.budget = 0.5 * 1e-9 * mag + edge + out.polar_bound;
  out.truncation = truncation_bound(plan, N);
  return out;
}

// ---------------------------------------------------------------------------

double large_sieve_ratio(const std::vector<cplx>& a, double T) {
  if (!(T > 0.0)) throw DomainError("large_sieve_ratio: T must be positive");
  double num = 0.0, den = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) {
    if (a[m] == 0.0) continue;
    den += (T + static_cast<double>(m + 1)) * std::norm(a[m]);
    num += 2.0 * T * std::norm(a[m]);
    for (std::size_t n = 0; n < m; ++n) {
      if (a[n] == 0.0) continue;
      const double l = std::log(static_cast<double>(m + 1) / static_cast<double>(n + 1));
      // a_m conj(a_n) (m/n)^{it} plus its conjugate, integrated over [-T, T].
      num += 2.0 * (a[m] * std::conj(a[n])).real() * 2.0 * std::sin(T * l) / l;
    }
  }
  return den == 0.0 ? 0.0 : num / den;
}

EndgameEnvelope endgame_envelope(double N, const SpectralWindow& k, int sign) {
  k.validate();
  const double T = k.T, M = k.M, e = kEnvelopeEps;
  if (!(N > 0.0)) throw DomainError("endgame_envelope: N must be positive");
  if (N > std::pow(T, 3.0 + e)) throw DomainError("endgame_envelope: N exceeds T^{3+eps}");
  EndgameEnvelope out;
  EndgameRange& g = out.range;
  g.sign = sign > 0 ? 1 : -1;
  const double sN = std::sqrt(N);
  g.U = T / std::pow(M, 1.0 - e);
  out.empty = g.U <= std::pow(T, e);
  double shortened = 0.0;
  if (g.sign > 0) {
    g.R = sN / (std::pow(M, 1.0 - e) * T);
    g.N_len = sN;
    out.empty = out.empty || g.R <= 0.5;
    shortened = std::min(g.N_len, g.U * g.U * g.U / g.N_len);
    out.simplified = M * std::pow(T, e) * std::sqrt(sN / (M * T) + T / M) * std::pow(T / M, 0.75);
  } else {
    g.R = sN / T;
    const double n_max = sN / std::pow(M, 3.0 - e);
    out.empty = out.empty || n_max <= 0.5;
    // min{N, U^3/N} over N < n_max peaks at N = U^{3/2}.
    g.N_len = std::min(n_max, std::pow(g.U, 1.5));
    shortened = std::min(g.N_len, g.U * g.U * g.U / g.N_len);
    out.simplified = M * std::pow(T, e) * std::sqrt(sN / T + T / M) * std::sqrt(sN / (M * M * M));
  }
  out.bound = M * std::pow(T, e) * std::sqrt(g.R + g.U) * std::sqrt(shortened + g.U);
  return out;
}

std::vector<SecondMomentRow> second_moment_scan(const GL3Form& form, const std::vector<double>& U_values,
                                                double tail_tol) {
  std::vector<SecondMomentRow> rows;
  if (U_values.empty()) return rows;
  double U_max = 0.0;
  for (double U : U_values) {
    if (!(U >= 0.0)) throw DomainError("second_moment_scan: U must be nonnegative");
    if (U > 200.0) throw DomainError("second_moment_scan: U above 200 exceeds the cost guard");
    U_max = std::max(U_max, U);
  }
  const AfeTerms terms(form, afe_length(form, std::max(U_max, 1.0), 1.0, tail_tol));
  const GaussRule& rule = gauss_legendre_rule(8);
  // Segments between consecutive distinct U share their nodes across rows.
  std::vector<double> cuts(U_values);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::map<double, std::pair<double, double>> cumulative;  // U -> (value, budget)
  double acc = 0.0, acc_budget = 0.0, prev = 0.0;
  for (double U : cuts) {
    const int panels = std::max(1, static_cast<int>(std::ceil((U - prev) / 2.0)));
    const double h = (U - prev) / panels;
    for (int p = 0; p < panels && U > prev; ++p) {
      const double c = prev + (p + 0.5) * h;
      for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double t = c + 0.5 * h * rule.x[i];
        const AfeValue v = L_abs_sq(terms, form, t, 6.0, afe_length(form, t, 1.0, tail_tol));
        const double wt = 2.0 * 0.5 * h * rule.w[i];
        acc += wt * v.value;
        acc_budget += wt * (v.tail_bound + v.polar_bound);
      }
    }
    prev = U;
    cumulative[U] = {acc, acc_budget};
  }
  for (double U : U_values) {
    const auto [value, budget] = cumulative[U];
    rows.push_back({U, value, U > 0.0 ? value / std::pow(U, 1.5) : 0.0, budget});
  }
  return rows;
}

ScalingFit scaling_fit(const std::vector<ScalingPoint>& grid) {
  if (grid.size() < 4) throw DomainError("scaling_fit: need at least 4 grid points");
  const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ScalingPoint& p = grid[static_cast<std::size_t>(i)];
    if (!(p.T > 0.0 && p.M > 0.0 && p.value > 0.0)) {
      throw DomainError("scaling_fit: T, M and values must be positive");
    }
    X(i, 0) = 1.0;
    X(i, 1) = std::log(p.T);
    X(i, 2) = std::log(p.M);
    y(i) = std::log(p.value);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < 3) throw DomainError("scaling_fit: degenerate design (T and M not independent)");
  const Eigen::Vector3d c = qr.solve(y);
  ScalingFit fit;
  fit.log_c = c(0);
  fit.exponent_T = c(1);
  fit.exponent_M = c(2);
  fit.residual = std::sqrt((X * c - y).squaredNorm() / static_cast<double>(n));
  return fit;
}

}  // namespace gl3lab
