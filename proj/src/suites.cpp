#include "gl3lab/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "gl3lab/errors.hpp"

namespace gl3lab {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Keeps the report with the largest residual relative to its budget.
void keep_worst(VerificationReport& worst, VerificationReport r) {
  const auto score = [](const VerificationReport& x) {
    return x.budget > 0.0 ? x.residual / x.budget : (x.residual > 0.0 ? INFINITY : 0.0);
  };
  if (worst.name.empty() || score(r) > score(worst)) worst = std::move(r);
}

cplx gamma_of(cplx z) { return std::exp(log_gamma(z)); }

// Mirrors the stationary-phase choice of u for a window centred at x0.
cplx stationary_u(double y, double x0) {
  return cplx(0.0, (y > 0 ? 1.0 : -1.0) * kTwoPi * std::cbrt(x0 * std::abs(y)));
}

}  // namespace

VerificationReport bound_report(const std::string& name, double value, double bound) {
  VerificationReport r;
  r.name = name;
  r.lhs = value;
  r.rhs = bound;
  r.residual = std::max(0.0, value - bound);
  r.budget = 0.0;
  r.pass = value <= bound;
  return r;
}

VerificationReport match_report(const std::string& name, cplx lhs, cplx rhs, double rel_tol, double abs_tol) {
  VerificationReport r;
  r.name = name;
  r.lhs = lhs;
  r.rhs = rhs;
  r.budget = rel_tol * std::abs(rhs) + abs_tol;
  r.settle();
  return r;
}

void scale_budgets(std::vector<VerificationReport>& reports, double tol_scale) {
  if (!(tol_scale > 0.0)) throw DomainError("tol-scale must be positive");
  for (VerificationReport& r : reports) {
    r.budget *= tol_scale;
    r.pass = r.residual <= r.budget;
  }
}

// ---------------------------------------------------------------------------

std::vector<VerificationReport> specfun_checks(const SuiteConfig& cfg) {
  std::vector<VerificationReport> out;
  auto t0 = Clock::now();
  out.push_back(match_report("log_gamma(1)", log_gamma(1.0), 0.0, 0.0, 1e-13));
  out.push_back(match_report("log_gamma(1/2)", log_gamma(0.5), 0.5 * std::log(kPi), 1e-13));
  out.push_back(match_report("log_gamma(4)", log_gamma(4.0), std::log(6.0), 1e-13));

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> re(0.1, 30.0), im(-40.0, 40.0);
  VerificationReport rec;
  for (int i = 0; i < 100; ++i) {
    const cplx z(re(rng), im(rng));
    const cplx g1 = gamma_of(z + 1.0);
    keep_worst(rec, match_report("gamma recurrence (worst of 100)", g1, z * gamma_of(z), 1e-10));
  }
  out.push_back(rec);

  std::uniform_real_distribution<double> re2(-5.0, 5.0), im2(-3.0, 3.0);
  VerificationReport refl;
  for (int n = 0; n < 100;) {
    const cplx z(re2(rng), im2(rng));
    if (std::abs(z.real() - std::round(z.real())) < 0.1 && std::abs(z.imag()) < 0.1) continue;
    ++n;
    keep_worst(refl, match_report("gamma reflection (worst of 100)",
                                  gamma_of(z) * gamma_of(1.0 - z) * std::sin(kPi * z) / kPi, 1.0, 1e-9));
  }
  out.push_back(refl);

  out.push_back(match_report("zeta(2)", zeta(2.0), kPi * kPi / 6.0, 1e-10));
  out.push_back(match_report("zeta(0)", zeta(0.0), -0.5, 1e-10));
  out.push_back(bound_report("|zeta| at the first zero", std::abs(zeta(cplx(0.5, 14.134725))), 1e-4));

  out.push_back(match_report("J_0(1)", bessel_j_imag_order(0.0, 1.0), 0.7651976866, 0.0, 1e-9));
  VerificationReport jr, jc;
  for (double t : {0.5, 2.0, 5.0}) {
    for (double x : {1.0, 5.0, 15.0}) {
      keep_worst(jr, match_report("J_{2it}: series against integral (worst of 9)",
                                  detail::j_scaled_by_series(t, x), detail::j_scaled_by_integral(t, x), 1e-8,
                                  1e-14));
      keep_worst(jc, match_report("J_{2it}: conjugate symmetry in t (worst of 9)", bessel_j_imag_order(-t, x),
                                  std::conj(bessel_j_imag_order(t, x)), 1e-12, 1e-300));
    }
  }
  out.push_back(jr);
  out.push_back(jc);

  out.push_back(match_report("K_0(1)", bessel_k_imag_order(0.0, 1.0), 0.4210244382, 0.0, 1e-9));
  VerificationReport kr, ke;
  QuadratureSpec spec;
  spec.rel_tol = 1e-13;
  spec.abs_tol = 1e-17;
  for (double t : {0.5, 2.0}) {
    for (double x : {0.5, 3.0, 15.0}) {
      // K_{2it}(x) = int_0^inf exp(-x cosh u) cos(2 t u) du.
      const double top = std::acosh(1.0 + 40.0 / x);
      const double oracle =
          integrate([&](double u) { return cplx(std::exp(-x * std::cosh(u)) * std::cos(2.0 * t * u)); }, 0.0,
                    top, spec)
              .value.real();
      const double k = bessel_k_imag_order(t, x);
      keep_worst(kr, match_report("K_{2it}: against the cosh integral (worst of 6)", k, oracle, 1e-8, 1e-16));
      keep_worst(ke, match_report("K_{2it}: even in t (worst of 6)", bessel_k_imag_order(-t, x), k, 0.0));
    }
  }
  out.push_back(kr);
  out.push_back(ke);
  out.push_back(bound_report("K_{2i}(50) below e^-45", std::abs(bessel_k_imag_order(1.0, 50.0)), std::exp(-45.0)));
  const double dt = since(t0) / out.size();
  for (VerificationReport& r : out) r.runtime = dt;
  return out;
}

std::vector<VerificationReport> gamma_layer_checks(const SuiteConfig& cfg) {
  std::vector<VerificationReport> out;
  const auto t0 = Clock::now();
  const GL3Form eis = eisenstein_form();
  out.push_back(match_report("gamma factor at s = 1", gamma_factor(1.0, eis), 1.0, 1e-13));
  out.push_back(match_report("gamma factor at s = 2", gamma_factor(2.0, eis), std::pow(kPi, -3.0), 1e-13));

  std::mt19937_64 rng(cfg.seed + 1);
  std::uniform_real_distribution<double> tau(-100.0, 100.0), tt(0.0, 60.0);
  VerificationReport unit;
  for (int i = 0; i < 100; ++i) {
    keep_worst(unit, match_report("|fe quotient| = 1 on Re s = 0 (worst of 100)",
                                  std::abs(fe_quotient(cplx(0.0, tau(rng)), tt(rng), cfg.form)), 1.0, 1e-10));
  }
  out.push_back(unit);

  std::uniform_real_distribution<double> sr(0.3, 0.7), si(-30.0, 30.0);
  VerificationReport fe;
  for (int i = 0; i < 20; ++i) {
    const cplx s(sr(rng), si(rng));
    const cplx a = gamma_factor(s, eis) * std::pow(zeta(s), 3);
    const cplx b = gamma_factor(1.0 - s, eis) * std::pow(zeta(1.0 - s), 3);
    keep_worst(fe, match_report("functional equation of zeta^3 (worst of 20)", a, b, 1e-8));
  }
  out.push_back(fe);
  const double dt = since(t0) / out.size();
  for (VerificationReport& r : out) r.runtime = dt;
  return out;
}

std::vector<VerificationReport> afe_decay_checks(const SuiteConfig& cfg) {
  // Constants of the (1 + y/t^3)^{-2} envelopes, fixed from the t = 5, 10, 20 sweep.
  constexpr double kCV = 1e-3, kCW = 1.0;
  std::vector<VerificationReport> out;
  const WindowFunction w;
  auto t0 = Clock::now();
  double mv = 0.0, mw = 0.0;
  for (double t : {5.0, 10.0, 20.0}) {
    const VKernel V(t, cfg.form);
    const WKernel W(t, cfg.form, w);
    for (int k = 0; k <= 10; ++k) {
      const double y = std::ldexp(t * t * t, k);
      const double env = std::pow(1.0 + std::ldexp(1.0, k), -2.0);
      mv = std::max(mv, std::abs(V(y)) / env);
      mw = std::max(mw, std::abs(W(y)) / env);
    }
  }
  out.push_back(bound_report("V decay envelope constant", mv, kCV));
  out.push_back(bound_report("W decay envelope constant", mw, kCW));
  out.back().runtime = out.front().runtime = 0.5 * since(t0);

  if (cfg.form.provider.kind() == ProviderKind::divisor3) {
    t0 = Clock::now();
    const AfeValue L = L_abs_sq(cfg.form, 10.0);
    VerificationReport r = match_report("|L(1/2 + 10i)|^2 against |zeta|^6", L.value,
                                        std::pow(std::abs(zeta(cplx(0.5, 10.0))), 6), 1e-3,
                                        L.tail_bound + L.polar_bound);
    r.runtime = since(t0);
    out.push_back(r);
  }
  return out;
}

std::vector<VerificationReport> dual_sum_checks(const SuiteConfig& cfg) {
  std::vector<VerificationReport> out;
  const WindowFunction w;
  // N on both sides of t^{3/2}: 125, 164, 253.
  for (auto [t, N] : {std::pair{25.0, 50.0}, {25.0, 400.0}, {30.0, 100.0}, {30.0, 300.0}, {40.0, 600.0}}) {
    const auto t0 = Clock::now();
    const DualSum d = fe_dual_sum(cfg.form, t, w, N);
    VerificationReport r;
    char name[96];
    std::snprintf(name, sizeof name, "dual sum t=%g N=%g", t, N);
    r.name = name;
    r.lhs = d.lhs;
    r.rhs = d.rhs + d.polar;
    r.budget = d.budget;
    r.settle();
    r.runtime = since(t0);
    out.push_back(r);
  }
  return out;
}

std::vector<VerificationReport> hankel_checks(const SuiteConfig& cfg) {
  std::vector<VerificationReport> out;
  auto t0 = Clock::now();
  GL3Form f = cfg.form;
  f.mu = 0.0;
  const BesselKernelExpansion e = calibrate_kernel(f, 3);
  out.push_back(bound_report("kernel fit residual at mu = 0", e.fit_residual, 1e-5));
  out.back().runtime = since(t0);

  t0 = Clock::now();
  const WindowFunction w;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  VerificationReport plus, minus;
  for (int i = 0; i < 30; ++i) {
    const double sg = i % 2 ? 1.0 : -1.0;
    const double y = sg * std::pow(10.0, 4.0 + 3.0 * unif(rng));
    const cplx u = stationary_u(y, 1.15 + 0.7 * unif(rng));
    VerificationReport r = match_report(sg > 0 ? "Hankel MB vs asymptotic, y > 0 (worst of 15)"
                                               : "Hankel MB vs asymptotic, y < 0 (worst of 15)",
                                        hankel_asym(y, w, u, e), hankel_mb(y, w, u, f), 1e-4);
    keep_worst(sg > 0 ? plus : minus, r);
  }
  plus.runtime = minus.runtime = 0.5 * since(t0);
  out.push_back(plus);
  out.push_back(minus);
  return out;
}

std::vector<VerificationReport> twist_support_checks(const SuiteConfig& cfg) {
  const double T = cfg.T.value_or(100.0), M = cfg.M.value_or(10.0);
  const SpectralWindow k{T, M, 1.0};
  const WindowFunction w;
  const GL3Form& f = cfg.form;
  const BesselTransform H(k, 0.0, f);
  const double scale = M * std::pow(T, 1.0 + kSupportEps);
  std::vector<VerificationReport> out;

  auto t0 = Clock::now();
  const SupportVerdict ex = support_check({2.0 * M * T, 2.0 * M * T, T, M}, 1);
  VerificationReport r = match_report("support: + example U = T^2/|X|", ex.in_support ? ex.U_window : 0.0,
                                      T / (2.0 * M), 1e-12);
  out.push_back(r);
  out.push_back(bound_report("support: - example with D = T/10 is out",
                             support_check({-0.01, T / 10.0, T, M}, -1).in_support ? 1.0 : 0.0, 0.0));

  // Envelope |W~| sqrt|y| <= C M T^{1+eps} on the stationary windows.
  double in_ref = 0.0;
  for (double D : {2.0 * M * T, 3.0 * M * T}) {
    const TwistedHankel tw(1, D, H, w, f);
    for (double c : {1.0, 1.1, 1.25, 1.4, 1.5}) {
      const double y = c * D * D * D;
      in_ref = std::max(in_ref, std::abs(tw.tilde(y)) * std::sqrt(y) / scale);
    }
  }
  for (double D : {T / 4.0, T / 2.0}) {
    const TwistedHankel tw(-1, D, H, w, f);
    for (double c : {1e-4, 1e-3}) {
      const double y = -c * D * D * D;
      in_ref = std::max(in_ref, std::abs(tw.tilde(y)) * std::sqrt(-y) / scale);
    }
  }
  out.push_back(bound_report("twisted transform envelope constant (in support)", in_ref, 1.0));
  out.back().runtime = since(t0);

  // Out of support (+): D below M^{1-eps} T.
  t0 = Clock::now();
  double out_max = 0.0;
  for (double D : {T / 4.0, T, 3.0 * T, 0.9 * std::pow(M, 1.0 - kSupportEps) * T}) {
    const TwistedHankel tw(1, D, H, w, f);
    for (double c : {0.5, 0.8, 1.0, 1.25, 1.5, 2.0}) {
      const double y = c * D * D * D;
      out_max = std::max(out_max, std::abs(tw.tilde(y)) * std::sqrt(y) / scale);
    }
  }
  out.push_back(bound_report("out-of-support / in-support magnitude", in_ref > 0.0 ? out_max / in_ref : INFINITY,
                             1e-6));
  out.back().runtime = since(t0);

  // Sandwich T^eps < U < T/M^{1-eps} over the whole supported region.
  t0 = Clock::now();
  int checked = 0, broken = 0;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < 400; ++i) {
    const int sign = i % 2 ? 1 : -1;
    const double D = sign > 0 ? std::pow(M, 1.0 - kSupportEps) * T * std::pow(40.0, unif(rng))
                              : T * std::pow(16.0, unif(rng) - 0.5);
    const double X = sign > 0 ? D * std::pow(16.0, unif(rng) - 0.5)
                              : -D / std::pow(M, 3.0 - kSupportEps) * std::pow(1e4, -unif(rng));
    if (std::abs(X) >= std::pow(T, 2.0 - kSupportEps)) continue;
    const SupportVerdict v = support_check({X, D, T, M}, sign);
    if (!v.in_support) continue;
    ++checked;
    if (!v.sandwich) ++broken;
  }
  VerificationReport s = bound_report("in-support verdicts outside the U sandwich", broken, 0.0);
  s.warning = std::to_string(broken) + " of " + std::to_string(checked);
  s.runtime = since(t0);
  out.push_back(s);
  return out;
}

std::vector<VerificationReport> keystone_checks(const std::vector<KeystoneTuple>& tuples, const SuiteConfig& cfg) {
  std::vector<VerificationReport> out;
  for (const KeystoneTuple& k : tuples) {
    const auto t0 = Clock::now();
    const SpectralWindow win{k.T, k.M, 1.0};
    const PmSum d = s_pm_direct(k.N, k.sign, win, 0.0, cfg.form);
    const PmSum v = s_pm_voronoi(k.N, k.sign, win, 0.0, cfg.form);
    VerificationReport r;
    char name[96];
    std::snprintf(name, sizeof name, "s_pm direct vs Voronoi N=%g T=%g M=%g %c", k.N, k.T, k.M,
                  k.sign > 0 ? '+' : '-');
    r.name = name;
    r.lhs = d.value;
    r.rhs = v.value;
    r.budget = d.budget + v.budget;
    r.settle();
    r.runtime = since(t0);
    out.push_back(r);
  }
  return out;
}

std::vector<VerificationReport> kuznetsov_checks(const SuiteConfig& cfg) {
  const SpectralWindow k{cfg.T.value_or(2.0), cfg.M.value_or(0.5), 1.0};
  std::vector<VerificationReport> out;
  for (u64 n1 = 1; n1 <= 4; ++n1) {
    for (u64 n2 = 1; n2 <= 4; ++n2) out.push_back(kuznetsov_residual(n1, n2, k, cfg.dataset));
  }
  return out;
}

std::vector<VerificationReport> large_sieve_checks(const SuiteConfig& cfg) {
  std::vector<VerificationReport> out;
  auto t0 = Clock::now();
  for (double T : {10.0, 100.0}) {
    out.push_back(match_report("large sieve, a = delta_1, T=" + std::to_string(static_cast<int>(T)),
                               large_sieve_ratio({1.0}, T), 2.0 * T / (T + 1.0), 1e-12));
    std::vector<cplx> a(100, 0.0);
    a.back() = 1.0;
    out.push_back(match_report("large sieve, a = delta_100, T=" + std::to_string(static_cast<int>(T)),
                               large_sieve_ratio(a, T), 2.0 * T / (T + 100.0), 1e-12));
  }
  std::mt19937_64 rng(cfg.seed);
  std::bernoulli_distribution coin(0.5);
  const GaussRule& rule = gauss_legendre_rule(32);
  double worst = 0.0;
  VerificationReport quad;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<cplx> a(100);
    for (cplx& x : a) x = coin(rng) ? 1.0 : -1.0;
    for (double T : {10.0, 100.0}) {
      const double r = large_sieve_ratio(a, T);
      worst = std::max(worst, r);
      if (trial % 25 != 0) continue;
      double num = 0.0, den = 0.0;
      for (double c = -T + 0.5; c < T; c += 1.0) {
        for (int i = 0; i < 32; ++i) {
          const double t = c + 0.5 * rule.x[i];
          cplx s = 0.0;
          for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * std::polar(1.0, t * std::log(n + 1.0));
          num += 0.5 * rule.w[i] * std::norm(s);
        }
      }
      for (std::size_t n = 0; n < a.size(); ++n) den += (T + n + 1.0) * std::norm(a[n]);
      keep_worst(quad, match_report("large sieve, closed form vs quadrature (worst of 16)", r, num / den, 1e-10));
    }
  }
  out.push_back(quad);
  out.push_back(bound_report("large sieve, max ratio over 200 random sign sequences", worst, 30.0));
  const double dt = since(t0) / out.size();
  for (VerificationReport& r : out) r.runtime = dt;
  return out;
}

std::vector<VerificationReport> envelope_checks(const SuiteConfig&) {
  // One constant for the whole sweep.
  constexpr double kC = 4.0;
  const auto t0 = Clock::now();
  double worst = 0.0;
  int points = 0;
  for (double T : {1e4, 1e5, 1e6, 1e7}) {
    for (double mexp : {0.2, 0.4}) {
      const double M = std::pow(T, mexp);
      const SpectralWindow k{T, M, 1.0};
      std::vector<double> Ns{std::pow(T / M, 3.0), std::pow(T, 3.0)};
      if (mexp < 0.3) Ns.push_back(std::pow(T, 1.5));
      for (double N : Ns) {
        double b = 0.0;
        for (int sign : {1, -1}) {
          const EndgameEnvelope e = endgame_envelope(N, k, sign);
          if (!e.empty) b = std::max(b, e.bound);
        }
        worst = std::max(worst, b / (std::pow(T, 1.25) / std::pow(M, 0.25)));
        ++points;
      }
    }
  }
  VerificationReport r = bound_report("endgame envelope / (T^{5/4} M^{-1/4}), " + std::to_string(points) + " points",
                                      worst, kC);
  r.runtime = since(t0);
  return {r};
}

std::vector<VerificationReport> second_moment_checks(const SuiteConfig& cfg) {
  const auto t0 = Clock::now();
  const std::vector<SecondMomentRow> rows = second_moment_scan(cfg.form, {10.0, 20.0, 40.0});
  std::vector<VerificationReport> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    out.push_back(bound_report("second moment / U^{3/2} at U=" + std::to_string(static_cast<int>(rows[i].U)) +
                                   " vs U=" + std::to_string(static_cast<int>(rows[i - 1].U)),
                               rows[i].ratio, rows[i - 1].ratio));
  }
  for (VerificationReport& r : out) r.runtime = since(t0) / out.size();
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"gamma", "afe", "voronoi", "kuznetsov", "twist-support",
                                              "large-sieve"};
  return names;
}

std::vector<VerificationReport> run_suite(const std::string& name, const SuiteConfig& cfg) {
  std::vector<VerificationReport> out;
  auto add = [&](std::vector<VerificationReport> v) { out.insert(out.end(), v.begin(), v.end()); };
  if (name == "all") {
    for (const std::string& n : suite_names()) add(run_suite(n, cfg));
    return out;
  }
  if (name == "gamma") {
    add(specfun_checks(cfg));
    add(gamma_layer_checks(cfg));
  } else if (name == "afe") {
    add(afe_decay_checks(cfg));
    add(dual_sum_checks(cfg));
  } else if (name == "voronoi") {
    add(hankel_checks(cfg));
    add(keystone_checks({{cfg.N.value_or(400.0), cfg.T.value_or(40.0), cfg.M.value_or(6.0), cfg.sign.value_or(1)}},
                        cfg));
  } else if (name == "kuznetsov") {
    add(kuznetsov_checks(cfg));
  } else if (name == "twist-support") {
    add(twist_support_checks(cfg));
  } else if (name == "large-sieve") {
    add(large_sieve_checks(cfg));
  } else {
    throw DomainError("unknown suite '" + name + "'");
  }
  scale_budgets(out, cfg.tol_scale);
  return out;
}

}  // namespace gl3lab
