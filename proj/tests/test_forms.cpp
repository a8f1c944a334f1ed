#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "gl3lab/errors.hpp"
#include "gl3lab/forms.hpp"
#include "gl3lab/window.hpp"

using namespace gl3lab;

namespace {

u64 d3_brute(u64 n) {
  u64 count = 0;
  for (u64 a = 1; a <= n; ++a) {
    if (n % a) continue;
    for (u64 b = 1; b <= n / a; ++b) {
      if ((n / a) % b == 0) ++count;
    }
  }
  return count;
}

std::vector<u64> primes_upto(u64 n) {
  std::vector<u64> out;
  for (u64 p = 2; p <= n; ++p) {
    if (is_prime(p)) out.push_back(p);
  }
  return out;
}

// Multiplicative Hecke eigenvalues from Satake angles: lambda(p^k) = U_k(cos theta_p).
std::vector<double> synthetic_lambda(u64 n_max, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 3.14159);
  std::map<u64, double> theta;
  for (u64 p : primes_upto(n_max)) theta[p] = angle(rng);
  std::vector<double> lam(n_max);
  for (u64 n = 1; n <= n_max; ++n) {
    double v = 1.0;
    for (auto [p, k] : factorize(n)) v *= std::sin((k + 1) * theta[p]) / std::sin(theta[p]);
    lam[n - 1] = v;
  }
  return lam;
}

CoefficientProvider random_sym_square(u64 bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lam(-2.0, 2.0);
  std::map<u64, double> lp;
  for (u64 p : primes_upto(bound)) lp[p] = lam(rng);
  return CoefficientProvider::sym_square(lp, 7.5);
}

}  // namespace

TEST_CASE("d3 values") {
  CHECK(d3(1) == 1);
  CHECK(d3(6) == 9);
  CHECK(d3(8) == 10);
  for (u64 n = 1; n <= 300; ++n) CHECK(d3(n) == d3_brute(n));
  CHECK_THROWS_AS(d3(0), DomainError);
  CHECK_THROWS_AS(d3((u64{1} << 48) + 1), DomainError);
  CHECK(d3(u64{1} << 48) == 49 * 50 / 2);
}

TEST_CASE("d3 multiplicativity on random coprime pairs") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<u64> pick(1, 200000);
  int tested = 0;
  while (tested < 200) {
    const u64 m = pick(rng), n = pick(rng);
    if (std::gcd(m, n) != 1) continue;
    CHECK(d3(m * n) == d3(m) * d3(n));
    ++tested;
  }
}

TEST_CASE("divisor3 provider") {
  const GL3Form f = eisenstein_form();
  CHECK(f.A(1, 1) == 1.0);
  for (u64 p : {2, 3, 5, 97, 7919}) CHECK(f.A(1, p) == 3.0);
  const auto table = f.provider.a1_table(10000);
  for (u64 n = 1; n <= 10000; ++n) {
    REQUIRE(table[n] == static_cast<double>(d3(n)));
  }
  for (u64 n = 1; n <= 2000; n += 7) CHECK(f.A(1, n) == static_cast<double>(d3(n)));
  // A(p, p) = s_{(2,1)}(1, 1, 1) = 8.
  CHECK(f.A(2, 2) == 8.0);
}

TEST_CASE("Hecke relations and symmetry for every provider") {
  std::mt19937_64 rng(11);
  const std::vector<CoefficientProvider> providers = {CoefficientProvider::divisor3(),
                                                      random_sym_square(60, rng)};
  for (const auto& c : providers) {
    for (u64 m = 1; m <= 30; ++m) {
      for (u64 n = 1; n <= 30; ++n) {
        CHECK(c.A(m, n) == doctest::Approx(c.A(n, m)).epsilon(1e-12));
        // A(m,1) A(1,n) = sum_{d | (m,n)} A(m/d, n/d)
        double rhs = 0.0;
        const u64 g = std::gcd(m, n);
        for (u64 d = 1; d <= g; ++d) {
          if (g % d == 0) rhs += c.A(m / d, n / d);
        }
        CHECK(c.A(m, 1) * c.A(1, n) == doctest::Approx(rhs).epsilon(1e-10).scale(10.0));
      }
    }
  }
}

TEST_CASE("sym-square provider") {
  std::map<u64, double> ones;
  for (u64 p : primes_upto(50)) ones[p] = 1.0;
  const auto c = CoefficientProvider::sym_square(ones, 3.0);
  CHECK(c.A(1, 7) == 0.0);
  CHECK(c.prime_bound() == 47);
  CHECK_THROWS_AS(c.A(1, 53), DataRangeError);
  CHECK_THROWS_AS(c.a1_table(60), DataRangeError);
  CHECK_NOTHROW(c.a1_table(52));
  CHECK(c.covers(47 * 43));
  CHECK_FALSE(c.covers(2 * 53));

  // Satake (alpha^2, 1, alpha^-2) with lambda_p = alpha + 1/alpha = 2 cos theta.
  const double theta = 0.7;
  const auto c2 = CoefficientProvider::sym_square({{2, 2.0 * std::cos(theta)}}, 1.0);
  for (int k = 0; k <= 6; ++k) {
    double direct = 0.0;  // complete homogeneous symmetric polynomial h_k
    for (int i = 0; i <= k; ++i) {
      for (int j = 0; i + j <= k; ++j) {
        const int l = k - i - j;
        direct += std::cos(2.0 * theta * (i - l));
      }
    }
    CHECK(c2.prime_power(2, k) == doctest::Approx(direct).epsilon(1e-12));
  }

  std::map<u64, double> gap = {{2, 1.0}, {5, 1.0}};
  CHECK_THROWS_AS(CoefficientProvider::sym_square(gap, 1.0), InvariantError);
}

TEST_CASE("tau_it") {
  CHECK(tau_it(1, 3.3) == cplx(1.0));
  for (double t : {0.0, 1.5, 17.0}) {
    CHECK(tau_it(7, t).real() == doctest::Approx(2.0 * std::cos(t * std::log(7.0))));
  }
  CHECK(tau_it(12, 0.0).real() == doctest::Approx(6.0));
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<u64> pick(1, 5000);
  std::uniform_real_distribution<double> tt(-50.0, 50.0);
  for (int i = 0; i < 100; ++i) {
    const u64 n = pick(rng);
    const double t = tt(rng);
    CHECK(tau_it(n, t).imag() == 0.0);
    CHECK(tau_it(n, t).real() == doctest::Approx(tau_it(n, -t).real()).epsilon(1e-12));
    // Direct sum over ordered factorizations.
    cplx direct = 0.0;
    for (u64 a = 1; a <= n; ++a) {
      if (n % a == 0) direct += std::polar(1.0, t * std::log(static_cast<double>(a) / (n / a)));
    }
    CHECK(std::abs(tau_it(n, t) - direct) < 1e-10 * std::max(1.0, std::abs(direct)));
  }
  CHECK(tau_it(60, 0.0).real() == doctest::Approx(static_cast<double>(divisor_count(60))));
}

TEST_CASE("rankin_partial") {
  const GL3Form f = eisenstein_form();
  CHECK(rankin_partial(f, 1.0) == 1.0);
  double brute = 0.0;
  for (u64 n = 1; n <= 100; ++n) brute += static_cast<double>(d3(n) * d3(n));
  CHECK(rankin_partial(f, 100.0) == doctest::Approx(brute / 100.0).epsilon(1e-14));
  for (double X : {3.0, 50.5, 999.0}) CHECK(rankin_partial(f, X) >= 1.0 / X);
  CHECK_THROWS_AS(rankin_partial(f, 0.5), DomainError);
}

TEST_CASE("spectral file: header only") {
  std::istringstream in("#gl2 completeness=9.5 precision=12\n# comment\n");
  const SpectralDataset d = parse_spectral(in);
  CHECK(d.items.empty());
  CHECK(d.completeness_height == 0.0);
  CHECK(d.declared_height == 9.5);
  CHECK(d.data_precision == 12);
}

TEST_CASE("spectral file: Hecke violation is rejected") {
  std::mt19937_64 rng(1);
  auto lam = synthetic_lambda(12, rng);
  lam[5] += 1e-3;  // lambda(6)
  std::ostringstream os;
  os.precision(17);
  os << "#gl2 completeness=20 precision=10\nform t=13.7 omega=0.5\n";
  for (std::size_t n = 0; n < lam.size(); ++n) os << n + 1 << ' ' << lam[n] << '\n';
  std::istringstream in(os.str());
  try {
    parse_spectral(in);
    FAIL("expected InvariantError");
  } catch (const InvariantError& e) {
    CHECK(std::string(e.what()).find("lambda(2)lambda(3)") != std::string::npos);
  }
}

TEST_CASE("spectral file: parse errors carry line numbers") {
  auto line_of = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_spectral(in);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("form t=1 omega=1\n") == 1);
  CHECK(line_of("#gl2 completeness=1 precision=8\nform t=x omega=1\n") == 2);
  CHECK(line_of("#gl2 completeness=1 precision=8\nform t=3 omega=1\n1 1\n3 0.5\n") == 4);
  CHECK(line_of("#gl2 completeness=1\n") == 1);
  CHECK(line_of("#gl2 completeness=1 precision=8\n1 1\n") == 2);
  CHECK(line_of("") == 0);
}

TEST_CASE("spectral file: round trip over generated files") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    SpectralDataset d;
    d.data_precision = 12;
    const int forms = 1 + trial % 4;
    double t = 9.0;
    for (int j = 0; j < forms; ++j) {
      GL2SpectralDatum f;
      t += 1.0 + 5.0 * u(rng);
      f.t = t;
      f.omega = 0.1 + u(rng);
      f.lambda = synthetic_lambda(10 + 7 * trial, rng);
      d.items.push_back(f);
    }
    d.declared_height = t + 1.0;
    std::ostringstream a;
    serialize_spectral(d, a);
    // Shuffle the forms and add noise lines: parsing must normalize.
    std::ostringstream noisy;
    noisy.precision(17);
    noisy << "# generated\n" << "#gl2 completeness=" << d.declared_height << " precision=12\n";
    for (int j = forms - 1; j >= 0; --j) {
      std::ostringstream one;
      SpectralDataset single;
      single.items = {d.items[j]};
      serialize_spectral(single, one);
      std::string body = one.str();
      body = body.substr(body.find('\n') + 1);
      noisy << "\n#note x\n" << body;
    }
    std::istringstream in(noisy.str());
    const SpectralDataset back = parse_spectral(in);
    std::ostringstream b;
    serialize_spectral(back, b);
    CHECK(a.str() == b.str());
    CHECK(back.completeness_height == doctest::Approx(t));
    CHECK(back.hecke_residual < 1e-12);
  }
}

TEST_CASE("coefficient file") {
  std::ostringstream os;
  os.precision(17);
  os << "#gl3 mu=2.5 precision=10\n#source synthetic\n";
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> lam(-2.0, 2.0);
  for (u64 p : primes_upto(40)) {
    const double a = lam(rng) * lam(rng);
    os << p << ' ' << a << ' ' << a * a - a << '\n';
  }
  std::istringstream in(os.str());
  const GL3Form f = parse_coefficients(in);
  CHECK(f.mu == cplx(0.0, 2.5));
  CHECK(f.provider.kind() == ProviderKind::file);
  CHECK(f.provider.prime_bound() == 37);
  CHECK_THROWS_AS(f.A(1, 41), DataRangeError);
  CHECK_NOTHROW(f.A(1, 37 * 37));

  std::ostringstream a;
  serialize_coefficients(f, a);
  std::istringstream in2(a.str());
  std::ostringstream b;
  serialize_coefficients(parse_coefficients(in2), b);
  CHECK(a.str() == b.str());

  std::istringstream bad("#gl3 mu=0 precision=6\n2 1.0 5.0\n");
  CHECK_THROWS_AS(parse_coefficients(bad), InvariantError);
  std::istringstream gap("#gl3 mu=0 precision=6\n2 1 0\n5 1 0\n");
  CHECK_THROWS_AS(parse_coefficients(gap), InvariantError);
  std::istringstream notprime("#gl3 mu=0 precision=6\n4 1 0\n");
  CHECK_THROWS_AS(parse_coefficients(notprime), ParseError);
}
