#include "gl3lab/forms.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "gl3lab/errors.hpp"

namespace gl3lab {

std::vector<std::pair<u64, int>> factorize(u64 n) {
  if (n == 0) throw DomainError("factorize: n must be >= 1");
  std::vector<std::pair<u64, int>> out;
  for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    int k = 0;
    while (n % p == 0) {
      n /= p;
      ++k;
    }
    out.emplace_back(p, k);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  const auto f = factorize(n);
  return f.size() == 1 && f[0].second == 1;
}

u64 divisor_count(u64 n) {
  u64 d = 1;
  for (auto [p, k] : factorize(n)) d *= static_cast<u64>(k + 1);
  return d;
}

u64 d3(u64 n) {
  if (n == 0) throw DomainError("d3: n must be >= 1");
  if (n > (u64{1} << 48)) throw DomainError("d3: n beyond 2^48");
  u64 d = 1;
  for (auto [p, k] : factorize(n)) d *= static_cast<u64>((k + 1) * (k + 2) / 2);
  return d;
}

cplx tau_it(u64 n, double t) {
  if (n == 0) throw DomainError("tau_it: n must be >= 1");
  // Pair a with n/a: (a/b)^{it} + (b/a)^{it} = 2 cos(t log(a/b)).
  double sum = 0.0;
  for (u64 a = 1; a * a <= n; ++a) {
    if (n % a != 0) continue;
    const u64 b = n / a;
    if (a == b) {
      sum += 1.0;
    } else {
      sum += 2.0 * std::cos(t * std::log(static_cast<double>(b) / static_cast<double>(a)));
    }
  }
  return {sum, 0.0};
}

// ---------------------------------------------------------------------------
// CoefficientProvider

namespace {

// A(1, p^k) from a = A(1, p) through the Euler factor
// 1 / ((1 - alpha X)(1 - X)(1 - alpha^{-1} X)) with e1 = e2 = a, e3 = 1.
double euler_power(double a, int k) {
  double c0 = 1.0, c1 = a, c2 = a * a - a;
  if (k == 0) return c0;
  if (k == 1) return c1;
  for (int j = 3; j <= k; ++j) {
    const double c3 = a * c2 - a * c1 + c0;
    c0 = c1;
    c1 = c2;
    c2 = c3;
  }
  return c2;
}

u64 check_prime_sequence(const std::vector<u64>& primes) {
  u64 expect = 2;
  for (u64 p : primes) {
    if (p != expect) {
      throw InvariantError("coefficient data: prime " + std::to_string(expect) +
                           " missing (next listed is " + std::to_string(p) + ")");
    }
    expect = p + 1;
    while (!is_prime(expect)) ++expect;
  }
  return primes.empty() ? 1 : primes.back();
}

}  // namespace

CoefficientProvider CoefficientProvider::divisor3() { return CoefficientProvider{}; }

CoefficientProvider CoefficientProvider::sym_square(const std::map<u64, double>& lambda_p, double t0) {
  CoefficientProvider c;
  c.kind_ = ProviderKind::sym_square;
  c.t0_ = t0;
  std::vector<u64> primes;
  auto table = std::make_shared<std::map<u64, double>>();
  for (auto [p, lam] : lambda_p) {
    primes.push_back(p);
    const double a = lam * lam - 1.0;
    (*table)[p] = a;
    c.hecke_bound_ratio_ = std::max(c.hecke_bound_ratio_, std::abs(a) / std::pow(p, 7.0 / 32.0));
  }
  c.prime_bound_ = check_prime_sequence(primes);
  c.a1p_ = std::move(table);
  return c;
}

CoefficientProvider CoefficientProvider::from_table(
    const std::map<u64, std::pair<double, double>>& rows, int precision) {
  CoefficientProvider c;
  c.kind_ = ProviderKind::file;
  c.precision_ = precision;
  std::vector<u64> primes;
  auto table = std::make_shared<std::map<u64, double>>();
  const double tol = 10.0 * std::pow(10.0, -precision);
  for (auto [p, ab] : rows) {
    primes.push_back(p);
    const auto [a, b] = ab;
    const double res = std::abs(b - (a * a - a));
    c.hecke_residual_ = std::max(c.hecke_residual_, res);
    if (res > tol * (1.0 + a * a)) {
      throw InvariantError("coefficient data: A(1," + std::to_string(p) + "^2) != A(1,p)^2 - A(1,p)" +
                           " (residual " + std::to_string(res) + ")");
    }
    (*table)[p] = a;
    c.hecke_bound_ratio_ = std::max(c.hecke_bound_ratio_, std::abs(a) / std::pow(p, 7.0 / 32.0));
  }
  c.prime_bound_ = check_prime_sequence(primes);
  c.a1p_ = std::move(table);
  c.rows_ = std::make_shared<const std::map<u64, std::pair<double, double>>>(rows);
  return c;
}

bool CoefficientProvider::covers(u64 n) const {
  if (kind_ == ProviderKind::divisor3) return true;
  for (auto [p, k] : factorize(n)) {
    if (p > prime_bound_) return false;
  }
  return true;
}

double CoefficientProvider::prime_power(u64 p, int k) const {
  if (k == 0) return 1.0;
  if (kind_ == ProviderKind::divisor3) return static_cast<double>((k + 1) * (k + 2) / 2);
  const auto it = a1p_->find(p);
  if (it == a1p_->end()) {
    if (p > prime_bound_) {
      throw DataRangeError("coefficients: prime " + std::to_string(p) + " beyond data bound " +
                               std::to_string(prime_bound_),
                           static_cast<double>(p));
    }
    throw DomainError("coefficients: " + std::to_string(p) + " is not prime");
  }
  return euler_power(it->second, k);
}

double CoefficientProvider::A(u64 m, u64 n) const {
  if (m == 0 || n == 0) throw DomainError("A(m, n): indices must be >= 1");
  auto fm = factorize(m);
  auto fn = factorize(n);
  std::map<u64, std::pair<int, int>> exps;
  for (auto [p, k] : fm) exps[p].first = k;
  for (auto [p, k] : fn) exps[p].second = k;
  double out = 1.0;
  for (auto [p, ab] : exps) {
    const auto [a, b] = ab;
    // A(p^a, p^b) = c_a c_b - c_{a-1} c_{b-1}, c_k = A(1, p^k).
    double v = prime_power(p, a) * prime_power(p, b);
    if (a > 0 && b > 0) v -= prime_power(p, a - 1) * prime_power(p, b - 1);
    out *= v;
  }
  return out;
}

std::vector<double> CoefficientProvider::a1_table(u64 n_max) const {
  std::vector<u64> spf(n_max + 1, 0);
  for (u64 i = 2; i <= n_max; ++i) {
    if (spf[i] != 0) continue;
    if (i > prime_bound_) {
      throw DataRangeError("coefficients: table to " + std::to_string(n_max) + " needs prime " +
                               std::to_string(i) + " beyond data bound " +
                               std::to_string(prime_bound_),
                           static_cast<double>(n_max));
    }
    for (u64 j = i; j <= n_max; j += i) {
      if (spf[j] == 0) spf[j] = i;
    }
  }
  std::vector<double> a(n_max + 1, 0.0);
  if (n_max >= 1) a[1] = 1.0;
  for (u64 n = 2; n <= n_max; ++n) {
    const u64 p = spf[n];
    u64 rest = n;
    int k = 0;
    while (rest % p == 0) {
      rest /= p;
      ++k;
    }
    a[n] = a[rest] * prime_power(p, k);
  }
  return a;
}

std::map<u64, std::pair<double, double>> CoefficientProvider::prime_rows() const {
  if (rows_) return *rows_;
  std::map<u64, std::pair<double, double>> out;
  if (!a1p_) return out;
  for (auto [p, a] : *a1p_) out[p] = {a, a * a - a};
  return out;
}

void GL3Form::validate() const {
  if (mu.real() != 0.0) throw DomainError("GL3Form: mu must be purely imaginary");
}

GL3Form eisenstein_form() { return GL3Form{}; }

double rankin_partial(const GL3Form& form, double X) {
  if (!(X >= 1.0)) throw DomainError("rankin_partial: X must be >= 1");
  const auto a = form.provider.a1_table(static_cast<u64>(std::floor(X)));
  double sum = 0.0;
  for (std::size_t n = 1; n < a.size(); ++n) sum += a[n] * a[n];
  return sum / X;
}

// ---------------------------------------------------------------------------
// Spectral data

double GL2SpectralDatum::lambda_at(u64 n) const {
  if (n == 0 || n > lambda.size()) {
    throw DataRangeError("spectral data: lambda(" + std::to_string(n) + ") not tabulated at t=" +
                             std::to_string(t),
                         static_cast<double>(n));
  }
  return lambda[n - 1];
}

void SpectralDataset::validate() {
  const double tol = 10.0 * std::pow(10.0, -data_precision);
  hecke_residual = 0.0;
  for (std::size_t j = 0; j < items.size(); ++j) {
    const auto& f = items[j];
    const std::string where = "form t=" + std::to_string(f.t);
    if (j > 0 && items[j - 1].t > f.t) throw InvariantError("spectral data: forms not sorted by t");
    if (!(f.omega > 0.0)) throw InvariantError("spectral data: " + where + " has omega <= 0");
    if (!(f.t > 0.0)) throw InvariantError("spectral data: " + where + " has t <= 0");
    if (f.lambda.empty() || std::abs(f.lambda[0] - 1.0) > tol) {
      throw InvariantError("spectral data: " + where + " has lambda(1) != 1");
    }
    const u64 nmax = f.n_max();
    for (u64 m = 2; m * m <= nmax; ++m) {
      for (u64 n = m; m * n <= nmax; ++n) {
        double rhs = 0.0;
        const u64 g = std::gcd(m, n);
        for (u64 d = 1; d <= g; ++d) {
          if (g % d == 0) rhs += f.lambda_at(m * n / (d * d));
        }
        const double lhs = f.lambda_at(m) * f.lambda_at(n);
        const double res = std::abs(lhs - rhs);
        hecke_residual = std::max(hecke_residual, res);
        if (res > tol * (1.0 + std::abs(lhs) + std::abs(rhs))) {
          throw InvariantError("spectral data: " + where + " violates lambda(" + std::to_string(m) +
                               ")lambda(" + std::to_string(n) + ") = sum_{d|(m,n)} lambda(mn/d^2)" +
                               " (residual " + std::to_string(res) + ")");
        }
      }
    }
  }
  const double top = items.empty() ? 0.0 : items.back().t;
  completeness_height = std::min(declared_height, top);
}

namespace {

double parse_double(std::string_view s, int line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (!s.empty() && *b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || !std::isfinite(v)) {
    throw ParseError("not a number: '" + std::string(s) + "'", line);
  }
  return v;
}

u64 parse_index(std::string_view s, int line) {
  u64 v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("not a positive integer: '" + std::string(s) + "'", line);
  }
  return v;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

// key=value tokens after the first word.
std::map<std::string, std::string> keyvals(const std::vector<std::string>& toks, int line) {
  std::map<std::string, std::string> out;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value, got '" + toks[i] + "'", line);
    out[toks[i].substr(0, eq)] = toks[i].substr(eq + 1);
  }
  return out;
}

std::string require(const std::map<std::string, std::string>& kv, const std::string& key, int line) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw ParseError("missing " + key + "=", line);
  return it->second;
}

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path, 0);
  return in;
}

}  // namespace

SpectralDataset parse_spectral(std::istream& in) {
  SpectralDataset out;
  bool header = false;
  std::string line;
  int lineno = 0;
  GL2SpectralDatum* cur = nullptr;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "#gl2") {
      if (header) throw ParseError("duplicate #gl2 header", lineno);
      const auto kv = keyvals(toks, lineno);
      out.declared_height = parse_double(require(kv, "completeness", lineno), lineno);
      out.data_precision = static_cast<int>(parse_index(require(kv, "precision", lineno), lineno));
      header = true;
      continue;
    }
    if (toks[0][0] == '#') continue;
    if (!header) throw ParseError("data before #gl2 header", lineno);
    if (toks[0] == "form") {
      const auto kv = keyvals(toks, lineno);
      GL2SpectralDatum d;
      d.t = parse_double(require(kv, "t", lineno), lineno);
      d.omega = parse_double(require(kv, "omega", lineno), lineno);
      if (auto it = kv.find("parity"); it != kv.end() && it->second != "even") {
        throw ParseError("only even forms are supported", lineno);
      }
      out.items.push_back(std::move(d));
      cur = &out.items.back();
      continue;
    }
    if (!cur) throw ParseError("coefficient line before any 'form' line", lineno);
    if (toks.size() != 2) throw ParseError("expected 'n <lambda(n)>'", lineno);
    const u64 n = parse_index(toks[0], lineno);
    if (n != cur->lambda.size() + 1) {
      throw ParseError("expected n=" + std::to_string(cur->lambda.size() + 1) + ", got " + toks[0],
                       lineno);
    }
    cur->lambda.push_back(parse_double(toks[1], lineno));
  }
  if (!header) throw ParseError("missing #gl2 header", lineno);
  std::stable_sort(out.items.begin(), out.items.end(),
                   [](const auto& a, const auto& b) { return a.t < b.t; });
  out.validate();
  return out;
}

SpectralDataset parse_spectral_file(const std::string& path) {
  auto in = open_or_throw(path);
  return parse_spectral(in);
}

void serialize_spectral(const SpectralDataset& data, std::ostream& out) {
  out << "#gl2 completeness=" << fmt(data.declared_height) << " precision=" << data.data_precision
      << '\n';
  for (const auto& f : data.items) {
    out << "form t=" << fmt(f.t) << " omega=" << fmt(f.omega) << '\n';
    for (std::size_t n = 0; n < f.lambda.size(); ++n) out << (n + 1) << ' ' << fmt(f.lambda[n]) << '\n';
  }
}

GL3Form parse_coefficients(std::istream& in) {
  GL3Form form;
  bool header = false;
  int precision = 16;
  std::map<u64, std::pair<double, double>> rows;
  std::string line;
  int lineno = 0;
  u64 last = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "#gl3") {
      if (header) throw ParseError("duplicate #gl3 header", lineno);
      const auto kv = keyvals(toks, lineno);
      form.mu = cplx(0.0, parse_double(require(kv, "mu", lineno), lineno));
      precision = static_cast<int>(parse_index(require(kv, "precision", lineno), lineno));
      header = true;
      continue;
    }
    if (toks[0][0] == '#') continue;
    if (!header) throw ParseError("data before #gl3 header", lineno);
    if (toks.size() != 3) throw ParseError("expected 'p <A(1,p)> <A(1,p^2)>'", lineno);
    const u64 p = parse_index(toks[0], lineno);
    if (p <= last) throw ParseError("primes must be ascending", lineno);
    if (!is_prime(p)) throw ParseError(toks[0] + " is not prime", lineno);
    last = p;
    rows[p] = {parse_double(toks[1], lineno), parse_double(toks[2], lineno)};
  }
  if (!header) throw ParseError("missing #gl3 header", lineno);
  form.provider = CoefficientProvider::from_table(rows, precision);
  form.label = "file";
  return form;
}

GL3Form parse_coefficient_file(const std::string& path) {
  auto in = open_or_throw(path);
  GL3Form f = parse_coefficients(in);
  f.label = path;
  return f;
}

void serialize_coefficients(const GL3Form& form, std::ostream& out) {
  out << "#gl3 mu=" << fmt(form.mu.imag()) << " precision=" << form.provider.precision() << '\n';
  for (auto [p, ab] : form.provider.prime_rows()) {
    out << p << ' ' << fmt(ab.first) << ' ' << fmt(ab.second) << '\n';
  }
}

}  // namespace gl3lab
