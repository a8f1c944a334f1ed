#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "gl3lab/quadrature.hpp"

namespace gl3lab {

using u64 = std::uint64_t;

// ---------------------------------------------------------------------------
// Elementary arithmetic

/// Prime factorization as (p, exponent) pairs, p ascending. factorize(1) is empty.
std::vector<std::pair<u64, int>> factorize(u64 n);

bool is_prime(u64 n);

/// Number of divisors d(n).
u64 divisor_count(u64 n);

/// Ternary divisor function: ordered triples (a, b, c) with abc = n.
/// Throws DomainError for n = 0 or n > 2^48.
u64 d3(u64 n);

/// sum_{ab = n} (a/b)^{it}; real and even in t, tau_it(n, 0) = d(n).
cplx tau_it(u64 n, double t);

// ---------------------------------------------------------------------------
// GL(3) coefficients

enum class ProviderKind { divisor3, sym_square, file };

/// Source of the Hecke eigenvalues A(m, n) of a self-dual GL(3) form.
///
/// Every variant is described by its values A(1, p) at primes; prime powers
/// follow from the degree-3 Euler factor with Satake parameters closed under
/// inversion, and A(m, n) from the Hecke relations. Immutable after
/// construction, so concurrent reads are safe.
class CoefficientProvider {
 public:
  /// A(1, n) = d3(n): the Eisenstein degeneration L = zeta^3.
  static CoefficientProvider divisor3();

  /// Symmetric square of a GL(2) form with eigenvalues lambda_p for all
  /// primes p <= the largest key; A(1, p) = lambda_p^2 - 1.
  static CoefficientProvider sym_square(const std::map<u64, double>& lambda_p, double t0);

  /// Tabulated A(1, p) and A(1, p^2) for every prime up to the largest key.
  /// Throws InvariantError if a prime is missing or A(1, p^2) disagrees with
  /// A(1, p)^2 - A(1, p) beyond the stated precision.
  static CoefficientProvider from_table(const std::map<u64, std::pair<double, double>>& rows,
                                        int precision);

  ProviderKind kind() const { return kind_; }
  /// Largest prime with data; unbounded (UINT64_MAX) for divisor3.
  u64 prime_bound() const { return prime_bound_; }
  /// Decimal digits of the underlying data; 16 for exact providers.
  int precision() const { return precision_; }
  /// Spectral parameter of the GL(2) form behind a sym_square provider.
  double t0() const { return t0_; }
  /// Largest |A(1,p)|/p^{7/32} seen; compared against 3 in reports.
  double hecke_bound_ratio() const { return hecke_bound_ratio_; }
  /// Largest |A(1,p^2) - (A(1,p)^2 - A(1,p))| in the input (file data only).
  double hecke_residual() const { return hecke_residual_; }

  /// True when every prime factor of n is covered.
  bool covers(u64 n) const;

  /// A(1, p^k). Throws DataRangeError beyond prime_bound.
  double prime_power(u64 p, int k) const;

  /// A(m, n); multiplicative and symmetric.
  double A(u64 m, u64 n) const;

  /// A(1, n) for n = 0..n_max (entry 0 is unused and set to 0), by a
  /// smallest-prime-factor sieve.
  std::vector<double> a1_table(u64 n_max) const;

  /// The input rows (A(1,p), A(1,p^2)) for serialization; empty for divisor3.
  std::map<u64, std::pair<double, double>> prime_rows() const;

 private:
  ProviderKind kind_ = ProviderKind::divisor3;
  u64 prime_bound_ = UINT64_MAX;
  int precision_ = 16;
  double t0_ = 0.0;
  double hecke_bound_ratio_ = 0.0;
  double hecke_residual_ = 0.0;
  std::shared_ptr<const std::map<u64, double>> a1p_;
  std::shared_ptr<const std::map<u64, std::pair<double, double>>> rows_;
};

/// Self-dual GL(3) form with Langlands parameter (mu, 0, -mu), Re mu = 0.
struct GL3Form {
  cplx mu{0.0, 0.0};
  CoefficientProvider provider = CoefficientProvider::divisor3();
  std::string label = "d3";

  /// Throws DomainError unless Re mu = 0.
  void validate() const;
  double A(u64 m, u64 n) const { return provider.A(m, n); }
};

/// The Eisenstein degeneration with mu = 0.
GL3Form eisenstein_form();

/// sum_{n <= X} |A(1, n)|^2 / X.
double rankin_partial(const GL3Form& form, double X);

// ---------------------------------------------------------------------------
// GL(2) spectral data

struct GL2SpectralDatum {
  double t = 0.0;      // spectral parameter t_j
  double omega = 0.0;  // harmonic weight omega_j
  std::vector<double> lambda;  // lambda[n - 1] = lambda_j(n)

  double lambda_at(u64 n) const;  // throws DataRangeError beyond the table
  u64 n_max() const { return lambda.size(); }
};

struct SpectralDataset {
  std::vector<GL2SpectralDatum> items;  // sorted by t
  /// Every even form with t_j below this height is present. Never exceeds
  /// the largest t_j listed (0 for an empty list).
  double completeness_height = 0.0;
  /// Height stated in the file header. The interval between the last listed
  /// form and this height is certified free of even forms, which the
  /// Kuznetsov tail bound uses.
  double declared_height = 0.0;
  int data_precision = 16;
  /// Largest Hecke-relation residual found while validating.
  double hecke_residual = 0.0;

  /// Throws InvariantError on unsorted items, omega <= 0, lambda(1) != 1 or
  /// Hecke-relation residuals beyond the data precision.
  void validate();
};

/// Parses the `#gl2` format. Throws ParseError (with line) on malformed input
/// and InvariantError on data that violates the Hecke relations.
SpectralDataset parse_spectral(std::istream& in);
SpectralDataset parse_spectral_file(const std::string& path);
void serialize_spectral(const SpectralDataset& data, std::ostream& out);

/// Parses the `#gl3` format into a form (mu from the header).
GL3Form parse_coefficients(std::istream& in);
GL3Form parse_coefficient_file(const std::string& path);
void serialize_coefficients(const GL3Form& form, std::ostream& out);

}  // namespace gl3lab
