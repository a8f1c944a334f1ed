#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "gl3lab/forms.hpp"
#include "gl3lab/gamma_afe.hpp"
#include "gl3lab/transforms.hpp"
#include "gl3lab/window.hpp"

namespace gl3lab {

/// Exponent standing in for epsilon in every envelope formula.
inline constexpr double kEnvelopeEps = 0.02;

struct MomentRequest {
  SpectralWindow window;
  GL3Form form;
  SpectralDataset dataset;
  double cutoff_mult = 1.0;
  bool include_continuous = true;
  double tail_tol = 1e-6;  // AFE tail tolerance for each L-value
};

/// (2/pi) sum_{n2} A(1, n2)/n2 int k(t) V(n2^2; t) tanh(pi t) t dt over
/// t in R, with n2 up to the square root of the AFE length at T + 10M.
/// Throws DataRangeError when the provider stops short.
double diagonal_term(const MomentRequest& req);
/// Same with explicit A(1, n2), n2 = 1..a1.size() (a1[0] = A(1, 1)).
double diagonal_term(const SpectralWindow& k, const GL3Form& form, const std::vector<double>& a1);

struct MomentPiece {
  double t = 0.0;
  double weight = 0.0;  // k(t_j) omega_j for a form, quadrature weight times k omega / 4 pi otherwise
  double L = 0.0;       // L(1/2, phi x f_j) or |L(1/2 + it, phi)|^2
  double budget = 0.0;  // AFE tail and polar error, times |weight|
  bool discrete = true;
};

struct MomentResult {
  double discrete = 0.0;
  double continuous = 0.0;
  double total = 0.0;
  double budget = 0.0;
  /// The dataset is not complete up to T + 10M.
  bool partial = false;
  std::vector<MomentPiece> breakdown;
};

/// sum_j k(t_j) omega_j L(1/2, phi x f_j) + (1/4 pi) int k(t) omega(t) |L(1/2 + it, phi)|^2 dt,
/// omega(t) = 4 pi / |zeta(1 + 2it)|^2. The t-integral stops where k drops
/// below 1e-12 of its peak.
MomentResult smoothed_moment(const MomentRequest& req);

struct VerificationReport {
  std::string name;
  cplx lhs, rhs;
  double residual = 0.0;
  double budget = 0.0;
  bool pass = false;
  double runtime = 0.0;
  std::string warning;

  /// Sets residual = |lhs - rhs| and pass = residual <= budget.
  void settle();
};

void write_json(std::ostream& out, const std::vector<VerificationReport>& reports);
void write_csv(std::ostream& out, const std::vector<VerificationReport>& reports);

/// Both sides of the Kuznetsov formula for even forms with test function k:
///   sum_j k(t_j) omega_j lambda_j(n1) lambda_j(n2) + (1/4 pi) int k omega tau_it(n1) tau_it(n2) dt
///     = delta h_const(k) / 2 + sum_c S(n1, n2; c)/c H+(4 pi sqrt(n1 n2)/c)
///                            + sum_c S(n1, -n2; c)/c H-(4 pi sqrt(n1 n2)/c),
/// H+- at u = 0. The budget covers forms above the dataset's declared
/// height, the c-tail and the data precision; a warning is set when it
/// exceeds a tenth of both sides.
VerificationReport kuznetsov_residual(u64 n1, u64 n2, const SpectralWindow& k,
                                      const SpectralDataset& dataset);

/// sum_r r^{-1} sum_{n2 | r} sum_{n1} n2 A(n1, n2) S(n1, +-1; r/n2) w+-(n1 n2^2/N; sqrt(N)/r),
/// w+-(x; D) = w(x) x^{-u} H+-(4 pi D sqrt(x)), over the r where H+- is not
/// negligible. Throws DomainError for N > 1e6.
struct PmSum {
  cplx value;
  double budget = 0.0;  // quadrature and edge error over the r that were summed
  /// Bound on the r left out because |H+-| is below 1e-8 of its peak there.
  /// Both sides leave out the same r, so it does not enter their difference.
  double truncation = 0.0;
  cplx polar;               // divisor3, Voronoi side only: included in value
  double polar_bound = 0.0;
  u64 r_max = 0;
  std::size_t terms = 0;
};
PmSum s_pm_direct(double N, int sign, const SpectralWindow& k, cplx u, const GL3Form& form,
                  const WindowFunction& w = WindowFunction(), u64 force_r = 0);

/// N sum_r r^{-2} sum_{n != 0} A(1, |n|) e(-+n/r) W+-(N n/r^3; sqrt(N)/r) / 2,
/// W+- the Hankel transform of w+-, with |n| cut at n_cut_mult times the
/// point past which the bandwidth of w+- makes W+- negligible.
///
/// The 1/2 makes W(y) + W(-y) the transform with gamma(1-s)/gamma(s), which
/// is what the functional equation gives at r = 1; the twist e(-+n/r) goes
/// with W(y) built from G^{sgn y}. For divisor3 the value
/// also carries the pole of the Kloosterman side at s = 1, as a contour
/// integral over the exact Hurwitz-zeta expansion of its Dirichlet series.
PmSum s_pm_voronoi(double N, int sign, const SpectralWindow& k, cplx u, const GL3Form& form,
                   const WindowFunction& w = WindowFunction(), double n_cut_mult = 1.0,
                   u64 force_r = 0);

/// int_{-T}^{T} |sum a_n n^{it}|^2 dt / sum (T + n) |a_n|^2, a[0] = a_1.
/// The integral is evaluated in closed form.
double large_sieve_ratio(const std::vector<cplx>& a, double T);

struct EndgameRange {
  int sign = 1;
  double R = 0.0;      // largest admissible r-scale
  double N_len = 0.0;  // largest admissible n-scale
  double U = 0.0;      // largest admissible U
};

struct EndgameEnvelope {
  EndgameRange range;
  bool empty = false;
  /// M T^eps sqrt(R + U) sqrt(min{N_len, U^3/N_len} + U), maximized over the ranges.
  double bound = 0.0;
  /// M T^eps (sqrt N/(M T) + T/M)^{1/2} (T/M)^{3/4} for +,
  /// M T^eps (sqrt N/T + T/M)^{1/2} (sqrt N/M^3)^{1/2} for -.
  double simplified = 0.0;
};

/// The endgame ranges
///   +: 1/2 < R < sqrt N/(M^{1-eps} T), N_len ~ sqrt N,
///   -: R ~ sqrt N/T, 1/2 < N_len < sqrt N/M^{3-eps},
/// with T^eps < U < T/M^{1-eps}, and the resulting bound. Throws DomainError
/// for N > T^{3+eps}.
EndgameEnvelope endgame_envelope(double N, const SpectralWindow& k, int sign);

struct SecondMomentRow {
  double U = 0.0;
  double value = 0.0;
  double ratio = 0.0;  // value / U^{3/2}
  double budget = 0.0;
};

/// int_{-U}^{U} |L(1/2 + it, phi)|^2 dt by Gauss-Legendre on [0, U], one
/// AFE per node. Throws DomainError for U > 200.
std::vector<SecondMomentRow> second_moment_scan(const GL3Form& form, const std::vector<double>& U_values,
                                                double tail_tol = 1e-6);

struct ScalingFit {
  double log_c = 0.0;
  double exponent_T = 0.0;
  double exponent_M = 0.0;
  double residual = 0.0;  // RMS of the log residuals
};

struct ScalingPoint {
  double T, M, value;
};

/// Least squares for log value = log c + a log T + b log M. Throws
/// DomainError with fewer than 4 points, non-positive values or a rank
/// deficient design.
ScalingFit scaling_fit(const std::vector<ScalingPoint>& grid);

}  // namespace gl3lab
