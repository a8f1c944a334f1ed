#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gl3lab/moments.hpp"

namespace gl3lab {

struct KeystoneTuple {
  double N, T, M;
  int sign;
};

/// Parameters shared by the verification suites. Unset window fields fall
/// back to each suite's own defaults.
struct SuiteConfig {
  std::optional<double> T, M, N;
  std::optional<int> sign;
  GL3Form form = eisenstein_form();
  SpectralDataset dataset;  // empty, declared free of forms below 9.5, unless loaded
  u64 seed = 42;
  double tol_scale = 1.0;

  SuiteConfig() { dataset.declared_height = 9.5; }
};

/// lhs = value, rhs = bound; fails when value exceeds bound.
VerificationReport bound_report(const std::string& name, double value, double bound);
/// Relative agreement: budget = rel_tol |rhs| + abs_tol.
VerificationReport match_report(const std::string& name, cplx lhs, cplx rhs, double rel_tol,
                                double abs_tol = 0.0);

// One group per acceptance criterion.
std::vector<VerificationReport> specfun_checks(const SuiteConfig& cfg);         // 1
std::vector<VerificationReport> gamma_layer_checks(const SuiteConfig& cfg);     // 2
std::vector<VerificationReport> afe_decay_checks(const SuiteConfig& cfg);       // 3
std::vector<VerificationReport> dual_sum_checks(const SuiteConfig& cfg);        // 4
std::vector<VerificationReport> hankel_checks(const SuiteConfig& cfg);          // 5
std::vector<VerificationReport> twist_support_checks(const SuiteConfig& cfg);   // 6
std::vector<VerificationReport> keystone_checks(const std::vector<KeystoneTuple>& tuples,
                                                const SuiteConfig& cfg);        // 7
std::vector<VerificationReport> kuznetsov_checks(const SuiteConfig& cfg);       // 8
std::vector<VerificationReport> large_sieve_checks(const SuiteConfig& cfg);     // 9
std::vector<VerificationReport> envelope_checks(const SuiteConfig& cfg);        // 10, first half
std::vector<VerificationReport> second_moment_checks(const SuiteConfig& cfg);   // 10, second half

/// gamma, afe, voronoi, kuznetsov, twist-support, large-sieve.
const std::vector<std::string>& suite_names();

/// Runs a named suite (or "all"), scaling every budget by cfg.tol_scale.
/// Throws DomainError for an unknown name.
std::vector<VerificationReport> run_suite(const std::string& name, const SuiteConfig& cfg);

/// Applies tol_scale to the budgets and re-settles.
void scale_budgets(std::vector<VerificationReport>& reports, double tol_scale);

}  // namespace gl3lab
