#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gl3lab/errors.hpp"
#include "gl3lab/suites.hpp"

namespace fs = std::filesystem;
using namespace gl3lab;

namespace {

constexpr int kPass = 0, kFail = 1, kUsage = 2;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<double> T, M, N;
  std::string sign;
  std::string provider = "d3";
  std::string coeffs, spectral, out, format;
  int jobs = 1;
  u64 seed = 42;
  double tol_scale = 1.0;
  double tail_tol = 1e-4;
};

// Runs task(i) for i < n on `jobs` threads. Results go to caller-owned slots;
// the first exception is rethrown after every worker has stopped.
void run_pool(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        task(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (int j = 1; j < std::min<int>(jobs, static_cast<int>(n)); ++j) pool.emplace_back(worker);
  worker();
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Relative paths that do not exist are looked up under $GL3LAB_DATA.
std::string resolve(const std::string& path) {
  if (path.empty() || fs::exists(path) || fs::path(path).is_absolute()) return path;
  if (const char* dir = std::getenv("GL3LAB_DATA")) {
    const fs::path p = fs::path(dir) / path;
    if (fs::exists(p)) return p.string();
  }
  return path;
}

std::optional<SpectralDataset> load_spectral(const Options& o) {
  if (o.spectral.empty()) return std::nullopt;
  const std::string p = resolve(o.spectral);
  if (!fs::exists(p)) throw Usage("spectral data not found: " + o.spectral);
  return parse_spectral_file(p);
}

GL3Form load_form(const Options& o, const std::optional<SpectralDataset>& data) {
  if (o.provider == "d3") return eisenstein_form();
  if (o.provider == "file") {
    if (o.coeffs.empty()) throw Usage("--provider file needs --coeffs");
    const std::string p = resolve(o.coeffs);
    if (!fs::exists(p)) throw Usage("coefficient file not found: " + o.coeffs);
    return parse_coefficient_file(p);
  }
  // sym2 lifts the first form of the spectral dataset.
  if (!data || data->items.empty()) throw Usage("--provider sym2 needs --spectral with at least one form");
  const GL2SpectralDatum& f = data->items.front();
  std::map<u64, double> lambda_p;
  for (u64 p = 2; p <= f.n_max(); ++p) {
    if (is_prime(p)) lambda_p[p] = f.lambda_at(p);
  }
  if (lambda_p.empty()) throw Usage("the first spectral form lists no prime eigenvalues");
  GL3Form form;
  form.provider = CoefficientProvider::sym_square(lambda_p, f.t);
  form.label = "sym2";
  return form;
}

std::ostream& open_out(const Options& o, std::ofstream& file) {
  if (o.out.empty()) return std::cout;
  file.open(o.out, std::ios::binary);
  if (!file) throw Usage("cannot write " + o.out);
  return file;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_verify(const std::string& suite, const Options& o) {
  const auto& names = suite_names();
  std::vector<std::string> todo;
  if (suite == "all") {
    todo = names;
  } else if (std::find(names.begin(), names.end(), suite) != names.end()) {
    todo = {suite};
  } else {
    throw Usage("unknown suite '" + suite + "'");
  }
  if (!(o.tol_scale > 0.0)) throw Usage("--tol-scale must be positive");

  SuiteConfig cfg;
  if (!o.T.empty()) cfg.T = o.T.front();
  if (!o.M.empty()) cfg.M = o.M.front();
  if (!o.N.empty()) cfg.N = o.N.front();
  if (!o.sign.empty()) cfg.sign = o.sign == "+" ? 1 : -1;
  cfg.seed = o.seed;
  cfg.tol_scale = o.tol_scale;
  const auto data = load_spectral(o);
  if (data) cfg.dataset = *data;
  cfg.form = load_form(o, data);

  std::vector<std::vector<VerificationReport>> parts(todo.size());
  run_pool(todo.size(), o.jobs, [&](std::size_t i) { parts[i] = run_suite(todo[i], cfg); });

  std::vector<VerificationReport> reports;
  for (auto& p : parts) reports.insert(reports.end(), p.begin(), p.end());
  bool ok = true;
  for (const VerificationReport& r : reports) {
    ok = ok && r.pass;
    std::fprintf(stderr, "%s  %-64s residual %.3e  budget %.3e%s%s\n", r.pass ? "pass" : "FAIL", r.name.c_str(),
                 r.residual, r.budget, r.warning.empty() ? "" : "  ", r.warning.c_str());
  }
  std::ofstream file;
  std::ostream& out = open_out(o, file);
  if (o.format == "csv") {
    write_csv(out, reports);
  } else {
    write_json(out, reports);
  }
  return ok ? kPass : kFail;
}

int cmd_moment(const Options& o) {
  if (o.T.empty() || o.M.empty()) throw Usage("moment needs at least one --T and one --M");
  const auto data = load_spectral(o);
  MomentRequest base;
  base.form = load_form(o, data);
  if (data) base.dataset = *data;
  base.tail_tol = o.tail_tol;

  std::vector<std::pair<double, double>> grid;
  for (double T : o.T) {
    for (double M : o.M) grid.emplace_back(T, M);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  for (auto [T, M] : grid) SpectralWindow{T, M, 1.0}.validate();

  std::vector<MomentResult> rows(grid.size());
  std::vector<double> diag(grid.size());
  run_pool(grid.size(), o.jobs, [&](std::size_t i) {
    MomentRequest req = base;
    req.window = {grid[i].first, grid[i].second, 1.0};
    diag[i] = diagonal_term(req);
    rows[i] = smoothed_moment(req);
  });

  std::ofstream file;
  std::ostream& out = open_out(o, file);
  if (o.format == "json") {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      j.push_back({{"T", grid[i].first},
                   {"M", grid[i].second},
                   {"diagonal", diag[i]},
                   {"continuous", rows[i].continuous},
                   {"discrete", rows[i].discrete},
                   {"total", rows[i].total}});
    }
    out << j.dump(2) << '\n';
  } else {
    out << "T,M,diagonal,continuous,discrete,total\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << fmt(grid[i].first) << ',' << fmt(grid[i].second) << ',' << fmt(diag[i]) << ','
          << fmt(rows[i].continuous) << ',' << fmt(rows[i].discrete) << ',' << fmt(rows[i].total) << '\n';
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (rows[i].partial) {
      std::fprintf(stderr, "warning: spectral data incomplete below T + 10M at T=%g M=%g\n", grid[i].first,
                   grid[i].second);
    }
  }
  return kPass;
}

int cmd_scan(const std::string& kind, const Options& o) {
  const auto data = load_spectral(o);
  const GL3Form form = load_form(o, data);
  std::ofstream file;

  if (kind == "second-moment") {
    // --T lists the heights U of int_{-U}^{U} |L|^2.
    if (o.T.empty()) throw Usage("scan second-moment needs at least one --T");
    std::vector<double> U = o.T;
    std::sort(U.begin(), U.end());
    const auto rows = second_moment_scan(form, U, o.tail_tol);
    std::ostream& out = open_out(o, file);
    out << "U,value,ratio,budget\n";
    for (const SecondMomentRow& r : rows) {
      out << fmt(r.U) << ',' << fmt(r.value) << ',' << fmt(r.ratio) << ',' << fmt(r.budget) << '\n';
    }
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].ratio <= rows[i - 1].ratio;
    std::fprintf(stderr, "ratio non-increasing in U: %s\n", monotone ? "yes" : "no");
    return kPass;
  }

  if (kind == "endgame") {
    if (o.T.empty() || o.M.empty() || o.N.empty()) throw Usage("scan endgame needs --T, --M and --N");
    std::vector<int> signs{1, -1};
    if (!o.sign.empty()) signs = {o.sign == "+" ? 1 : -1};
    std::ostream& out = open_out(o, file);
    out << "T,M,N,sign,R,N_len,U,empty,bound,simplified\n";
    for (double T : o.T) {
      for (double M : o.M) {
        for (double N : o.N) {
          for (int s : signs) {
            const EndgameEnvelope e = endgame_envelope(N, {T, M, 1.0}, s);
            out << fmt(T) << ',' << fmt(M) << ',' << fmt(N) << ',' << (s > 0 ? '+' : '-') << ',' << fmt(e.range.R)
                << ',' << fmt(e.range.N_len) << ',' << fmt(e.range.U) << ',' << (e.empty ? 1 : 0) << ','
                << fmt(e.bound) << ',' << fmt(e.simplified) << '\n';
          }
        }
      }
    }
    return kPass;
  }

  if (kind == "scaling") {
    if (o.T.empty() || o.M.empty()) throw Usage("scan scaling needs --T and --M");
    std::vector<ScalingPoint> grid;
    for (double T : o.T) {
      for (double M : o.M) grid.push_back({T, M, 0.0});
    }
    MomentRequest base;
    base.form = form;
    if (data) base.dataset = *data;
    base.tail_tol = o.tail_tol;
    run_pool(grid.size(), o.jobs, [&](std::size_t i) {
      MomentRequest req = base;
      req.window = {grid[i].T, grid[i].M, 1.0};
      grid[i].value = smoothed_moment(req).total;
    });
    const ScalingFit fit = scaling_fit(grid);
    std::ostream& out = open_out(o, file);
    out << "T,M,value\n";
    for (const ScalingPoint& p : grid) out << fmt(p.T) << ',' << fmt(p.M) << ',' << fmt(p.value) << '\n';
    std::fprintf(stderr, "fit: value ~ %.6g T^%.6f M^%.6f, rms log residual %.3e\n", std::exp(fit.log_c),
                 fit.exponent_T, fit.exponent_M, fit.residual);
    return kPass;
  }
  throw Usage("unknown scan '" + kind + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks and moment scans for GL(3) x GL(2) spectral moments"};
  app.set_config("--config", "", "key = value file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--T", o.T, "spectral centre (repeat for a grid)");
  app.add_option("--M", o.M, "spectral width (repeat for a grid)");
  app.add_option("--N", o.N, "length of the r, n sums (repeat for a grid)");
  app.add_option("--sign", o.sign, "sign of the Bessel transform")->check(CLI::IsMember({"+", "-"}));
  app.add_option("--provider", o.provider, "GL(3) coefficients")->check(CLI::IsMember({"d3", "sym2", "file"}));
  app.add_option("--coeffs", o.coeffs, "#gl3 coefficient file");
  app.add_option("--spectral", o.spectral, "#gl2 spectral data file");
  app.add_option("--out", o.out, "output file (default stdout)");
  app.add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "seed for sampled checks");
  app.add_option("--tol-scale", o.tol_scale, "multiplies every tolerance budget");
  app.add_option("--tail-tol", o.tail_tol, "AFE tail tolerance for moment and scan");

  std::string suite, scan;
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("suite", suite, "gamma, afe, voronoi, kuznetsov, twist-support, large-sieve or all")
      ->required();
  CLI::App* moment = app.add_subcommand("moment", "smoothed spectral moment over a (T, M) grid, as CSV");
  CLI::App* scanc = app.add_subcommand("scan", "second-moment, endgame or scaling scan, as CSV");
  scanc->add_option("kind", scan, "second-moment, endgame or scaling")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    if (*verify) return cmd_verify(suite, o);
    if (*moment) return cmd_moment(o);
    return cmd_scan(scan, o);
  } catch (const Usage& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
