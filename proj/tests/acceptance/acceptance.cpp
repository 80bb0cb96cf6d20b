// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
// Usage: acceptance [criterion ...] [--jobs N] [--work DIR]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rmg/cli/config.hpp"
#include "rmg/cli/presets.hpp"
#include "rmg/cli/runner.hpp"
#include "rmg/diagnostics.hpp"
#include "rmg/ensemble.hpp"
#include "rmg/format.hpp"
#include "rmg/limit_law.hpp"
#include "rmg/parallel.hpp"
#include "rmg/quaternionic.hpp"
#include "rmg/rng.hpp"
#include "rmg/spectra.hpp"

using namespace rmg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

unsigned g_jobs = 1;
fs::path g_work;

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

CMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CMatrix A(n, n);
  for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = {g(rng), g(rng)};
  return A / std::sqrt(2.0 * n);
}

cli::RunManifest run_preset(const std::string& preset, const std::string& dir) {
  cli::RunOptions o;
  o.out_dir = (g_work / dir).string();
  o.jobs = g_jobs;
  const cli::Config c = cli::parse_config(cli::presets().at(preset), preset);
  return cli::run_command(c.command, c, o);
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (!(v[k] < v[k - 1])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Outcome hermitization_identity() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.05, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const CMatrix A = random_matrix(16, rng);
    const cplx z(u(rng), u(rng)), eta(u(rng), pos(rng));
    const cplx direct = hermitization_stieltjes_direct(A, z, eta);
    const cplx via = hermitization_stieltjes_from_sv(singular_values(A, z), eta);
    worst = std::max(worst, std::abs(direct - via));
  }
  o.require(worst <= 1e-9, "max |trace - sv route| = " + num(worst) + " over 100 matrices");
  return o;
}

Outcome circular_oracle() {
  Outcome o;
  const GaussianSpec s = gaussian_spec({0, 0, 0});
  double dens_err = 0.0, f_err = 0.0, outside = 0.0;
  for (int i = -20; i <= 20; ++i) {
    for (int j = -20; j <= 20; ++j) {
      const cplx z(0.1 * i, 0.1 * j);
      const double r = std::abs(z);
      if (r <= 0.9) {
        dens_err = std::max(dens_err, std::abs(brown_density(z, s) - 1.0 / kPi));
        f_err = std::max(f_err, std::abs(solve_f(z, s) - std::sqrt(1.0 - r * r)));
      } else if (r >= 1.1) {
        outside = std::max(outside, brown_density(z, s));
      }
    }
  }
  const double nu0 = nu_z_density(0.0, {1e-4}, 1e-3, s)[0];
  o.require(dens_err <= 1e-8, "density err " + num(dens_err));
  o.require(f_err <= 1e-8, "f err " + num(f_err));
  o.require(outside == 0.0, "max density |z|>=1.1 = " + num(outside));
  o.require(std::abs(nu0 - 2.0 / kPi) <= 0.01, "nu_0(0+) = " + num(nu0));
  return o;
}

Outcome semicircle() {
  Outcome o;
  const GaussianSpec s = gaussian_spec({0, 0, 0});
  double worst = 0.0;
  for (cplx eta : {cplx(0, 0.5), cplx(0, 1), cplx(0, 2), cplx(1, 1)}) {
    const cplx r = std::sqrt(eta * eta - 4.0);
    cplx expect = (-eta + r) / 2.0;
    if (expect.imag() <= 0.0) expect = (-eta - r) / 2.0;
    worst = std::max(worst, std::abs(stieltjes_fixed_point(0.0, eta, s) - expect));
  }
  o.require(worst <= 1e-9, "max err " + num(worst));
  return o;
}

Outcome moment_identity() {
  Outcome o;
  const GaussianSpec s = gaussian_spec({1, 0, 0});
  for (cplx z : {cplx(0, 0), cplx(1, 0), cplx(1, 1)}) {
    const auto grid = default_s_grid(z, s, 2001);
    const auto d = nu_z_density(z, grid, 1e-3, s);
    double m2 = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
      m2 += 0.5 * (grid[k] - grid[k - 1]) * (d[k] * grid[k] * grid[k] + d[k - 1] * grid[k - 1] * grid[k - 1]);
    }
    const double rhs = 1.0 + expect(s, [z](cplx w) { return std::norm(w - z); }).value.real();
    const double rel = std::abs(m2 / rhs - 1.0);
    o.require(rel <= 0.01, "z=" + format_complex(z) + " rel " + num(rel));
  }
  return o;
}

Outcome dual_routes() {
  Outcome o;
  const GaussianSpec s = gaussian_spec({1, 0, 0});
  auto brown_and_support = [&](const GridSpec& g, std::vector<double>& b, std::vector<char>& sup) {
    b.resize(g.size());
    sup.resize(g.size());
    parallel_for(g.size(), g_jobs, [&](std::size_t k) {
      b[k] = brown_density(g.node(k), s);
      sup[k] = support_indicator(g.node(k), s);
    });
  };
  const GridSpec g = GridSpec::square(-2.0, 2.0, 41);
  std::vector<double> b;
  std::vector<char> sup;
  brown_and_support(g, b, sup);
  const RouteComparison c = compare_density_routes(density_via_laplacian(g, s, g_jobs), b, sup, 4.0);
  o.require(c.max_abs_diff <= 0.05, "41x41 max interior diff " + num(c.max_abs_diff) + " over " +
                                        std::to_string(c.compared) + " nodes");
  const GridSpec w = GridSpec::square(-4.2, 4.2, 85);
  brown_and_support(w, b, sup);
  const RouteComparison m = compare_density_routes(density_via_laplacian(w, s, g_jobs), b, sup, 4.0);
  o.require(std::abs(m.mass - 1.0) <= 0.05, "mass within radius 4 = " + num(m.mass));
  return o;
}

Outcome finite_n() {
  Outcome o;
  run_preset("compare_fig1", "c6");
  const json r = read_json(g_work / "c6" / "report.json");
  std::vector<double> ks, l1;
  for (const auto& row : r["per_n"]) {
    const double k = row["ks"][0]["ks"].get<double>(), l = row["l1"].get<double>();
    ks.push_back(k);
    l1.push_back(l);
    if (row["n"].get<std::size_t>() == 500) {
      o.require(k <= 0.05, "KS(n=500) " + num(k));
      o.require(l <= 0.15, "L1(n=500) " + num(l));
    }
  }
  o.require(ks.size() == 3 && strictly_decreasing(ks), "KS " + num(ks[0]) + ">" + num(ks[1]) + ">" + num(ks[2]));
  o.require(l1.size() == 3 && strictly_decreasing(l1), "L1 " + num(l1[0]) + ">" + num(l1[1]) + ">" + num(l1[2]));
  return o;
}

Outcome quaternionic() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.05, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const CMatrix A = random_matrix(32, rng);
    const QPoint q{{u(rng), u(rng)}, {u(rng), pos(rng)}};
    worst = std::max(worst, std::abs(gamma_matrix(A, q).alpha - hermitization_stieltjes(A, q.z, q.eta)));
  }
  o.require(worst <= 1e-9, "alpha vs hermitization " + num(worst));
  const QPoint q{{0.5, 0.0}, {0.0, 0.5}};
  std::vector<double> res;
  for (std::size_t n : {50, 200, 800}) {
    std::vector<cplx> lambda(n);
    for (std::size_t k = 0; k < n; ++k) lambda[k] = std::polar(0.7, 2.0 * kPi * k / n);
    res.push_back(subordination_residual(lambda, n, q, 20, derive_seed(99, n), g_jobs));
  }
  o.require(strictly_decreasing(res), "residual " + num(res[0]) + ">" + num(res[1]) + ">" + num(res[2]));
  o.require(res[2] <= 0.05, "residual(800) " + num(res[2]));
  return o;
}

Outcome extremal() {
  Outcome o;
  run_preset("edges", "c8");
  const json r = read_json(g_work / "c8" / "report.json");
  for (const auto& row : r["edges"]) {
    const double re = row["max_margin_re"], im = row["max_margin_im"], sh = row["max_margin_shifted"];
    o.require(re <= 1.2, "max Re margin " + num(re));
    o.require(im <= 1.1, "max Im margin " + num(im));
    o.require(sh <= 1.2, "max shifted margin " + num(sh));
  }
  return o;
}

Outcome invariant() {
  Outcome o;
  run_preset("invariant", "c9");
  const json r = read_json(g_work / "c9" / "report.json");
  std::vector<double> tv, scaled;
  double gap = 0.0;
  for (const auto& row : r["invariant"]) {
    tv.push_back(row["median_tv"]);
    scaled.push_back(row["median_tv_scaled"]);
    gap = std::max(gap, row["max_perturbative_gap"].get<double>());
  }
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  std::string trend;
  for (double t : tv) trend += (trend.empty() ? "" : ">") + num(t);
  o.require(tv.size() == 4 && strictly_decreasing(tv), "median TV " + trend);
  o.require(*hi / *lo <= 2.0, "TV*sqrt(n/log n) spread x" + num(*hi / *lo));
  o.require(gap <= 1e-9, "route gap " + num(gap));
  return o;
}

Outcome small_sv() {
  Outcome o;
  run_preset("small_sv", "c10");
  const json r = read_json(g_work / "c10" / "report.json")["small_sv"][0];
  const double q = r["frac_quasi"], m = r["frac_moderate"];
  o.require(q == 1.0, "frac_quasi " + num(q));
  o.require(m >= 0.99, "frac_moderate " + num(m));
  const SmallSvReport k = small_sv_report(law::ShiftedExponential{1.0, -1.0}, 500, 0.0, 3, 5, g_jobs);
  const bool zero = std::all_of(k.sn.begin(), k.sn.end(), [](double s) { return s == 0.0; });
  o.require(zero, "z=0 kernel s_n = 0 exactly");
  return o;
}

Outcome concentration() {
  Outcome o;
  std::vector<cplx> x(40);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = {std::cos(1.3 * k), std::sin(0.4 * k)};
  bool identical = true;
  for (const EntryLaw& l : {EntryLaw{law::ShiftedExponential{1.0, -1.0}}, EntryLaw{law::Rademacher{}}}) {
    const double base = concentration_fn(x, l, 0.7, 20000, 4.0, 5).value;
    for (double gamma : {0.25, 2.0, 8.0}) {
      std::vector<cplx> gx(x);
      for (auto& v : gx) v *= gamma;
      identical = identical && concentration_fn(gx, l, gamma * 0.7, 20000, 4.0, 5).value == base;
    }
  }
  o.require(identical, "scaling identity exact");

  // Exhaustive: S = e1 + e2 over four equally likely sign pairs.
  double exact = 0.0;
  const double sums[4] = {-2.0, 0.0, 0.0, 2.0};
  for (double w : sums) {
    double p = 0.0;
    for (double s : sums) p += std::abs(s - w) <= 0.1 ? 0.25 : 0.0;
    exact = std::max(exact, p);
  }
  const ConcentrationResult rad = concentration_fn({1.0, 1.0}, law::Rademacher{}, 0.1, 100000, 4.0, 8);
  o.require(exact == 0.5 && std::abs(rad.value - exact) <= 4.0 * rad.std_error,
            "Rademacher (1,1): " + num(rad.value) + " vs exhaustive " + num(exact));

  run_preset("concentration", "c11");
  std::ifstream in(g_work / "c11" / "concentration.csv");
  std::string line;
  std::getline(in, line);
  std::vector<double> scaled;
  while (std::getline(in, line)) scaled.push_back(parse_double(split_list(line)[4]));
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  o.require(scaled.size() == 5 && *hi / *lo <= 3.0, "p(1)*sigma*sqrt(m) spread x" + num(*hi / *lo));
  return o;
}

Outcome reproducibility() {
  Outcome o;
  const std::vector<std::pair<std::string, std::string>> runs{
      {"simulate", "[run]\nseed = 3\nn = 30, 40\nreplicas = 4\nz = 0.5+0.5i\n[law]\nkind = shifted_exponential\nrate = 1\nshift = -1\n[simulate]\nmatrix = M\nesd_grid = -2,2,-2,2,11\n"},
      {"limit", "[limit]\nK = 1,0,0\ngrid = -2,2,-2,2,11\nnu_z = 0.5\nnu_points = 301\n"},
      {"compare", "[run]\nseed = 9\nn = 40, 60\nreplicas = 3\nz = 1+0.5i\n[law]\nkind = shifted_exponential\nrate = 1\nshift = -1\n[compare]\ngrid = -2,2,-2,2,9\n[limit]\nnu_points = 401\n"},
      {"diagnostics", "[run]\nseed = 4\nn = 60\nreplicas = 3\n[law]\nkind = exponential\nrate = 1\n[diagnostics]\nreports = edges, gap, invariant, small_sv, concentration\nconc_m = 20, 40\nconc_trials = 2000\n"},
      {"figures", ""}};
  for (const auto& [command, text] : runs) {
    const fs::path a = g_work / ("c12_" + command + "_a"), b = g_work / ("c12_" + command + "_b");
    fs::remove_all(a);
    fs::remove_all(b);
    cli::RunOptions oa;
    oa.out_dir = a.string();
    oa.jobs = g_jobs;
    const cli::RunManifest m = cli::run_command(command, cli::parse_config(text, command), oa);
    cli::RunOptions ob;
    ob.out_dir = b.string();
    ob.jobs = g_jobs + 1;
    cli::rerun((a / "manifest.json").string(), ob);
    std::size_t same = 0, csv = 0;
    for (const auto& f : m.outputs) {
      if (f.path.size() < 4 || f.path.substr(f.path.size() - 4) != ".csv") continue;
      ++csv;
      same += slurp(a / f.path) == slurp(b / f.path);
    }
    o.require(csv > 0 && same == csv, command + " " + std::to_string(same) + "/" + std::to_string(csv) + " CSVs identical");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  g_work = fs::temp_directory_path() / "rmgen_acceptance";
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--jobs" && k + 1 < argc) {
      g_jobs = static_cast<unsigned>(std::stoul(argv[++k]));
    } else if (a == "--work" && k + 1 < argc) {
      g_work = argv[++k];
    } else {
      only.push_back(std::stoi(a));
    }
  }
  fs::create_directories(g_work);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"hermitization identity", hermitization_identity},
      {"circular-law oracle", circular_oracle},
      {"semicircle fixed point", semicircle},
      {"moment identity", moment_identity},
      {"dual density routes", dual_routes},
      {"finite-n convergence", finite_n},
      {"quaternionic consistency", quaternionic},
      {"extremal eigenvalues", extremal},
      {"invariant measure", invariant},
      {"smallest singular values", small_sv},
      {"concentration function", concentration},
      {"reproducibility", reproducibility}};

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", id, criteria[k].first,
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !out.pass;
  }
  return failures;
}
