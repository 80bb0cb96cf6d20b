#include "rmg/cli/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rmg/cli/presets.hpp"
#include "rmg/compare.hpp"
#include "rmg/diagnostics.hpp"
#include "rmg/ensemble.hpp"
#include "rmg/format.hpp"
#include "rmg/limit_law.hpp"
#include "rmg/parallel.hpp"
#include "rmg/rng.hpp"
#include "rmg/spectra.hpp"

namespace rmg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fd(double x) { return format_double(x); }

class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    for (const auto& f : files_) {
      if (f.path == name) throw std::logic_error("output written twice: " + name);
    }
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + (dir_ / name).string() + "'");
    out << content;
    out.close();
    files_.push_back({name, sha256_hex(content), content.size()});
  }
  const std::vector<OutputFile>& files() const { return files_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<OutputFile> files_;
};

struct Context {
  const Config& c;
  std::uint64_t seed;
  unsigned jobs;
  Outputs& out;
  RunManifest& manifest;
  json report = json::object();
};

std::string grid_text(const GridSpec& g) {
  return fd(g.re_min) + "," + fd(g.re_max) + "," + fd(g.im_min) + "," + fd(g.im_max) + "," +
         std::to_string(g.nodes_re) + "," + std::to_string(g.nodes_im);
}

std::uint64_t replica_seed(std::uint64_t master, std::size_t n, std::size_t r) {
  return derive_seed(derive_seed(master, n), r);
}

void require_law(const Config& c, const std::string& what) {
  if (!c.has_law) throw ConfigError(what + " needs a [law] section");
}

CMatrix matrix_for(const std::string& kind, const GeneratorSample& s, const LawStats& stats) {
  if (kind == "L") return s.L;
  if (kind == "Lbar") return center(s, stats).L;
  if (kind == "M") return rescale(s, stats);
  return s.L / std::sqrt(static_cast<double>(s.n));
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

// ---------------------------------------------------------------- simulate

void run_simulate(Context& ctx, const std::string& prefix = "") {
  const Config& c = ctx.c;
  require_law(c, "simulate");
  if (c.replicas == 0) return;
  std::string eig_csv = "n,replica,index,re,im\n";
  std::string sv_csv = "n,replica,z_re,z_im,index,s\n";
  std::string esd_csv = "n,re,im,mass,density\n";
  const bool want_sv = c.singular_values && !c.z_values.empty();
  json esd_meta = json::array();
  for (std::size_t n : c.n_list) {
    const LawStats stats = law_stats(c.law, n);
    std::vector<std::vector<cplx>> eig(c.replicas);
    std::vector<std::vector<std::vector<double>>> sv(c.replicas);
    parallel_for(c.replicas, ctx.jobs, [&](std::size_t r) {
      const std::uint64_t seed = replica_seed(ctx.seed, n, r);
      const GeneratorSample s = sample_generator(c.law, n, c.delta, seed);
      const CMatrix A = matrix_for(c.matrix, s, stats);
      eig[r] = eigenvalues(A, seed);
      if (want_sv) {
        for (const cplx& z : c.z_values) sv[r].push_back(singular_values(A, z, seed));
      }
    });
    std::vector<cplx> pooled;
    for (std::size_t r = 0; r < c.replicas; ++r) {
      for (std::size_t i = 0; i < eig[r].size(); ++i) {
        eig_csv += std::to_string(n) + "," + std::to_string(r) + "," + std::to_string(i) + "," +
                   fd(eig[r][i].real()) + "," + fd(eig[r][i].imag()) + "\n";
      }
      pooled.insert(pooled.end(), eig[r].begin(), eig[r].end());
      for (std::size_t zi = 0; want_sv && zi < c.z_values.size(); ++zi) {
        const cplx z = c.z_values[zi];
        for (std::size_t i = 0; i < sv[r][zi].size(); ++i) {
          sv_csv += std::to_string(n) + "," + std::to_string(r) + "," + fd(z.real()) + "," +
                    fd(z.imag()) + "," + std::to_string(i) + "," + fd(sv[r][zi][i]) + "\n";
        }
      }
    }
    if (c.esd_grid) {
      const EsdSummary e = esd_summary(pooled, *c.esd_grid);
      for (std::size_t k = 0; k < e.grid.size(); ++k) {
        const cplx node = e.grid.node(k);
        esd_csv += std::to_string(n) + "," + fd(node.real()) + "," + fd(node.imag()) + "," +
                   fd(e.histogram[k]) + "," + fd(e.kde[k]) + "\n";
      }
      esd_meta.push_back({{"n", n},
                          {"bandwidth_re", e.bandwidth_re},
                          {"bandwidth_im", e.bandwidth_im},
                          {"outside_mass", e.outside_mass},
                          {"count", e.count},
                          {"kernel", "gaussian product, Silverman sd*N^(-1/6) per axis"}});
    }
  }
  ctx.out.write(prefix + "eigenvalues.csv", eig_csv);
  if (want_sv) ctx.out.write(prefix + "singular_values.csv", sv_csv);
  if (c.esd_grid) {
    ctx.out.write(prefix + "esd.csv", esd_csv);
    ctx.manifest.grids[prefix + "esd_grid"] = grid_text(*c.esd_grid);
    ctx.report[prefix + "esd"] = esd_meta;
  }
}

// ------------------------------------------------------------------- limit

void run_limit(Context& ctx) {
  const Config& c = ctx.c;
  const GaussianSpec spec = gaussian_spec(effective_K(c, c.n_list.front()));
  const GridSpec grid = c.limit_grid.value_or(GridSpec::square(-2.0, 2.0, 41));
  grid.validate();
  ctx.manifest.grids["limit_grid"] = grid_text(grid);
  ctx.manifest.tolerances["nu_eps"] = fd(c.nu_eps);
  ctx.manifest.tolerances["nu_points"] = std::to_string(c.nu_points);

  std::vector<FSolution> f(grid.size());
  std::vector<double> dens(grid.size());
  parallel_for(grid.size(), ctx.jobs, [&](std::size_t k) {
    const cplx z = grid.node(k);
    try {
      f[k] = solve_f_detailed(z, spec);
      dens[k] = brown_density(z, spec);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (grid node " + format_complex(z) + ")", e.residual());
    }
  });
  std::string d_csv = "re,im,density\n", f_csv = "re,im,f,log_f\n", s_csv = "re,im,in_support\n";
  std::size_t inside = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const cplx z = grid.node(k);
    const std::string xy = fd(z.real()) + "," + fd(z.imag()) + ",";
    d_csv += xy + fd(dens[k]) + "\n";
    f_csv += xy + fd(f[k].f) + "," + fd(f[k].log_f) + "\n";
    s_csv += xy + (f[k].in_support ? "1" : "0") + "\n";
    inside += f[k].in_support;
  }
  ctx.out.write("density.csv", d_csv);
  ctx.out.write("f.csv", f_csv);
  ctx.out.write("support.csv", s_csv);
  ctx.report["K"] = {spec.K.k11, spec.K.k12, spec.K.k22};
  ctx.report["rank"] = spec.rank;
  ctx.report["nodes_in_support"] = inside;

  if (!c.nu_z.empty()) {
    std::string nu_csv = "z_re,z_im,s,density\n";
    json nu = json::array();
    for (const cplx& z : c.nu_z) {
      const std::vector<double> s = default_s_grid(z, spec, c.nu_points);
      const std::vector<double> d = nu_z_density(z, s, c.nu_eps, spec);
      double m0 = 0.0, m2 = 0.0;
      for (std::size_t k = 0; k < s.size(); ++k) {
        nu_csv += fd(z.real()) + "," + fd(z.imag()) + "," + fd(s[k]) + "," + fd(d[k]) + "\n";
        if (k) {
          const double h = s[k] - s[k - 1];
          m0 += 0.5 * h * (d[k] + d[k - 1]);
          m2 += 0.5 * h * (d[k] * s[k] * s[k] + d[k - 1] * s[k - 1] * s[k - 1]);
        }
      }
      nu.push_back({{"z", complex_json(z)},
                    {"mass", m0},
                    {"second_moment", m2},
                    {"expected_second_moment", 1.0 + spec.K.trace() + std::norm(z)}});
    }
    ctx.out.write("nu_z.csv", nu_csv);
    ctx.report["nu_z"] = nu;
  }

  if (c.laplacian) {
    const GridSpec lg = c.laplacian_grid.value_or(grid);
    ctx.manifest.grids["laplacian_grid"] = grid_text(lg);
    const LaplacianDensity lap = density_via_laplacian(lg, spec, ctx.jobs);
    std::vector<double> brown(lg.size());
    std::vector<char> support(lg.size());
    if (lg == grid) {
      brown = dens;
      for (std::size_t k = 0; k < lg.size(); ++k) support[k] = f[k].in_support;
    } else {
      parallel_for(lg.size(), ctx.jobs, [&](std::size_t k) {
        brown[k] = brown_density(lg.node(k), spec);
        support[k] = support_indicator(lg.node(k), spec);
      });
    }
    const RouteComparison cmp = compare_density_routes(lap, brown, support, c.mass_radius);
    std::string l_csv = "re,im,U,density,raw,interior\n";
    for (std::size_t k = 0; k < lg.size(); ++k) {
      const cplx z = lg.node(k);
      l_csv += fd(z.real()) + "," + fd(z.imag()) + "," + fd(lap.potential[k]) + "," +
               fd(lap.density[k]) + "," + fd(lap.raw[k]) + "," + (lap.interior[k] ? "1" : "0") + "\n";
    }
    ctx.out.write("laplacian.csv", l_csv);
    ctx.report["laplacian"] = {{"max_abs_diff", cmp.max_abs_diff},
                               {"compared_nodes", cmp.compared},
                               {"mass", cmp.mass},
                               {"mass_radius", c.mass_radius},
                               {"clipped_max", lap.clipped_max},
                               {"clipped_mass", lap.clipped_mass}};
  }
}

// ----------------------------------------------------------------- compare

struct Pooled {
  std::vector<cplx> eigs;
  std::vector<std::vector<double>> sv;  // per z, sorted ascending
};

Pooled read_simulation(const Config& c, std::size_t n, const fs::path& dir) {
  Pooled p;
  p.sv.resize(c.z_values.size());
  std::ifstream in(dir / "eigenvalues.csv");
  if (!in) throw ConfigError("compare: cannot read " + (dir / "eigenvalues.csv").string());
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto parts = split_list(line);
    if (parts.size() != 5) throw ConfigError("compare: malformed eigenvalues.csv row '" + line + "'");
    if (std::stoull(parts[0]) != n) continue;
    p.eigs.emplace_back(parse_double(parts[3]), parse_double(parts[4]));
  }
  std::ifstream sin(dir / "singular_values.csv");
  if (sin) {
    std::getline(sin, line);
    while (std::getline(sin, line)) {
      const auto parts = split_list(line);
      if (parts.size() != 6) throw ConfigError("compare: malformed singular_values.csv row '" + line + "'");
      if (std::stoull(parts[0]) != n) continue;
      const cplx z(parse_double(parts[2]), parse_double(parts[3]));
      for (std::size_t zi = 0; zi < c.z_values.size(); ++zi) {
        if (c.z_values[zi] == z) p.sv[zi].push_back(parse_double(parts[5]));
      }
    }
  }
  for (auto& v : p.sv) std::sort(v.begin(), v.end());
  if (p.eigs.empty()) throw ConfigError("compare: no eigenvalues for n = " + std::to_string(n) + " in " + dir.string());
  return p;
}

void run_compare(Context& ctx) {
  const Config& c = ctx.c;
  require_law(c, "compare");
  if (c.z_values.empty()) throw ConfigError("compare needs [run] z values for the singular-value KS test");
  c.compare_grid.validate();
  ctx.manifest.grids["compare_grid"] = grid_text(c.compare_grid);
  ctx.manifest.tolerances["nu_eps"] = fd(c.nu_eps);

  if (!c.simulate_dir.empty()) {
    const RunManifest sm = read_manifest((fs::path(c.simulate_dir) / "manifest.json").string());
    const Config sc = parse_config(sm.config_text, "simulate manifest");
    if (sc.matrix != "M" && !(sc.matrix == "scaled" && law_stats(sc.law, sc.n_list.front()).mean == cplx(0.0))) {
      throw ConfigError("compare: simulate_dir must hold eigenvalues of M");
    }
    const CovK theirs = effective_K(sc, sc.n_list.front());
    const CovK ours = effective_K(c, c.n_list.front());
    if (std::abs(theirs.k11 - ours.k11) > 1e-12 || std::abs(theirs.k12 - ours.k12) > 1e-12 ||
        std::abs(theirs.k22 - ours.k22) > 1e-12) {
      throw ConfigError("compare: K of the simulation does not match K of the limit side");
    }
  }

  std::string ks_csv = "n,z_re,z_im,ks\n", l1_csv = "n,l1,outside_mass\n";
  json rows = json::array();
  std::vector<std::vector<double>> ks_by_z(c.z_values.size());
  std::vector<double> l1s;
  std::optional<CovK> cached_K;
  std::vector<NuCdf> cdfs;
  std::vector<double> cell_mass;
  for (std::size_t n : c.n_list) {
    const CovK K = effective_K(c, n);
    const GaussianSpec spec = gaussian_spec(K);
    if (!cached_K || !(*cached_K == K)) {
      cdfs.clear();
      for (const cplx& z : c.z_values) cdfs.emplace_back(z, spec, c.nu_points, c.nu_eps);
      cell_mass = limit_cell_masses(c.compare_grid, spec, ctx.jobs);
      cached_K = K;
    }
    Pooled p;
    if (!c.simulate_dir.empty()) {
      p = read_simulation(c, n, c.simulate_dir);
    } else {
      const LawStats stats = law_stats(c.law, n);
      std::vector<std::vector<cplx>> eig(c.replicas);
      std::vector<std::vector<std::vector<double>>> sv(c.replicas);
      parallel_for(c.replicas, ctx.jobs, [&](std::size_t r) {
        const std::uint64_t seed = replica_seed(ctx.seed, n, r);
        const CMatrix M = rescale(sample_generator(c.law, n, c.delta, seed), stats);
        eig[r] = eigenvalues(M, seed);
        for (const cplx& z : c.z_values) sv[r].push_back(singular_values(M, z, seed));
      });
      p.sv.resize(c.z_values.size());
      for (std::size_t r = 0; r < c.replicas; ++r) {
        p.eigs.insert(p.eigs.end(), eig[r].begin(), eig[r].end());
        for (std::size_t zi = 0; zi < c.z_values.size(); ++zi) {
          p.sv[zi].insert(p.sv[zi].end(), sv[r][zi].begin(), sv[r][zi].end());
        }
      }
      for (auto& v : p.sv) std::sort(v.begin(), v.end());
    }
    if (p.eigs.empty()) throw ConfigError("compare: no replicas to compare");
    json row{{"n", n}};
    json ks_row = json::array();
    for (std::size_t zi = 0; zi < c.z_values.size(); ++zi) {
      const double ks = ks_distance(p.sv[zi], [&](double s) { return cdfs[zi](s); });
      ks_by_z[zi].push_back(ks);
      ks_csv += std::to_string(n) + "," + fd(c.z_values[zi].real()) + "," + fd(c.z_values[zi].imag()) + "," + fd(ks) + "\n";
      ks_row.push_back({{"z", complex_json(c.z_values[zi])}, {"ks", ks}});
    }
    const EsdSummary e = esd_summary(p.eigs, c.compare_grid);
    const double l1 = l1_distance(e.histogram, e.outside_mass, cell_mass);
    l1s.push_back(l1);
    l1_csv += std::to_string(n) + "," + fd(l1) + "," + fd(e.outside_mass) + "\n";
    row["ks"] = ks_row;
    row["l1"] = l1;
    rows.push_back(row);
  }
  auto decreasing = [](const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k) {
      if (!(v[k] < v[k - 1])) return false;
    }
    return true;
  };
  bool ks_dec = true;
  for (const auto& v : ks_by_z) ks_dec = ks_dec && decreasing(v);
  ctx.out.write("ks.csv", ks_csv);
  ctx.out.write("l1.csv", l1_csv);
  ctx.report["per_n"] = rows;
  ctx.report["ks_decreasing"] = ks_dec;
  ctx.report["l1_decreasing"] = decreasing(l1s);
  ctx.report["limit_K"] = {cached_K->k11, cached_K->k12, cached_K->k22};
}

// ------------------------------------------------------------- diagnostics

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void run_diagnostics(Context& ctx) {
  const Config& c = ctx.c;
  require_law(c, "diagnostics");
  if (c.reports.empty()) throw ConfigError("diagnostics needs [diagnostics] reports");
  ctx.manifest.tolerances["slack_re"] = fd(c.slack_re);
  ctx.manifest.tolerances["slack_im"] = fd(c.slack_im);
  auto wants = [&](const char* r) { return std::find(c.reports.begin(), c.reports.end(), r) != c.reports.end(); };
  const EdgeSlack slack{c.slack_re, c.slack_im};

  if (wants("edges")) {
    std::string csv = "n,replica,max_abs_re_centered,max_abs_im_centered,max_abs_re_shifted,envelope_re,envelope_im,margin_re,margin_im,margin_shifted,within\n";
    json summary = json::array();
    for (std::size_t n : c.n_list) {
      const LawStats stats = law_stats(c.law, n);
      std::vector<EdgeReport> reps(c.replicas);
      parallel_for(c.replicas, ctx.jobs, [&](std::size_t r) {
        reps[r] = edge_report(sample_generator(c.law, n, 1.0, replica_seed(ctx.seed, n, r)), stats);
      });
      double mre = 0.0, mim = 0.0, msh = 0.0;
      std::size_t within = 0;
      for (std::size_t r = 0; r < reps.size(); ++r) {
        const EdgeReport& e = reps[r];
        csv += std::to_string(n) + "," + std::to_string(r) + "," + fd(e.max_abs_re_centered) + "," +
               fd(e.max_abs_im_centered) + "," + fd(e.max_abs_re_shifted) + "," + fd(e.envelope_re) + "," +
               fd(e.envelope_im) + "," + fd(e.margin_re) + "," + fd(e.margin_im) + "," +
               fd(e.margin_shifted) + "," + (e.within(slack) ? "1" : "0") + "\n";
        mre = std::max(mre, e.margin_re);
        mim = std::max(mim, e.margin_im);
        msh = std::max(msh, e.margin_shifted);
        within += e.within(slack);
      }
      summary.push_back({{"n", n}, {"max_margin_re", mre}, {"max_margin_im", mim},
                         {"max_margin_shifted", msh}, {"replicas_within", within}});
    }
    ctx.out.write("edges.csv", csv);
    ctx.report["edges"] = summary;
  }

  if (wants("gap")) {
    std::string csv = "n,replica,kappa,zero_count,reducible_suspect,bound\n";
    for (std::size_t n : c.n_list) {
      const LawStats stats = law_stats(c.law, n);
      const double nn = static_cast<double>(n);
      const double bound = stats.mean.real() * nn - stats.sigma() * std::sqrt(2.0 * nn * std::log(nn)) * (1.0 + 0.1);
      std::vector<GapResult> gaps(c.replicas);
      parallel_for(c.replicas, ctx.jobs, [&](std::size_t r) {
        gaps[r] = spectral_gap(sample_generator(c.law, n, 1.0, replica_seed(ctx.seed, n, r)));
      });
      for (std::size_t r = 0; r < gaps.size(); ++r) {
        csv += std::to_string(n) + "," + std::to_string(r) + "," + fd(gaps[r].kappa) + "," +
               std::to_string(gaps[r].zero_count) + "," + (gaps[r].reducible_suspect ? "1" : "0") + "," +
               fd(bound) + "\n";
      }
    }
    ctx.out.write("gap.csv", csv);
  }

  if (wants("invariant")) {
    std::string csv = "n,replica,irreducible,tv,tv_scaled,perturbative_gap,rcond\n";
    std::string sum_csv = "n,median_tv,median_tv_scaled,max_perturbative_gap\n";
    json summary = json::array();
    for (std::size_t n : c.n_list) {
      const LawStats stats = law_stats(c.law, n);
      const double nn = static_cast<double>(n);
      const double scale = std::sqrt(nn / std::log(nn));
      struct Row {
        bool irreducible = false;
        double tv = 0.0, gap = 0.0, rcond = 0.0;
      };
      std::vector<Row> rows(c.replicas);
      parallel_for(c.replicas, ctx.jobs, [&](std::size_t r) {
        const GeneratorSample s = sample_generator(c.law, n, 1.0, replica_seed(ctx.seed, n, r));
        Row& row = rows[r];
        row.irreducible = is_irreducible(s.L);
        if (!row.irreducible) return;
        const PerturbativeResult p = invariant_perturbative(s, stats);
        row.tv = tv_uniform(invariant_measure(s.L));
        row.gap = p.gap;
        row.rcond = p.rcond;
      });
      std::vector<double> tvs;
      double max_gap = 0.0;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        csv += std::to_string(n) + "," + std::to_string(r) + "," + (rows[r].irreducible ? "1" : "0") + "," +
               fd(rows[r].tv) + "," + fd(rows[r].tv * scale) + "," + fd(rows[r].gap) + "," + fd(rows[r].rcond) + "\n";
        if (rows[r].irreducible) tvs.push_back(rows[r].tv);
        max_gap = std::max(max_gap, rows[r].gap);
      }
      const double med = median(tvs);
      sum_csv += std::to_string(n) + "," + fd(med) + "," + fd(med * scale) + "," + fd(max_gap) + "\n";
      summary.push_back({{"n", n}, {"median_tv", med}, {"median_tv_scaled", med * scale}, {"max_perturbative_gap", max_gap}});
    }
    ctx.out.write("invariant.csv", csv);
    ctx.out.write("invariant_summary.csv", sum_csv);
    ctx.report["invariant"] = summary;
  }

  if (wants("small_sv")) {
    std::string csv = "n,replica,s_n\n";
    json summary = json::array();
    for (std::size_t n : c.n_list) {
      const SmallSvReport rep = small_sv_report(c.law, n, c.small_sv_z, c.replicas, derive_seed(ctx.seed, n), ctx.jobs);
      for (std::size_t r = 0; r < rep.sn.size(); ++r) {
        csv += std::to_string(n) + "," + std::to_string(r) + "," + fd(rep.sn[r]) + "\n";
      }
      summary.push_back({{"n", n}, {"z", complex_json(c.small_sv_z)}, {"frac_quasi", rep.frac_quasi},
                         {"frac_moderate", rep.frac_moderate}, {"min_sn", rep.min_sn}, {"pairs", rep.pairs}});
    }
    ctx.out.write("small_sv.csv", csv);
    ctx.report["small_sv"] = summary;
  }

  if (wants("concentration")) {
    std::string csv = "m,t,value,std_error,scaled,centers\n";
    for (std::size_t m : c.conc_m) {
      const LawStats stats = law_stats(c.law, m);
      const std::vector<cplx> x(m, cplx(1.0, 0.0));
      const ConcentrationResult r = concentration_fn(x, c.law, c.conc_t, c.conc_trials, c.conc_resolution, derive_seed(ctx.seed, m));
      csv += std::to_string(m) + "," + fd(c.conc_t) + "," + fd(r.value) + "," + fd(r.std_error) + "," +
             fd(r.value * stats.sigma() * std::sqrt(static_cast<double>(m))) + "," + std::to_string(r.centers) + "\n";
    }
    ctx.out.write("concentration.csv", csv);
    ctx.report["concentration_note"] = "maximum over thinned sample centres: biased upward by the max, downward by centre placement";
  }
}

// ----------------------------------------------------------------- figures

void run_figures(Context& ctx) {
  const char* names[] = {"figure1a", "figure1b"};
  for (std::size_t k = 0; k < 2; ++k) {
    const Config fc = parse_config(presets().at(names[k]), names[k]);
    Context sub{fc, derive_seed(ctx.seed, k), ctx.jobs, ctx.out, ctx.manifest};
    run_simulate(sub, std::string(names[k]) + "_");
    ctx.report[names[k]] = sub.report;
  }
}

}  // namespace

std::string resolve_out_dir(const Config& c, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("RMGEN_OUT_DIR"); env && *env) return env;
  if (!c.out_dir.empty()) return c.out_dir;
  return "rmgen_out";
}

RunManifest run_command(const std::string& command, const Config& c, const RunOptions& o) {
  if (command != "simulate" && command != "limit" && command != "compare" && command != "diagnostics" &&
      command != "figures") {
    throw ConfigError("unknown command '" + command + "'");
  }
  const fs::path dir = resolve_out_dir(c, o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());

  RunManifest m;
  m.command = command;
  m.seed = o.seed.value_or(c.seed);
  m.jobs = o.jobs.value_or(c.jobs);
  if (m.jobs == 0) throw ConfigError("--jobs must be at least 1");
  if (c.has_law) m.law = describe(c.law);
  m.n_list = c.n_list;
  m.replicas = c.replicas;
  m.config_text = c.text;
  m.started = utc_timestamp();
  m.tolerances["solver_residual"] = "1e-10";
  m.tolerances["fixed_point_residual"] = "1e-9";
  m.tolerances["gauss_hermite_nodes"] = "200";

  Outputs out(dir);
  Context ctx{c, m.seed, m.jobs, out, m};
  if (command == "simulate") run_simulate(ctx);
  if (command == "limit") run_limit(ctx);
  if (command == "compare") run_compare(ctx);
  if (command == "diagnostics") run_diagnostics(ctx);
  if (command == "figures") run_figures(ctx);
  if (!ctx.report.empty()) out.write("report.json", ctx.report.dump(2) + "\n");
  if (o.emit_plot_script) out.write("plot.py", plot_script());
  m.outputs = out.files();
  m.finished = utc_timestamp();
  std::ofstream mf(dir / "manifest.json", std::ios::binary);
  mf << to_json_text(m);
  if (!mf) throw ConfigError("cannot write manifest in '" + dir.string() + "'");
  return m;
}

RunManifest rerun(const std::string& manifest_path, const RunOptions& o) {
  const RunManifest m = read_manifest(manifest_path);
  const Config c = parse_config(m.config_text, manifest_path + " (embedded config)");
  RunOptions opts = o;
  opts.seed = m.seed;
  if (!opts.jobs) opts.jobs = m.jobs;
  return run_command(m.command, c, opts);
}

const char* plot_script() {
  return R"py(#!/usr/bin/env python3
# Plots the CSV files found next to this script.
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

here = os.path.dirname(os.path.abspath(__file__)) if len(sys.argv) < 2 else sys.argv[1]


def grid_image(df, col, title, out):
    piv = df.pivot_table(index="im", columns="re", values=col)
    fig, ax = plt.subplots(figsize=(5, 4.5))
    im = ax.imshow(piv.values, origin="lower", aspect="equal",
                   extent=[piv.columns.min(), piv.columns.max(), piv.index.min(), piv.index.max()])
    fig.colorbar(im, ax=ax)
    ax.set_title(title)
    fig.savefig(os.path.join(here, out), dpi=130)
    plt.close(fig)


for name in sorted(os.listdir(here)):
    path = os.path.join(here, name)
    if not name.endswith(".csv"):
        continue
    df = pd.read_csv(path)
    stem = name[:-4]
    if stem.endswith("eigenvalues"):
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.scatter(df["re"], df["im"], s=0.5, c="k")
        ax.set_aspect("equal")
        ax.set_title(stem)
        fig.savefig(os.path.join(here, stem + ".png"), dpi=130)
        plt.close(fig)
    elif stem.endswith("esd"):
        for n, part in df.groupby("n"):
            grid_image(part, "density", f"{stem} KDE n={n}", f"{stem}_{n}.png")
    elif stem in ("density", "f"):
        grid_image(df, df.columns[2], stem, stem + ".png")
    elif stem == "laplacian":
        grid_image(df, "density", "laplacian route", "laplacian.png")
    elif stem == "nu_z":
        fig, ax = plt.subplots()
        for (zr, zi), part in df.groupby(["z_re", "z_im"]):
            ax.plot(part["s"], part["density"], label=f"z={zr}+{zi}i")
        ax.legend()
        fig.savefig(os.path.join(here, "nu_z.png"), dpi=130)
        plt.close(fig)
)py";
}

}  // namespace rmg::cli
