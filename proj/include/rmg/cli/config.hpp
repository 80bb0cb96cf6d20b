#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmg/common.hpp"
#include "rmg/entry_laws.hpp"
#include "rmg/grid.hpp"

namespace rmg::cli {

// Run configuration. Text format:
//
//   # comment
//   [run]
//   command = simulate
//   seed = 7
//   [law]
//   kind = shifted_exponential
//   rate = 1
//
// Sections: run, law, simulate, limit, compare, diagnostics.
struct Config {
  std::string command;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::vector<std::size_t> n_list{500};
  std::size_t replicas = 1;
  double delta = 1.0;
  std::string out_dir;
  std::vector<cplx> z_values;

  bool has_law = false;
  EntryLaw law = law::ShiftedExponential{1.0, -1.0};

  // simulate
  std::string matrix = "scaled";  // L, Lbar, M, scaled (n^-1/2 L)
  bool singular_values = true;
  std::optional<GridSpec> esd_grid;

  // limit
  std::optional<CovK> K;  // absolute covariance; defaults to delta^2 times the law's K
  std::optional<GridSpec> limit_grid;
  bool laplacian = false;
  std::optional<GridSpec> laplacian_grid;
  double mass_radius = 4.0;
  std::vector<cplx> nu_z;
  std::size_t nu_points = 2001;
  double nu_eps = 1e-3;

  // compare
  GridSpec compare_grid{-2.0, 2.0, -2.0, 2.0, 21, 21};  // cells centred on nodes
  std::string simulate_dir;

  // diagnostics
  std::vector<std::string> reports;
  double slack_re = 1.2;
  double slack_im = 1.1;
  std::vector<std::size_t> conc_m{50, 100, 200, 400, 800};
  double conc_t = 1.0;
  std::size_t conc_trials = 20000;
  double conc_resolution = 4.0;
  cplx small_sv_z{1.0, 1.0};

  std::string text;  // source text, embedded verbatim in manifests
};

Config parse_config(const std::string& text, const std::string& origin = "config");
Config load_config_file(const std::string& path);

// Parses "re_min,re_max,im_min,im_max,nodes[,nodes_im]".
GridSpec parse_grid(const std::string& value, const std::string& what);

// K used by the limit side: explicit [limit] K, or delta^2 times the law's K.
CovK effective_K(const Config& c, std::size_t n);

}  // namespace rmg::cli
