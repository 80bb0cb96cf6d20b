#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rmg/cli/config.hpp"
#include "rmg/cli/manifest.hpp"
#include "rmg/cli/presets.hpp"
#include "rmg/cli/runner.hpp"
#include "rmg/common.hpp"

namespace {

struct Flags {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::string out_dir;
  bool plot = false;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "run configuration file");
  cmd->add_option("--preset", f.preset, "built-in configuration (see `rmgen presets`)");
  cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
  cmd->add_option("--jobs", f.jobs, "worker threads (overrides the config)");
  cmd->add_option("--out-dir", f.out_dir, "output directory (else $RMGEN_OUT_DIR, [run] out_dir, ./rmgen_out)");
  cmd->add_flag("--emit-plot-script", f.plot, "write plot.py next to the CSVs");
}

rmg::cli::Config load(const Flags& f, bool required) {
  using rmg::ConfigError;
  if (!f.config.empty() && !f.preset.empty()) throw ConfigError("use either --config or --preset, not both");
  if (!f.config.empty()) return rmg::cli::load_config_file(f.config);
  if (!f.preset.empty()) {
    const auto& p = rmg::cli::presets();
    const auto it = p.find(f.preset);
    if (it == p.end()) throw ConfigError("unknown preset '" + f.preset + "'");
    return rmg::cli::parse_config(it->second, "preset " + f.preset);
  }
  if (required) throw ConfigError("a --config or --preset is required");
  return rmg::cli::parse_config("", "defaults");
}

rmg::cli::RunOptions options(const Flags& f) {
  return {f.seed, f.jobs, f.out_dir, f.plot};
}

void report(const rmg::cli::RunManifest& m, const rmg::cli::Config& c, const std::string& flag) {
  std::cout << m.command << ": " << m.outputs.size() << " file(s) in " << rmg::cli::resolve_out_dir(c, flag)
            << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random Markov generators and their limiting spectral laws"};
  app.require_subcommand(1);
  Flags flags;
  std::string manifest_path;

  const char* commands[] = {"simulate", "limit", "compare", "diagnostics", "figures"};
  const char* help[] = {"sample generators and write eigenvalues / singular values",
                        "evaluate the limiting density, f, support and nu_z on grids",
                        "distances between finite-n spectra and the limit",
                        "edge, gap, invariant-measure, small singular value and concentration reports",
                        "regenerate the data behind the two eigenvalue scatter figures"};
  for (int k = 0; k < 5; ++k) add_run_flags(app.add_subcommand(commands[k], help[k]), flags);
  auto* run = app.add_subcommand("run", "run the command named in the config's [run] section");
  add_run_flags(run, flags);
  auto* rerun = app.add_subcommand("rerun", "re-execute the run recorded in a manifest");
  rerun->add_option("--manifest", manifest_path, "manifest.json of the earlier run")->required();
  rerun->add_option("--jobs", flags.jobs, "worker threads");
  rerun->add_option("--out-dir", flags.out_dir, "output directory");
  auto* verify = app.add_subcommand("verify", "check output digests against a manifest");
  verify->add_option("--manifest", manifest_path, "manifest.json to check")->required();
  auto* list = app.add_subcommand("presets", "list built-in presets, or print one");
  std::string show;
  list->add_option("name", show, "preset to print");

  CLI11_PARSE(app, argc, argv);

  try {
    for (int k = 0; k < 5; ++k) {
      if (app.got_subcommand(commands[k])) {
        const auto c = load(flags, k != 4);
        report(rmg::cli::run_command(commands[k], c, options(flags)), c, flags.out_dir);
        return 0;
      }
    }
    if (run->parsed()) {
      const auto c = load(flags, true);
      if (c.command.empty()) throw rmg::ConfigError("config has no [run] command");
      report(rmg::cli::run_command(c.command, c, options(flags)), c, flags.out_dir);
      return 0;
    }
    if (rerun->parsed()) {
      const auto m = rmg::cli::rerun(manifest_path, options(flags));
      std::cout << m.command << ": " << m.outputs.size() << " file(s) rewritten\n";
      return 0;
    }
    if (verify->parsed()) {
      const auto m = rmg::cli::read_manifest(manifest_path);
      std::string dir = manifest_path;
      const auto slash = dir.find_last_of('/');
      dir = slash == std::string::npos ? "." : dir.substr(0, slash);
      const auto bad = rmg::cli::verify_manifest(m, dir);
      for (const auto& b : bad) std::cout << "MISMATCH " << b << "\n";
      if (bad.empty()) std::cout << "ok: " << m.outputs.size() << " file(s) verified\n";
      return bad.empty() ? 0 : 1;
    }
    if (list->parsed()) {
      const auto& p = rmg::cli::presets();
      if (show.empty()) {
        for (const auto& [name, text] : p) std::cout << name << "\n";
        return 0;
      }
      const auto it = p.find(show);
      if (it == p.end()) throw rmg::ConfigError("unknown preset '" + show + "'");
      std::cout << it->second;
      return 0;
    }
  } catch (const rmg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const rmg::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
