#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rmg/cli/config.hpp"
#include "rmg/cli/manifest.hpp"

namespace rmg::cli {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::string out_dir;  // from --out-dir; empty means unset
  bool emit_plot_script = false;
};

// --out-dir, then $RMGEN_OUT_DIR, then [run] out_dir, then ./rmgen_out.
std::string resolve_out_dir(const Config& c, const std::string& flag);

// Runs `command` (simulate, limit, compare, diagnostics, figures), writes its
// CSV/JSON outputs and manifest.json into the output directory, and returns the manifest.
RunManifest run_command(const std::string& command, const Config& c, const RunOptions& o);

// Re-executes the run recorded in a manifest (same config text and seed).
RunManifest rerun(const std::string& manifest_path, const RunOptions& o);

// Generic matplotlib script that plots whatever CSVs sit next to it.
const char* plot_script();

}  // namespace rmg::cli
