#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace rmg::cli {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kCsvSchema = "1";

struct OutputFile {
  std::string path;  // relative to the manifest's directory
  std::string sha256;
  std::uintmax_t bytes = 0;
  bool operator==(const OutputFile&) const = default;
};

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string csv_schema = kCsvSchema;
  std::string command;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::map<std::string, std::string> law;
  std::vector<std::size_t> n_list;
  std::size_t replicas = 0;
  std::map<std::string, std::string> grids;
  std::map<std::string, std::string> tolerances;
  std::string started;
  std::string finished;
  std::string config_text;
  std::vector<OutputFile> outputs;
  bool operator==(const RunManifest&) const = default;
};

std::string to_json_text(const RunManifest& m);
RunManifest parse_manifest(const std::string& json_text);
RunManifest read_manifest(const std::string& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

// Files whose digest or size no longer match; empty when the manifest verifies.
std::vector<std::string> verify_manifest(const RunManifest& m, const std::string& dir);

std::string utc_timestamp();

}  // namespace rmg::cli
