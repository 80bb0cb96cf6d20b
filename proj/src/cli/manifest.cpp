#include "rmg/cli/manifest.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "rmg/common.hpp"

namespace rmg::cli {

using nlohmann::json;

std::string to_json_text(const RunManifest& m) {
  json j;
  j["tool_version"] = m.tool_version;
  j["csv_schema"] = m.csv_schema;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["jobs"] = m.jobs;
  j["law"] = m.law;
  j["n"] = m.n_list;
  j["replicas"] = m.replicas;
  j["grids"] = m.grids;
  j["tolerances"] = m.tolerances;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["config"] = m.config_text;
  json files = json::array();
  for (const auto& f : m.outputs) files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["outputs"] = files;
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& text) {
  RunManifest m;
  try {
    const json j = json::parse(text);
    m.tool_version = j.at("tool_version").get<std::string>();
    m.csv_schema = j.at("csv_schema").get<std::string>();
    m.command = j.at("command").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.jobs = j.at("jobs").get<unsigned>();
    m.law = j.at("law").get<std::map<std::string, std::string>>();
    m.n_list = j.at("n").get<std::vector<std::size_t>>();
    m.replicas = j.at("replicas").get<std::size_t>();
    m.grids = j.at("grids").get<std::map<std::string, std::string>>();
    m.tolerances = j.at("tolerances").get<std::map<std::string, std::string>>();
    m.started = j.at("started").get<std::string>();
    m.finished = j.at("finished").get<std::string>();
    m.config_text = j.at("config").get<std::string>();
    for (const auto& f : j.at("outputs")) {
      m.outputs.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                           f.at("bytes").get<std::uintmax_t>()});
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open manifest '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

std::vector<std::string> verify_manifest(const RunManifest& m, const std::string& dir) {
  std::vector<std::string> bad;
  for (const auto& f : m.outputs) {
    const auto p = std::filesystem::path(dir) / f.path;
    std::error_code ec;
    if (!std::filesystem::exists(p, ec) || std::filesystem::file_size(p, ec) != f.bytes ||
        sha256_file(p.string()) != f.sha256) {
      bad.push_back(f.path);
    }
  }
  return bad;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace rmg::cli
