#include "rmg/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rmg/format.hpp"

namespace rmg::cli {

namespace {

struct Entry {
  std::string value;
  int line;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"run", {"command", "seed", "jobs", "n", "replicas", "delta", "out_dir", "z"}},
      {"law", {}},  // validated by law_from_description
      {"simulate", {"matrix", "singular_values", "esd_grid"}},
      {"limit",
       {"K", "grid", "laplacian", "laplacian_grid", "mass_radius", "nu_z", "nu_points", "nu_eps"}},
      {"compare", {"grid", "simulate_dir"}},
      {"diagnostics",
       {"reports", "slack_re", "slack_im", "conc_m", "conc_t", "conc_trials", "conc_resolution",
        "small_sv_z"}},
  };
  return keys;
}

std::string where(const std::string& origin, int line) {
  return origin + ":" + std::to_string(line) + ": ";
}

class Reader {
 public:
  Reader(const std::map<std::string, Section>& s, std::string origin)
      : sections_(s), origin_(std::move(origin)) {}

  const Entry* get(const std::string& sec, const std::string& key) const {
    auto it = sections_.find(sec);
    if (it == sections_.end()) return nullptr;
    auto jt = it->second.find(key);
    return jt == it->second.end() ? nullptr : &jt->second;
  }

  template <class F>
  auto wrap(const Entry& e, const std::string& key, F&& f) const {
    try {
      return f(e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(where(origin_, e.line) + key + ": " + err.what());
    }
  }

  void number(const std::string& sec, const std::string& key, double& out) const {
    if (const Entry* e = get(sec, key)) out = wrap(*e, key, [&](const std::string& v) { return parse_double(v, key); });
  }
  void count(const std::string& sec, const std::string& key, std::size_t& out, std::size_t min = 0) const {
    if (const Entry* e = get(sec, key)) out = wrap(*e, key, [&](const std::string& v) { return to_count(v, key, min); });
  }
  void boolean(const std::string& sec, const std::string& key, bool& out) const {
    if (const Entry* e = get(sec, key)) {
      out = wrap(*e, key, [&](const std::string& v) {
        if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
        if (v == "false" || v == "no" || v == "0" || v == "off") return false;
        throw ConfigError("expected a boolean, got '" + v + "'");
      });
    }
  }
  void text(const std::string& sec, const std::string& key, std::string& out) const {
    if (const Entry* e = get(sec, key)) out = e->value;
  }
  void complex_list(const std::string& sec, const std::string& key, std::vector<cplx>& out) const {
    if (const Entry* e = get(sec, key)) {
      out = wrap(*e, key, [&](const std::string& v) {
        std::vector<cplx> r;
        for (const auto& p : split_list(v)) r.push_back(parse_complex(p, key));
        return r;
      });
    }
  }
  void count_list(const std::string& sec, const std::string& key, std::vector<std::size_t>& out,
                  std::size_t min) const {
    if (const Entry* e = get(sec, key)) {
      out = wrap(*e, key, [&](const std::string& v) {
        std::vector<std::size_t> r;
        for (const auto& p : split_list(v)) r.push_back(to_count(p, key, min));
        if (r.empty()) throw ConfigError("empty list");
        return r;
      });
    }
  }
  void grid(const std::string& sec, const std::string& key, std::optional<GridSpec>& out) const {
    if (const Entry* e = get(sec, key)) out = wrap(*e, key, [&](const std::string& v) { return parse_grid(v, key); });
  }
  const std::string& origin() const { return origin_; }

  static std::size_t to_count(const std::string& v, const std::string& key, std::size_t min) {
    const double d = parse_double(v, key);
    if (!(d >= static_cast<double>(min)) || d != std::floor(d) || d > 1e15) {
      throw ConfigError("expected an integer >= " + std::to_string(min) + ", got '" + v + "'");
    }
    return static_cast<std::size_t>(d);
  }

 private:
  const std::map<std::string, Section>& sections_;
  std::string origin_;
};

}  // namespace

GridSpec parse_grid(const std::string& value, const std::string& what) {
  const auto parts = split_list(value);
  if (parts.size() != 5 && parts.size() != 6) {
    throw ConfigError(what + ": grid needs re_min,re_max,im_min,im_max,nodes[,nodes_im]");
  }
  GridSpec g;
  g.re_min = parse_double(parts[0], what);
  g.re_max = parse_double(parts[1], what);
  g.im_min = parse_double(parts[2], what);
  g.im_max = parse_double(parts[3], what);
  g.nodes_re = Reader::to_count(parts[4], what, 3);
  g.nodes_im = parts.size() == 6 ? Reader::to_count(parts[5], what, 3) : g.nodes_re;
  g.validate();
  return g;
}

Config parse_config(const std::string& text, const std::string& origin) {
  std::map<std::string, Section> sections;
  std::map<std::string, int> section_line;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  const auto& allowed = allowed_keys();
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = trim(raw);
    if (s.empty() || s.front() == '#' || s.front() == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where(origin, line) + "malformed section header");
      current = std::string(trim(s.substr(1, s.size() - 2)));
      if (!allowed.count(current)) throw ConfigError(where(origin, line) + "unknown section [" + current + "]");
      if (section_line.count(current)) throw ConfigError(where(origin, line) + "duplicate section [" + current + "]");
      section_line[current] = line;
      sections[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where(origin, line) + "expected 'key = value'");
    if (current.empty()) throw ConfigError(where(origin, line) + "key outside of any section");
    std::string key(trim(s.substr(0, eq)));
    std::string value(trim(s.substr(eq + 1)));
    const auto hash = value.find(" #");
    if (hash != std::string::npos) value = std::string(trim(value.substr(0, hash)));
    if (key.empty()) throw ConfigError(where(origin, line) + "empty key");
    const auto& keys = allowed.at(current);
    if (current != "law" && !keys.count(key)) {
      throw ConfigError(where(origin, line) + "unknown key '" + key + "' in [" + current + "]");
    }
    if (sections[current].count(key)) throw ConfigError(where(origin, line) + "duplicate key '" + key + "'");
    sections[current][key] = {value, line};
  }

  Config c;
  c.text = text;
  const Reader r(sections, origin);
  r.text("run", "command", c.command);
  if (const Entry* e = r.get("run", "seed")) {
    c.seed = r.wrap(*e, "seed", [](const std::string& v) {
      std::size_t pos = 0;
      unsigned long long s = 0;
      try {
        s = std::stoull(v, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != v.size() || v.empty() || v.front() == '-') throw ConfigError("expected an unsigned 64-bit seed");
      return static_cast<std::uint64_t>(s);
    });
  }
  std::size_t jobs = c.jobs;
  r.count("run", "jobs", jobs, 1);
  c.jobs = static_cast<unsigned>(jobs);
  r.count_list("run", "n", c.n_list, 2);
  r.count("run", "replicas", c.replicas);
  r.number("run", "delta", c.delta);
  r.text("run", "out_dir", c.out_dir);
  r.complex_list("run", "z", c.z_values);

  if (sections.count("law")) {
    std::map<std::string, std::string> desc;
    for (const auto& [k, e] : sections.at("law")) desc[k] = e.value;
    try {
      c.law = law_from_description(desc);
      (void)law_stats(c.law, c.n_list.front());
    } catch (const ConfigError& err) {
      throw ConfigError(where(origin, section_line.at("law")) + "[law]: " + err.what());
    }
    c.has_law = true;
  }

  r.text("simulate", "matrix", c.matrix);
  if (c.matrix != "L" && c.matrix != "Lbar" && c.matrix != "M" && c.matrix != "scaled") {
    const Entry* e = r.get("simulate", "matrix");
    throw ConfigError(where(origin, e ? e->line : 0) + "matrix must be one of L, Lbar, M, scaled");
  }
  r.boolean("simulate", "singular_values", c.singular_values);
  r.grid("simulate", "esd_grid", c.esd_grid);

  if (const Entry* e = r.get("limit", "K")) {
    if (e->value != "law") {
      c.K = r.wrap(*e, "K", [](const std::string& v) {
        const auto parts = split_list(v);
        if (parts.size() != 3) throw ConfigError("K needs k11,k12,k22");
        CovK k{parse_double(parts[0], "k11"), parse_double(parts[1], "k12"), parse_double(parts[2], "k22")};
        if (!k.is_psd()) throw ConfigError("K is not positive semidefinite");
        return k;
      });
    }
  }
  r.grid("limit", "grid", c.limit_grid);
  r.boolean("limit", "laplacian", c.laplacian);
  r.grid("limit", "laplacian_grid", c.laplacian_grid);
  r.number("limit", "mass_radius", c.mass_radius);
  r.complex_list("limit", "nu_z", c.nu_z);
  r.count("limit", "nu_points", c.nu_points, 3);
  r.number("limit", "nu_eps", c.nu_eps);
  if (!(c.nu_eps > 0.0 && c.nu_eps <= 0.1)) throw ConfigError(origin + ": [limit] nu_eps must lie in (0, 0.1]");

  std::optional<GridSpec> cg;
  r.grid("compare", "grid", cg);
  if (cg) c.compare_grid = *cg;
  r.text("compare", "simulate_dir", c.simulate_dir);

  if (const Entry* e = r.get("diagnostics", "reports")) {
    for (const auto& p : split_list(e->value)) {
      if (p != "edges" && p != "gap" && p != "invariant" && p != "small_sv" && p != "concentration") {
        throw ConfigError(where(origin, e->line) + "unknown report '" + p + "'");
      }
      c.reports.push_back(p);
    }
  }
  r.number("diagnostics", "slack_re", c.slack_re);
  r.number("diagnostics", "slack_im", c.slack_im);
  r.count_list("diagnostics", "conc_m", c.conc_m, 1);
  r.number("diagnostics", "conc_t", c.conc_t);
  r.count("diagnostics", "conc_trials", c.conc_trials, 1);
  r.number("diagnostics", "conc_resolution", c.conc_resolution);
  if (const Entry* e = r.get("diagnostics", "small_sv_z")) {
    c.small_sv_z = r.wrap(*e, "small_sv_z", [](const std::string& v) { return parse_complex(v, "small_sv_z"); });
  }
  return c;
}

Config load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

CovK effective_K(const Config& c, std::size_t n) {
  if (c.K) return *c.K;
  if (!c.has_law) throw ConfigError("limit side needs either [limit] K or a [law] section");
  const LawStats s = law_stats(c.law, n);
  return s.K.scaled(c.delta * c.delta);
}

}  // namespace rmg::cli
