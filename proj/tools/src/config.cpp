#include "hkglab_cli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace hkglab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw ConfigError(key + ": expected a finite number, got '" + v + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

InitKind init_from_string(const std::string& v) {
  if (v == "gaussian") return InitKind::gaussian;
  if (v == "constant") return InitKind::constant;
  if (v == "eigenmode") return InitKind::eigenmode;
  if (v == "synthetic_cert") return InitKind::synthetic_cert;
  throw ConfigError("init.kind: unknown kind '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
using Getter = std::function<std::string(const RunConfig&)>;

bool synthetic_only(const std::string& key) {
  return key == "cert.norm_u0_sq" || key == "cert.re_u0u1" || key == "cert.E0" || key == "cert.I_u0";
}

struct Key {
  const char* name;
  Setter set;
  Getter get;
};

#define HK_DOUBLE(key, member)                                                                \
  Key {                                                                                       \
    key, [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_double(k, v); }, \
        [](const RunConfig& c) { return num(c.member); }                                      \
  }
#define HK_INT(key, member)                                                                   \
  Key {                                                                                       \
    key, [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_int(k, v); }, \
        [](const RunConfig& c) { return std::to_string(c.member); }                           \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      HK_INT("n", n),
      {"bc",
       [](RunConfig& c, const std::string&, const std::string& v) {
         try {
           c.bc = boundary_from_string(v);
         } catch (const InputError& e) {
           throw ConfigError(std::string("bc: ") + e.what());
         }
       },
       [](const RunConfig& c) { return to_string(c.bc); }},
      HK_INT("grid.N_x", N_x),
      HK_INT("grid.N_y", N_y),
      HK_INT("grid.N_s", N_s),
      HK_DOUBLE("grid.L_xy", L_xy),
      HK_DOUBLE("grid.L_s", L_s),
      HK_DOUBLE("phys.b", b),
      HK_DOUBLE("phys.m", m),
      {"nonlin.kind",
       [](RunConfig&, const std::string&, const std::string& v) {
         if (v != "power") throw ConfigError("nonlin.kind: only 'power' is available from config");
       },
       [](const RunConfig&) { return std::string("power"); }},
      HK_DOUBLE("nonlin.p", p),
      HK_DOUBLE("nonlin.kappa", kappa),
      {"init.kind", [](RunConfig& c, const std::string&, const std::string& v) { c.init = init_from_string(v); },
       [](const RunConfig& c) { return to_string(c.init); }},
      {"init.amplitude",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "auto")
           c.amplitude.reset();
         else
           c.amplitude = parse_double(k, v);
       },
       [](const RunConfig& c) { return c.amplitude ? num(*c.amplitude) : std::string("auto"); }},
      HK_DOUBLE("init.width", width),
      HK_DOUBLE("init.center_s", center_s),
      HK_DOUBLE("init.velocity_ratio", velocity_ratio),
      HK_DOUBLE("cert.T0", T0),
      HK_DOUBLE("cert.norm_u0_sq", cert_norm_u0_sq),
      HK_DOUBLE("cert.re_u0u1", cert_re_u0u1),
      HK_DOUBLE("cert.E0", cert_E0),
      HK_DOUBLE("cert.I_u0", cert_I_u0),
      HK_DOUBLE("time.cfl_fraction", cfl_fraction),
      HK_DOUBLE("time.t_end", t_end),
      HK_INT("time.output_every", output_every),
      HK_DOUBLE("blowup.linf_threshold", linf_threshold),
      HK_INT("blowup.fit_window", fit_window),
      {"output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; },
       [](const RunConfig& c) { return c.output_dir; }},
      {"output.svg", [](RunConfig& c, const std::string& k, const std::string& v) { c.svg = parse_bool(k, v); },
       [](const RunConfig& c) { return std::string(c.svg ? "true" : "false"); }},
  };
  return table;
}

#undef HK_DOUBLE
#undef HK_INT

void validate(const RunConfig& c) {
  if (c.n < 1 || c.n > 3) throw ConfigError("n must be 1, 2 or 3");
  if (c.N_x < 4 || c.N_y < 4 || c.N_s < 4) throw ConfigError("grid.N_* must be >= 4");
  if (!(c.L_xy > 0.0) || !(c.L_s > 0.0)) throw ConfigError("grid.L_xy and grid.L_s must be positive");
  if (c.b < 0.0 || c.m < 0.0) throw ConfigError("phys.b and phys.m must be >= 0");
  if (!(c.p > 1.0)) throw ConfigError("nonlin.p must be > 1");
  if (c.kappa < 0.0) throw ConfigError("nonlin.kappa must be >= 0");
  if (!(c.width > 0.0)) throw ConfigError("init.width must be positive");
  if (!(c.velocity_ratio > 0.0) && !c.amplitude)
    throw ConfigError("init.velocity_ratio must be positive for init.amplitude = auto");
  if (!(c.T0 > 0.0)) throw ConfigError("cert.T0 must be positive");
  if (!(c.cfl_fraction > 0.0) || c.cfl_fraction > 1.0)
    throw ConfigError("time.cfl_fraction must be in (0, 1]");
  if (c.t_end < 0.0) throw ConfigError("time.t_end must be >= 0");
  if (c.output_every < 1) throw ConfigError("time.output_every must be >= 1");
  if (!(c.linf_threshold > 0.0)) throw ConfigError("blowup.linf_threshold must be positive");
  if (c.fit_window < 8) throw ConfigError("blowup.fit_window must be >= 8");
  if (c.init == InitKind::eigenmode && c.bc != Boundary::dirichlet_periodic_s)
    throw ConfigError("init.kind = eigenmode needs bc = dirichlet_periodic_s");
  if (c.init != InitKind::gaussian && !c.amplitude)
    throw ConfigError("init.amplitude = auto is only available for init.kind = gaussian");
  if (c.output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

}  // namespace

std::string to_string(InitKind k) {
  switch (k) {
    case InitKind::gaussian: return "gaussian";
    case InitKind::constant: return "constant";
    case InitKind::eigenmode: return "eigenmode";
    case InitKind::synthetic_cert: return "synthetic_cert";
  }
  return "?";
}

BoxGrid RunConfig::grid() const {
  return BoxGrid(n, N_x, N_y, N_s, L_xy, L_s, bc);
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, const Key*> by_name;
  for (const Key& k : keys()) by_name[k.name] = &k;
  std::set<std::string> seen;
  bool used_synthetic = false;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = by_name.find(key);
    if (it == by_name.end())
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value for '" + key + "'");
    it->second->set(cfg, key, value);
    used_synthetic = used_synthetic || synthetic_only(key);
  }
  if (used_synthetic && cfg.init != InitKind::synthetic_cert)
    throw ConfigError("cert.norm_u0_sq, cert.re_u0u1, cert.E0 and cert.I_u0 need init.kind = synthetic_cert");
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string echo(const RunConfig& cfg) {
  std::string out;
  for (const Key& k : keys()) {
    if (cfg.init != InitKind::synthetic_cert && synthetic_only(k.name)) continue;
    out += k.name;
    out += " = ";
    out += k.get(cfg);
    out += '\n';
  }
  return out;
}

}  // namespace hkglab::cli
