#include "wqg/sim_config.hpp"

#include "wqg/errors.hpp"

#include "json.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace wqg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  int x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return x;
}

using Setter = std::function<void(SimConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s = {
      {"a", [](SimConfig& c, const std::string& k, const std::string& v) { c.a = to_double(k, v); }},
      {"domain", [](SimConfig& c, const std::string&, const std::string& v) { c.domain = v; }},
      {"lx", [](SimConfig& c, const std::string& k, const std::string& v) { c.lx = to_double(k, v); }},
      {"ly", [](SimConfig& c, const std::string& k, const std::string& v) { c.ly = to_double(k, v); }},
      {"n", [](SimConfig& c, const std::string& k, const std::string& v) { c.n = to_int(k, v); }},
      {"mollifier_n", [](SimConfig& c, const std::string& k, const std::string& v) { c.mollifier_n = to_double(k, v); }},
      {"M", [](SimConfig& c, const std::string& k, const std::string& v) { c.M = to_int(k, v); }},
      {"z_max", [](SimConfig& c, const std::string& k, const std::string& v) { c.z_max = to_double(k, v); }},
      {"grading", [](SimConfig& c, const std::string&, const std::string& v) { c.grading = v; }},
      {"grid", [](SimConfig& c, const std::string& k, const std::string& v) { c.grid = to_int(k, v); }},
      {"dt", [](SimConfig& c, const std::string& k, const std::string& v) { c.dt = to_double(k, v); }},
      {"T", [](SimConfig& c, const std::string& k, const std::string& v) { c.T = to_double(k, v); }},
      {"F0", [](SimConfig& c, const std::string&, const std::string& v) { c.F0 = v; }},
      {"theta0", [](SimConfig& c, const std::string&, const std::string& v) { c.theta0 = v; }},
      {"diagnostics_csv", [](SimConfig& c, const std::string&, const std::string& v) { c.diagnostics_csv = v; }},
      {"summary_json", [](SimConfig& c, const std::string&, const std::string& v) { c.summary_json = v; }},
      {"snapshot", [](SimConfig& c, const std::string&, const std::string& v) { c.snapshot = v; }},
      {"output_interval", [](SimConfig& c, const std::string& k, const std::string& v) { c.output_interval = to_double(k, v); }},
      {"picard", [](SimConfig& c, const std::string&, const std::string& v) { c.picard = v; }},
      {"picard_max_iters", [](SimConfig& c, const std::string& k, const std::string& v) { c.picard_max_iters = to_int(k, v); }},
      {"picard_tol", [](SimConfig& c, const std::string& k, const std::string& v) { c.picard_tol = to_double(k, v); }},
      {"threads", [](SimConfig& c, const std::string& k, const std::string& v) { c.threads = to_int(k, v); }},
  };
  return s;
}

}  // namespace

DomainSpec SimConfig::domain_spec() const {
  DomainSpec d;
  d.kind = domain_kind_from_string(domain);
  d.lx = lx;
  d.ly = ly;
  d.n = n;
  return d;
}

void SimConfig::validate() const {
  if (!(a < 1.0) || !std::isfinite(a)) throw ConfigError("a must be finite and < 1");
  domain_kind_from_string(domain);
  if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("side lengths must be positive");
  if (n < 1) throw ConfigError("n must be at least 1");
  if (mollifier_n < 0.0) throw ConfigError("mollifier_n must be nonnegative");
  if (M < 4) throw ConfigError("M must be at least 4");
  if (z_max < 0.0) throw ConfigError("z_max must be nonnegative");
  if (grading != "profile") throw ConfigError("grading must be 'profile' (nodes uniform in z^(1-a))");
  if (grid < 0) throw ConfigError("grid must be nonnegative");
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (dt < 0.0 || dt > T) throw ConfigError("dt must satisfy 0 <= dt <= T");
  if (output_interval < 0.0) throw ConfigError("output_interval must be nonnegative");
  if (picard != "off" && picard != "on") throw ConfigError("picard must be 'off' or 'on'");
  if (picard_max_iters < 1) throw ConfigError("picard_max_iters must be positive");
  if (!(picard_tol > 0.0)) throw ConfigError("picard_tol must be positive");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
}

SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->second(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const SimConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "a = " << c.a << "\n"
    << "domain = " << c.domain << "\n"
    << "lx = " << c.lx << "\n"
    << "ly = " << c.ly << "\n"
    << "n = " << c.n << "\n"
    << "mollifier_n = " << c.mollifier_n << "\n"
    << "M = " << c.M << "\n"
    << "z_max = " << c.z_max << "\n"
    << "grading = " << c.grading << "\n"
    << "grid = " << c.grid << "\n"
    << "dt = " << c.dt << "\n"
    << "T = " << c.T << "\n"
    << "F0 = " << c.F0 << "\n"
    << "theta0 = " << c.theta0 << "\n"
    << "diagnostics_csv = " << c.diagnostics_csv << "\n"
    << "summary_json = " << c.summary_json << "\n"
    << "snapshot = " << c.snapshot << "\n"
    << "output_interval = " << c.output_interval << "\n"
    << "picard = " << c.picard << "\n"
    << "picard_max_iters = " << c.picard_max_iters << "\n"
    << "picard_tol = " << c.picard_tol << "\n"
    << "threads = " << c.threads << "\n";
  return o.str();
}

void to_json(nlohmann::json& j, const SimConfig& c) {
  j = nlohmann::json{{"a", c.a},
                     {"domain", c.domain},
                     {"lx", c.lx},
                     {"ly", c.ly},
                     {"n", c.n},
                     {"mollifier_n", c.mollifier_n},
                     {"M", c.M},
                     {"z_max", c.z_max},
                     {"grading", c.grading},
                     {"grid", c.grid},
                     {"dt", c.dt},
                     {"T", c.T},
                     {"F0", c.F0},
                     {"theta0", c.theta0},
                     {"diagnostics_csv", c.diagnostics_csv},
                     {"summary_json", c.summary_json},
                     {"snapshot", c.snapshot},
                     {"output_interval", c.output_interval},
                     {"picard", c.picard},
                     {"picard_max_iters", c.picard_max_iters},
                     {"picard_tol", c.picard_tol},
                     {"threads", c.threads}};
}

}  // namespace wqg
