#include "gpwave/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace gpwave {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw std::invalid_argument("expected a finite number, got '" + v + "'");
  }
  return out;
}

long long to_integer(const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  }
  return out;
}

std::size_t to_size(const std::string& v) {
  const long long n = to_integer(v);
  if (n < 0) throw std::invalid_argument("expected a nonnegative integer, got '" + v + "'");
  return static_cast<std::size_t>(n);
}

std::vector<double> to_list(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(to_double(trim(item)));
  if (out.empty()) throw std::invalid_argument("expected a comma-separated list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"L", [](RunConfig& c, const std::string& v) { c.L = to_double(v); }},
      {"nx", [](RunConfig& c, const std::string& v) { c.nx = to_size(v); }},
      {"ell", [](RunConfig& c, const std::string& v) { c.ell = to_double(v); }},
      {"ny", [](RunConfig& c, const std::string& v) { c.ny = to_size(v); }},
      {"step", [](RunConfig& c, const std::string& v) { c.solver.step = to_double(v); }},
      {"max_iters",
       [](RunConfig& c, const std::string& v) { c.solver.max_iters = static_cast<int>(to_integer(v)); }},
      {"grad_tol", [](RunConfig& c, const std::string& v) { c.solver.grad_tol = to_double(v); }},
      {"constraint_tol",
       [](RunConfig& c, const std::string& v) { c.solver.constraint_tol = to_double(v); }},
      {"residual_tol",
       [](RunConfig& c, const std::string& v) { c.solver.residual_tol = to_double(v); }},
      {"backtrack_factor",
       [](RunConfig& c, const std::string& v) { c.solver.backtrack_factor = to_double(v); }},
      {"precond_shift",
       [](RunConfig& c, const std::string& v) { c.solver.precond_shift = to_double(v); }},
      {"p", [](RunConfig& c, const std::string& v) { c.p = to_double(v); }},
      {"seed_amplitude", [](RunConfig& c, const std::string& v) { c.seed_amplitude = to_double(v); }},
      {"seed_mode",
       [](RunConfig& c, const std::string& v) { c.seed_mode = static_cast<int>(to_integer(v)); }},
      {"p_grid", [](RunConfig& c, const std::string& v) { c.p_grid = static_cast<int>(to_integer(v)); }},
      {"p_values", [](RunConfig& c, const std::string& v) { c.p_values = to_list(v); }},
      {"seeds_per_point",
       [](RunConfig& c, const std::string& v) { c.seeds_per_point = static_cast<int>(to_integer(v)); }},
      {"ell_lo", [](RunConfig& c, const std::string& v) { c.ell_lo = to_double(v); }},
      {"ell_hi", [](RunConfig& c, const std::string& v) { c.ell_hi = to_double(v); }},
      {"resolution", [](RunConfig& c, const std::string& v) { c.resolution = to_double(v); }},
      {"w_tol", [](RunConfig& c, const std::string& v) { c.w_tol = to_double(v); }},
      {"certify_tol", [](RunConfig& c, const std::string& v) { c.certify_tol = to_double(v); }},
      {"max_hy", [](RunConfig& c, const std::string& v) { c.max_hy = to_double(v); }},
      {"out", [](RunConfig& c, const std::string& v) { c.out = v; }},
  };
  return table;
}

}  // namespace

void RunConfig::validate() const {
  try {
    (void)grid();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
  try {
    solver.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!(seed_amplitude >= 0.0)) throw ConfigError("seed_amplitude: must be >= 0");
  if (seed_mode < 1) throw ConfigError("seed_mode: must be >= 1");
  if (p_grid < 2) throw ConfigError("p_grid: must be >= 2");
  if (seeds_per_point < 2) throw ConfigError("seeds_per_point: must be >= 2");
  for (double v : p_values) {
    if (!(v > 0.0 && v < 3.141592653589793)) throw ConfigError("p_values: entries must lie in (0, pi)");
  }
  if (!(ell_lo > 0.0 && ell_lo < ell_hi)) throw ConfigError("ell_lo/ell_hi: need 0 < ell_lo < ell_hi");
  if (!(resolution > 0.0)) throw ConfigError("resolution: must be > 0");
  if (!(w_tol > 0.0)) throw ConfigError("w_tol: must be > 0");
  if (!(certify_tol > 0.0)) throw ConfigError("certify_tol: must be > 0");
  if (!(max_hy > 0.0)) throw ConfigError("max_hy: must be > 0");
  if (out.empty()) throw ConfigError("out: must not be empty");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::stringstream in(text);
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(line_no) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(where + key + ": missing value");
    try {
      it->second(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void Manifest::set(const std::string& key, const std::string& value) {
  for (auto& e : entries_) {
    if (e.first == key) {
      e.second = value;
      return;
    }
  }
  entries_.emplace_back(key, value);
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }
void Manifest::set(const std::string& key, long long value) { set(key, std::to_string(value)); }
void Manifest::set(const std::string& key, bool value) {
  set(key, std::string(value ? "true" : "false"));
}

std::string Manifest::text() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

void Manifest::write(const std::filesystem::path& path) const {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text();
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot move manifest into place at " + path.string());
}

void record_config(Manifest& m, const RunConfig& c) {
  m.set("L", c.L);
  m.set("nx", static_cast<long long>(c.nx));
  m.set("ell", c.ell);
  m.set("ny", static_cast<long long>(c.ny));
  m.set("step", c.solver.step);
  m.set("max_iters", static_cast<long long>(c.solver.max_iters));
  m.set("grad_tol", c.solver.grad_tol);
  m.set("constraint_tol", c.solver.constraint_tol);
  m.set("residual_tol", c.solver.residual_tol);
  m.set("backtrack_factor", c.solver.backtrack_factor);
  m.set("precond_shift", c.solver.precond_shift);
  m.set("seed_amplitude", c.seed_amplitude);
  m.set("seed_mode", static_cast<long long>(c.seed_mode));
}

}  // namespace gpwave
