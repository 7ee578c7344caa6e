#pragma once

// Flat key = value configuration files and run manifests.
//
//   # comment
//   L = 20
//   nx = 1024
//
// Keys are unique; unknown keys and malformed values are rejected with the
// line number.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gpwave/field.hpp"
#include "gpwave/minimizer.hpp"

namespace gpwave {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  // grid
  double L = 20.0;
  std::size_t nx = 512;
  double ell = 1.0;
  std::size_t ny = 8;
  SolverConfig solver;
  // minimize / critical-length
  double p = 1.5707963267948966;
  double seed_amplitude = 0.05;  ///< relative to the soliton depth
  int seed_mode = 1;
  // sweep
  int p_grid = 14;  ///< p = k pi / p_grid, k = 1 .. p_grid - 1, unless p_values is set
  std::vector<double> p_values;
  int seeds_per_point = 2;
  // critical-length
  double ell_lo = 2.0;
  double ell_hi = 16.0;
  double resolution = 0.25;
  double w_tol = 1e-6;
  double certify_tol = 1e-3;
  double max_hy = 0.5;
  // output
  std::string out = ".";

  Grid grid() const { return Grid::make(L, nx, ell, ny); }
  /// Cross-field checks; throws ConfigError naming the field.
  void validate() const;
};

/// Parses the text of a config file. `origin` prefixes diagnostics.
RunConfig parse_config(const std::string& text, const std::string& origin = "config");
RunConfig load_config(const std::filesystem::path& path);

/// Ordered key = value record written atomically (temp file + rename).
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, bool value);
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string text() const;
  /// Throws std::runtime_error on I/O failure.
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

/// Adds the grid, solver and seed fields of a config to a manifest.
void record_config(Manifest& m, const RunConfig& cfg);

/// Shortest round-trip text for a double.
std::string format_double(double v);

}  // namespace gpwave
