#pragma once

// Sampling of the minimal-energy curve p -> I_2d(p) on a fixed cylinder and
// the predicates checked on it: concavity, sub-additivity, Lipschitz bound,
// small-p asymptotics, plus bisection for the critical transverse period.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gpwave/field.hpp"
#include "gpwave/minimizer.hpp"

namespace gpwave {

struct SeedOutcome {
  std::string seed;  ///< "planar" or "perturbed-mode-<k>"
  bool converged = false;
  double energy = 0.0;
  double multiplier = 0.0;
  double transverse_energy = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
};

struct CurveSample {
  double p = 0.0;
  double ell = 0.0;
  double energy2d = 0.0;  ///< least converged energy over the seed set
  double multiplier = 0.0;
  double transverse_energy = 0.0;
  bool converged = false;
  /// Energy certificate: 1e-6 floor + |c| |P - p| + (projected gradient)^2.
  double tolerance = 0.0;
  std::vector<SeedOutcome> seeds;
};

struct SeedPlan {
  int seeds_per_point = 2;  ///< planar + (seeds_per_point - 1) perturbed modes
  double relative_amplitude = 0.05;  ///< times the soliton depth
};

/// Per-sample energy tolerance derived from a solver result.
double energy_certificate(const MinimizeResult& r);

/// Runs minimize from each seed of the plan at every p (jobs worker
/// threads) and keeps the least converged energy. Samples come back sorted
/// by p; points where no seed converged are kept with converged = false.
std::vector<CurveSample> sweep_momentum(const Grid& grid, std::span<const double> p_values,
                                        const SolverConfig& cfg, const SeedPlan& seeds,
                                        int jobs = 1);

/// Exact samples of I_1d at the given p (converged, zero tolerance).
std::vector<CurveSample> closed_form_curve(double ell, std::span<const double> p_values);

/// Points p = k pi / n for k = 1 .. n - 1.
std::vector<double> uniform_momenta(int n);

struct PredicateReport {
  std::string name;
  bool passed = true;
  double worst_margin = 0.0;  ///< smallest slack; negative means violated
  int checked = 0;            ///< number of inequalities evaluated
  std::string detail;
};

/// 1/2 (v_{i-1} + v_{i+1}) <= v_i + delta_tol on equally spaced converged
/// neighbours.
PredicateReport check_concavity(std::span<const CurveSample> curve, double delta_tol);

/// I(p1 + p2) < I(p1) + I(p2) - tol - (sample tolerances) for every pair on
/// the grid p = k pi / n, using I(0) = 0, pi-periodicity and evenness.
/// Throws std::invalid_argument if the samples are not on a common grid.
PredicateReport check_subadditivity(std::span<const CurveSample> curve, double tol);

/// |v_i - v_j| <= sqrt 2 |p_i - p_j| + tol + (sample tolerances).
PredicateReport lipschitz_check(std::span<const CurveSample> curve, double tol);

/// v_i <= I_1d(p_i) + tol and v_i < sqrt 2 p_i (reduced to (0, pi/2]).
PredicateReport check_upper_bounds(std::span<const CurveSample> curve, double tol);

struct SmallPReport {
  PredicateReport report;
  std::vector<double> p;
  std::vector<double> ratio;  ///< I_2d(p) / (sqrt 2 p)
  std::vector<std::string> warnings;
  std::vector<CurveSample> samples;
};

/// Minimizes at each p on the given grid and checks that the ratios
/// I_2d(p) / (sqrt 2 p) stay below 1 and grow as p decreases.
SmallPReport check_small_p(const Grid& grid, std::span<const double> p_values,
                           const SolverConfig& cfg, const SeedPlan& seeds, int jobs = 1);

/// Ratio test on precomputed samples (same rule as check_small_p).
PredicateReport small_p_trend(std::span<const CurveSample> samples);

struct CriticalLengthConfig {
  double L = 20.0;
  std::size_t nx = 512;
  double max_hy = 0.5;  ///< ny is the least power of two (>= 4) with ell / ny <= max_hy
  SolverConfig solver;
  double w_tol = 1e-6;        ///< planar iff transverse / energy <= w_tol
  double certify_tol = 1e-3;  ///< ell_hi counts as clearly two-dimensional above this
  double resolution = 0.25;
  double relative_amplitude = 0.05;
  int mode = 1;
  bool verify_half = true;  ///< re-run at ell_lo / 2
};

struct LengthProbe {
  double ell = 0.0;
  std::size_t ny = 0;
  double planar_energy = 0.0;
  double perturbed_energy = 0.0;
  double energy = 0.0;  ///< least of the two
  double ratio = 0.0;   ///< transverse_energy / energy of the winner
  bool planar = true;
};

struct CriticalLengthResult {
  double p = 0.0;
  double ell_lo = 0.0;
  double ell_hi = 0.0;
  double width = 0.0;
  double ratio_lo = 0.0;
  double ratio_hi = 0.0;
  bool hi_certified = false;  ///< ratio_hi > certify_tol
  bool half_planar = false;   ///< outcome at ell_lo / 2 (if verified)
  std::vector<LengthProbe> probes;
};

/// Outcome of the two-seed descent at one transverse period.
LengthProbe probe_length(double p, double ell, const CriticalLengthConfig& cfg);

/// Bisection on ell for the planar / two-dimensional dichotomy. Throws
/// std::domain_error("bracket does not straddle the critical length") when
/// both ends give the same outcome.
CriticalLengthResult critical_length(double p, double lo, double hi,
                                     const CriticalLengthConfig& cfg);

// Text formats.
void write_curve_csv(std::ostream& out, std::span<const CurveSample> curve);
std::vector<CurveSample> read_curve_csv(std::istream& in);
void write_report(std::ostream& out, std::span<const PredicateReport> reports);

}  // namespace gpwave
