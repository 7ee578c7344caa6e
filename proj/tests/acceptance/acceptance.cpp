// Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion followed
// by indented details; exits nonzero when any criterion fails.
//
//   acceptance            run all criteria
//   acceptance --only N   run criterion N

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gpwave/constructions.hpp"
#include "gpwave/field.hpp"
#include "gpwave/minimizer.hpp"
#include "gpwave/soliton1d.hpp"
#include "gpwave/sweep.hpp"

using namespace gpwave;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

Field2D random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field2D f(g);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      f(i, j) = std::polar(1.0 + 0.3 * u(rng), 0.5 * u(rng) + 0.05 * static_cast<double>(i));
    }
  }
  return f;
}

Field2D noise(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Field2D f(g);
  for (auto& v : f.values()) v = {n(rng), n(rng)};
  return f;
}

Outcome closed_forms() {
  Outcome o;
  const double e = soliton1d::energy_1d(kPi / 2);
  o.require(std::abs(e - 2.0 * kSqrt2 / 3.0) <= 1e-12,
            fmt("I_1d(pi/2) = %.17g, 2 sqrt2 / 3 = %.17g", e, 2.0 * kSqrt2 / 3.0));
  const double x0 = soliton1d::xi(0.0);
  o.require(std::abs(x0 - kPi / 2) <= 1e-12, fmt("Xi(0) - pi/2 = %.3g", x0 - kPi / 2));
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double c = -kSqrt2 + 2.0 * kSqrt2 * (k + 0.5) / 100.0;
    worst = std::max(worst, std::abs(soliton1d::speed_from_momentum(soliton1d::xi(c)) - c));
  }
  o.require(worst < 1e-10, fmt("max roundtrip error over 100 speeds = %.3g", worst));
  return o;
}

Outcome sampled_soliton() {
  Outcome o;
  const Grid g = Grid::make(30.0, 4096, 1.0, 16);
  for (double c : {0.0, 0.5, 1.0, 1.3}) {
    Field2D f(g);
    for (std::size_t i = 0; i < g.nx; ++i) {
      const Complex u = soliton1d::dark_soliton(c, g.x(i));
      for (std::size_t j = 0; j < g.ny; ++j) f(i, j) = u;
    }
    const double q = soliton1d::xi(c);
    const double de = std::abs(energy(f) - soliton1d::energy_1d(q));
    const double dp = MomentumClass::distance(momentum(f), MomentumClass{q});
    o.require(de <= 1e-4 && dp <= 1e-4, fmt("c=%.1f: |dE| = %.3g, |dP| = %.3g", c, de, dp));
  }
  return o;
}

Outcome gradients() {
  Outcome o;
  std::mt19937_64 rng(3);
  const Grid g = Grid::make(3.0, 24, 1.5, 8);
  double worst_e = 0.0;
  double worst_p = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Field2D f = random_field(g, rng);
    const Field2D ge = energy_gradient(f);
    const Field2D gp = momentum_gradient(f);
    for (int d = 0; d < 10; ++d) {
      const Field2D h = noise(g, rng);
      const double t = 1e-5;
      Field2D fp = f;
      fp.axpy(t, h);
      Field2D fm = f;
      fm.axpy(-t, h);
      const double fd_e = (energy(fp) - energy(fm)) / (2 * t);
      const double fd_p = (momentum(fp).representative - momentum(fm).representative) / (2 * t);
      worst_e = std::max(worst_e, std::abs(dot(ge, h) - fd_e) / std::abs(dot(ge, h)));
      worst_p = std::max(worst_p, std::abs(dot(gp, h) - fd_p) / std::abs(dot(gp, h)));
    }
  }
  o.require(worst_e < 1e-6, fmt("energy gradient: worst relative error %.3g", worst_e));
  o.require(worst_p < 1e-6, fmt("momentum gradient: worst relative error %.3g", worst_p));
  return o;
}

Outcome planar_regime() {
  Outcome o;
  const Grid g = Grid::make(20.0, 1024, 0.5, 16);
  const double p = kPi / 2;
  const MinimizeResult r = minimize(p, g, SolverConfig{}, init_perturbed(p, g, 0.05, 1));
  const double target = 2.0 * kSqrt2 / 3.0;
  o.require(r.converged, fmt("converged after %d iterations (%s)", r.iterations, r.message.c_str()));
  o.require(r.transverse_energy / r.energy < 1e-6,
            fmt("transverse / energy = %.3g", r.transverse_energy / r.energy));
  o.require(std::abs(r.energy - target) <= 0.01 * target,
            fmt("energy = %.10f vs 2 sqrt2 / 3 = %.10f", r.energy, target));
  o.require(r.el_residual < 1e-5, fmt("EL residual = %.3g", r.el_residual));
  o.require(std::abs(r.multiplier) < 0.05, fmt("multiplier = %.3g", r.multiplier));
  return o;
}

Outcome curve_laws() {
  Outcome o;
  const Grid g = Grid::make(20.0, 512, 1.0, 8);
  const auto ps = uniform_momenta(14);
  const auto curve = sweep_momentum(g, ps, SolverConfig{}, SeedPlan{});
  double point_tol = 0.0;
  bool all = true;
  for (const auto& s : curve) {
    all = all && s.converged;
    point_tol = std::max(point_tol, s.tolerance);
    o.details.push_back(fmt("      p=%.6f I_2d=%.10f I_1d=%.10f c=%.6f w=%.2g tol=%.2g", s.p,
                            s.energy2d, soliton1d::energy_1d(s.p), s.multiplier,
                            s.transverse_energy, s.tolerance));
  }
  o.require(all, "all 13 points converged");
  const auto report = [&](const PredicateReport& r) {
    o.require(r.passed, fmt("%s: %d checks, worst margin %.4g at %s", r.name.c_str(), r.checked,
                            r.worst_margin, r.detail.c_str()));
  };
  // I_2d <= I_1d + 1e-3 and I_2d < sqrt2 p.
  report(check_upper_bounds(curve, 1e-3));
  double strict = std::numeric_limits<double>::infinity();
  for (const auto& s : curve) {
    strict = std::min(strict, kSqrt2 * std::min(s.p, kPi - s.p) - s.energy2d);
  }
  o.details.push_back(fmt("      smallest margin in I_2d < sqrt2 |p|: %.4g", strict));
  report(check_concavity(curve, 2.0 * point_tol));
  report(lipschitz_check(curve, point_tol));
  report(check_subadditivity(curve, 0.0));
  return o;
}

Outcome critical() {
  Outcome o;
  CriticalLengthConfig cfg;
  cfg.L = 20.0;
  cfg.nx = 512;
  cfg.max_hy = 0.5;
  cfg.resolution = 0.25;
  const CriticalLengthResult r = critical_length(kPi / 2, 2.0, 16.0, cfg);
  for (const auto& pr : r.probes) {
    o.details.push_back(fmt("      probe ell=%.5f ny=%zu E=%.10f ratio=%.3g %s", pr.ell, pr.ny,
                            pr.energy, pr.ratio, pr.planar ? "planar" : "two-dimensional"));
  }
  o.require(r.ratio_lo <= cfg.w_tol, fmt("ell_lo = %.5f planar (ratio %.3g)", r.ell_lo, r.ratio_lo));
  o.require(r.ratio_hi > 1e-3, fmt("ell_hi = %.5f two-dimensional (ratio %.3g > 1e-3)", r.ell_hi, r.ratio_hi));
  o.require(r.width <= 0.25, fmt("bracket width %.4g", r.width));
  o.require(r.half_planar, fmt("ell_lo / 2 = %.4f planar", 0.5 * r.ell_lo));
  return o;
}

Outcome small_p() {
  Outcome o;
  const Grid g = Grid::make(60.0, 2048, 1.0, 8);
  const std::vector<double> ps = {0.2, 0.1, 0.05};
  const SmallPReport r = check_small_p(g, ps, SolverConfig{}, SeedPlan{});
  for (std::size_t k = 0; k < r.p.size(); ++k) {
    o.details.push_back(fmt("      p=%.2f ratio=%.6f (1D %.6f)", r.p[k], r.ratio[k],
                            soliton1d::energy_1d(r.p[k]) / (kSqrt2 * r.p[k])));
  }
  for (const auto& w : r.warnings) o.details.push_back("      warning: " + w);
  bool all = true;
  for (const auto& s : r.samples) all = all && s.converged;
  o.require(all, "all points converged");
  o.require(r.report.passed, fmt("ratios below 1 and increasing as p decreases (worst margin %.4g)",
                                 r.report.worst_margin));
  return o;
}

Outcome constructions() {
  Outcome o;
  std::mt19937_64 rng(8);
  // (a) symmetrization
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Field2D f = random_field(Grid::make(3.0, 24, 0.5 + 0.1 * k, 16), rng);
    for (unsigned level = 1; level <= 3; ++level) {
      for (std::size_t idx = 0; idx < (std::size_t{1} << level); ++idx) {
        const StripIndex s{level, idx};
        const Field2D sym = symmetrize(f, s);
        worst = std::max(worst, std::abs(energy(sym) - strip_energy(f, s)));
        worst = std::max(worst, MomentumClass::distance(momentum(sym), strip_momentum(f, s)));
      }
    }
  }
  o.require(worst <= 1e-12, fmt("(a) symmetrize vs strip averages: worst deviation %.3g", worst));

  // (b) oscillation intervals on A sin(2 pi m y / ell + phi)
  double worst_hit = 0.0;
  bool none_ok = true;
  for (int m = 1; m <= 3; ++m) {
    for (double phase : {0.0, 0.7, 2.0}) {
      const double ell = 1.7;
      const double amp = 0.5 * m;
      std::vector<double> q(64);
      for (std::size_t j = 0; j < q.size(); ++j) q[j] = amp * std::sin(2 * kPi * m * j / 64.0 + phase);
      for (int N : {1, 2, 5}) {
        double best = -1e300;
        for (int s = 0; s < 4000; ++s) best = std::max(best, windowed_mean(q, ell, ell * s / 4000.0, ell / N));
        for (double frac : {0.2, 0.6, 0.95}) {
          const auto hit = find_oscillation_interval(q, ell, N, frac * best);
          if (!hit) {
            worst_hit = std::numeric_limits<double>::infinity();
            continue;
          }
          worst_hit = std::max(worst_hit, std::abs(windowed_mean(q, ell, hit->start, hit->length) - frac * best) / amp);
        }
        if (best > 1e-12 && find_oscillation_interval(q, ell, N, best * 1.01 + 1e-9)) none_ok = false;
      }
    }
  }
  o.require(worst_hit <= 1e-8, fmt("(b) window means hit within %.3g |q|_inf", worst_hit));
  o.require(none_ok, "(b) no interval beyond the maximal windowed mean");

  // (c) gluing
  auto constant = [](double phase) { return LoopTrace{std::vector<Complex>(16, std::polar(1.0, phase)), 1.0}; };
  bool traces = true;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 5; ++k) {
    LoopTrace a{{}, 1.0};
    LoopTrace b{{}, 1.0};
    for (int j = 0; j < 16; ++j) {
      a.values.push_back(std::polar(1.0 + 0.05 * u(rng), 3.0 * k + 0.1 * u(rng)));
      b.values.push_back(std::polar(1.0 + 0.05 * u(rng), -1.0 * k + 0.1 * u(rng)));
    }
    const Field2D f = glue(GlueSpec{a, b, 4.0}, 129);
    for (std::size_t j = 0; j < 16; ++j) traces = traces && f(0, j) == a.values[j] && f(128, j) == b.values[j];
  }
  o.require(traces, "(c) glued boundary traces equal the loops exactly");
  std::vector<double> scaled;
  for (double R : {4.0, 8.0, 16.0}) {
    const Field2D f = glue(GlueSpec{constant(0.3), constant(2.6), R}, static_cast<std::size_t>(32 * R) + 1);
    scaled.push_back(energy(f) * (R - 1.0));
  }
  const double spread = (*std::max_element(scaled.begin(), scaled.end()) -
                         *std::min_element(scaled.begin(), scaled.end())) / scaled.front();
  o.require(spread <= 0.02, fmt("(c) constant-loop energy x (R-1) = %.6f, %.6f, %.6f (spread %.3g)",
                                scaled[0], scaled[1], scaled[2], spread));
  double worst_ratio = 0.0;
  const double c_ell = lift_constant(1.0);
  for (int k = 0; k < 10; ++k) {
    const double eps = 0.002 * (k + 1);
    const double a0 = 3.0 * u(rng);
    const double b0 = 3.0 * u(rng);
    LoopTrace a{{}, 1.0};
    LoopTrace b{{}, 1.0};
    for (int j = 0; j < 32; ++j) {
      const double y = 2 * kPi * j / 32.0;
      a.values.push_back(std::polar(1.0, a0) * (1.0 + eps * std::polar(1.0, y)));
      b.values.push_back(std::polar(1.0, b0 + eps * std::sin(2 * y)) * (1.0 + eps * std::cos(y)));
    }
    const auto rep = glue_momentum_bound_check(GlueSpec{a, b, 4.0}, 257);
    worst_ratio = std::max(worst_ratio, rep.ratio);
  }
  o.require(std::isfinite(worst_ratio) && worst_ratio <= c_ell,
            fmt("(c) |P_R| / (kappa- + kappa+)^(1/2) <= C_ell = %.4f on 10 loops (max %.3g)", c_ell,
                worst_ratio));

  // (d) lifting bounds
  int admissible = 0;
  bool bound = true;
  double worst_gap = 1e300;
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; admissible < 20 && trial < 1000; ++trial) {
    const double ell = 0.5 + 1.5 * std::abs(u(rng));
    LoopTrace loop{{}, ell};
    const double size = 0.02 * std::abs(n(rng));
    const double phase = kPi * u(rng);
    for (int j = 0; j < 32; ++j) {
      const double y = 2 * kPi * j / 32.0;
      const Complex wobble = size * Complex(std::cos(y + n(rng) * 0.1), std::sin(2 * y));
      loop.values.push_back(std::polar(1.0, phase) * (1.0 + wobble));
    }
    const LoopLift lift = lift_loop(loop);
    if (!lift.kappa_admissible) continue;
    ++admissible;
    const double slack = std::abs(lift.mean) - lift.mean_modulus_bound;
    worst_gap = std::min(worst_gap, slack);
    bound = bound && slack >= 0.0;
  }
  o.require(admissible == 20 && bound,
            fmt("(d) |mean| >= 1 - C_ell kappa^(1/2) on %d admissible loops (min slack %.3g)", admissible,
                worst_gap));
  return o;
}

Outcome scaling() {
  Outcome o;
  std::mt19937_64 rng(9);
  double worst = 0.0;
  for (double ell : {0.5, 1.0, 2.0}) {
    for (int k = 0; k < 10; ++k) {
      const Field2D f = random_field(Grid::make(4.0, 33, ell, 8), rng);
      const double lhs = anisotropic_energy(rescale_to_unit_period(f), 1.0 / ell);
      worst = std::max(worst, std::abs(lhs - energy(f)) / std::max(1.0, energy(f)));
    }
  }
  o.require(worst <= 1e-10, fmt("E_{1/ell}(psi_ell) vs E(psi): worst relative deviation %.3g", worst));
  return o;
}

Outcome inequalities() {
  Outcome o;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  int violations = 0;
  int cases = 0;
  double worst_ratio = 0.0;
  while (cases < 1000) {
    const Complex z1 = std::polar(1.0, u(rng));
    const Complex z2 = std::polar(1.0, u(rng));
    if (std::abs(z1 - z2) > 1.0 || z1 == z2) continue;
    ++cases;
    const double ratio = arg_chord_ratio(z1, z2);
    worst_ratio = std::max(worst_ratio, ratio);
    if (ratio > 2.0 / kPi) ++violations;
  }
  o.require(violations == 0,
            fmt("arg inequality with constant 2/pi: %d of %d cases violate it (max ratio %.4f)",
                violations, cases, worst_ratio));
  o.details.push_back(fmt("      for reference: max ratio %.4f <= pi/3 = %.4f, the sharp constant on chords <= 1",
                          worst_ratio, kArgChordConstant));

  std::normal_distribution<double> n(0.0, 1.0);
  double worst_pw = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double ell = 0.25 + 4.0 * std::abs(n(rng));
    LoopTrace loop{{}, ell};
    // Smooth random loop: a few low Fourier modes.
    std::vector<Complex> coef(5);
    for (auto& c : coef) c = {n(rng), n(rng)};
    for (int j = 0; j < 64; ++j) {
      Complex v = 0.0;
      for (int m = -2; m <= 2; ++m) v += coef[m + 2] * std::polar(1.0, 2 * kPi * m * j / 64.0) / (1.0 + m * m);
      loop.values.push_back(v);
    }
    worst_pw = std::max(worst_pw, poincare_wirtinger_ratio(loop));
  }
  o.require(worst_pw <= 1.0 + 1e-12,
            fmt("Poincare-Wirtinger: max int|psi - mean|^2 / ((ell/2pi)^2 int|psi'|^2) = %.6f over 1000 loops",
                worst_pw));
  return o;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int k = 1; k < argc; ++k) {
    if (std::strcmp(argv[k], "--only") == 0 && k + 1 < argc) {
      only = std::atoi(argv[++k]);
    } else {
      std::fprintf(stderr, "usage: acceptance [--only N]\n");
      return 2;
    }
  }
  const std::vector<Criterion> criteria = {
      {1, "closed-form oracle match", closed_forms},
      {2, "sampled-soliton consistency", sampled_soliton},
      {3, "gradient certification", gradients},
      {4, "planar regime reproduction", planar_regime},
      {5, "curve-law battery at ell = 1", curve_laws},
      {6, "critical-length dichotomy at p = pi/2", critical},
      {7, "small-p asymptotics", small_p},
      {8, "construction suite", constructions},
      {9, "scaling identity", scaling},
      {10, "inequality micro-suite", inequalities},
  };
  bool all = true;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %d: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, secs);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
