#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "gpwave/config.hpp"
#include "gpwave/constructions.hpp"
#include "gpwave/field.hpp"
#include "gpwave/minimizer.hpp"
#include "gpwave/snapshot.hpp"
#include "gpwave/soliton1d.hpp"
#include "gpwave/sweep.hpp"

namespace gpwave::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUpperBoundTol = 1e-3;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

fs::path prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) throw IoError("cannot write " + path.string());
}

void write_manifest(const Manifest& m, const fs::path& path) {
  try {
    m.write(path);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

RunConfig load(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("config file not found: " + path.string());
  try {
    return load_config(path);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

fs::path output_dir(const std::optional<fs::path>& flag, const RunConfig& cfg) {
  return prepare_dir(flag ? *flag : fs::path(cfg.out));
}

double depth_of(double p) {
  const double q = soliton1d::reduce_momentum(p);
  if (std::min(q, kPi - q) < 1e-14) return 0.0;
  return soliton1d::SolitonParams(soliton1d::speed_from_momentum(q)).depth();
}

// Maps exceptions to the exit-code contract.
template <class Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  }
}

std::string curve_report(std::span<const CurveSample> curve, std::vector<PredicateReport>& reports) {
  double point_tol = 0.0;
  for (const auto& s : curve) {
    if (s.converged) point_tol = std::max(point_tol, s.tolerance);
  }
  reports.push_back(check_upper_bounds(curve, kUpperBoundTol));
  reports.push_back(check_concavity(curve, 2.0 * point_tol));
  reports.push_back(lipschitz_check(curve, point_tol));
  try {
    reports.push_back(check_subadditivity(curve, 0.0));
  } catch (const std::invalid_argument& e) {
    PredicateReport skipped;
    skipped.name = "subadditivity";
    skipped.passed = true;
    skipped.worst_margin = 0.0;
    skipped.detail = std::string("skipped: ") + e.what();
    reports.push_back(skipped);
  }
  std::ostringstream text;
  write_report(text, reports);
  return text.str();
}

// Random field with modulus in [0.7, 1.3]: momentum is always defined.
Field2D random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field2D f(g);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      f(i, j) = std::polar(1.0 + 0.3 * u(rng), 0.5 * u(rng) + 0.02 * static_cast<double>(i));
    }
  }
  return f;
}

PredicateReport verify_scaling(std::mt19937_64& rng) {
  PredicateReport r;
  r.name = "scaling-identity";
  for (double ell : {0.5, 1.0, 2.0}) {
    for (int k = 0; k < 3; ++k) {
      const Field2D f = random_field(Grid::make(3.0, 24, ell, 8), rng);
      const double lhs = anisotropic_energy(rescale_to_unit_period(f), 1.0 / ell);
      const double rhs = energy(f);
      ++r.checked;
      const double margin = 1e-10 * std::max(1.0, std::abs(rhs)) - std::abs(lhs - rhs);
      if (r.checked == 1 || margin < r.worst_margin) r.worst_margin = margin;
      if (margin < 0.0) r.passed = false;
    }
  }
  return r;
}

PredicateReport verify_symmetrize(std::mt19937_64& rng) {
  PredicateReport r;
  r.name = "symmetrize";
  for (int k = 0; k < 4; ++k) {
    const Field2D f = random_field(Grid::make(3.0, 20, 1.5, 16), rng);
    for (unsigned level = 1; level <= 3; ++level) {
      for (std::size_t idx = 0; idx < (std::size_t{1} << level); ++idx) {
        const StripIndex s{level, idx};
        const Field2D g = symmetrize(f, s);
        const double de = std::abs(energy(g) - strip_energy(f, s));
        const double dp = MomentumClass::distance(momentum(g), strip_momentum(f, s));
        const double margin = 1e-12 * std::max(1.0, energy(g)) - std::max(de, dp);
        ++r.checked;
        if (r.checked == 1 || margin < r.worst_margin) r.worst_margin = margin;
        if (margin < 0.0) r.passed = false;
      }
    }
  }
  return r;
}

PredicateReport verify_glue(std::mt19937_64& rng) {
  PredicateReport r;
  r.name = "glue-traces";
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 4; ++k) {
    LoopTrace a{{}, 1.0};
    LoopTrace b{{}, 1.0};
    const double ta = 3.0 * u(rng);
    const double tb = 3.0 * u(rng);
    for (int j = 0; j < 16; ++j) {
      const double y = j / 16.0;
      a.values.push_back(std::polar(1.0 + 0.05 * std::sin(2 * kPi * y), ta + 0.1 * std::cos(2 * kPi * y)));
      b.values.push_back(std::polar(1.0 - 0.05 * std::cos(2 * kPi * y), tb + 0.1 * std::sin(2 * kPi * y)));
    }
    const Field2D f = glue(GlueSpec{a, b, 4.0}, 65);
    double worst = 0.0;
    for (std::size_t j = 0; j < 16; ++j) {
      worst = std::max(worst, std::abs(f(0, j) - a.values[j]));
      worst = std::max(worst, std::abs(f(64, j) - b.values[j]));
    }
    ++r.checked;
    const double margin = -worst;
    if (r.checked == 1 || margin < r.worst_margin) r.worst_margin = margin;
    if (worst != 0.0) r.passed = false;
  }
  return r;
}

}  // namespace

int cmd_soliton(const SolitonArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.c.has_value() == args.p.has_value()) {
      throw UsageError("soliton: give exactly one of --c and --p");
    }
    if (args.samples < 1) throw UsageError("soliton: --samples must be >= 1");
    if (!(args.xmax > 0.0)) throw UsageError("soliton: --xmax must be > 0");
    const double c = args.c ? *args.c : soliton1d::speed_from_momentum(*args.p);
    const soliton1d::SolitonParams params(c);
    const double amp = params.depth();
    const double k = 0.5 * params.root();

    std::ostringstream text;
    text.precision(17);
    double residual = 0.0;
    std::ostringstream rows;
    rows.precision(17);
    rows << "x,re,im\n";
    for (int s = 0; s < args.samples; ++s) {
      const double x =
          args.samples == 1 ? 0.0 : -args.xmax + 2.0 * args.xmax * s / (args.samples - 1);
      const std::complex<double> u = soliton1d::dark_soliton(c, x);
      // Exact derivatives of -A tanh(kx) + i c / sqrt 2.
      const double sech2 = 1.0 / (std::cosh(k * x) * std::cosh(k * x));
      const std::complex<double> du(-amp * k * sech2, 0.0);
      const std::complex<double> d2u(2.0 * amp * k * k * sech2 * std::tanh(k * x), 0.0);
      const std::complex<double> r =
          std::complex<double>(0.0, c) * du + d2u + u * (1.0 - std::norm(u));
      residual = std::max(residual, std::abs(r));
      rows << x << ',' << u.real() << ',' << u.imag() << '\n';
    }
    text << "speed = " << c << "\n";
    text << "xi = " << params.momentum() << "\n";
    text << "energy_1d = " << params.energy() << "\n";
    text << "residual = " << residual << "\n";
    const std::string body = text.str() + rows.str();
    if (args.out) {
      const fs::path dir = prepare_dir(*args.out);
      write_text(dir / "soliton.csv", rows.str());
      write_text(dir / "soliton.txt", text.str());
      out << text.str();
    } else {
      out << body;
    }
    return static_cast<int>(kOk);
  });
}

int cmd_minimize(const RunArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(args.config);
    const Grid grid = cfg.grid();
    const fs::path dir = output_dir(args.out, cfg);
    const fs::path manifest_path = dir / "minimize.manifest";

    Manifest m;
    m.set("command", std::string("minimize"));
    record_config(m, cfg);
    m.set("p", cfg.p);
    Field2D seed;
    if (args.seed) {
      try {
        seed = snapshot::read(*args.seed);
      } catch (const std::runtime_error& e) {
        throw IoError(e.what());
      }
      if (!(seed.grid() == grid)) throw UsageError("minimize: seed snapshot grid differs from config");
      m.set("seed", "snapshot:" + args.seed->string());
    } else {
      const double amplitude = cfg.seed_amplitude * depth_of(cfg.p);
      seed = init_perturbed(cfg.p, grid, amplitude, cfg.seed_mode);
      m.set("seed", std::string(amplitude > 0.0 ? "perturbed" : "planar"));
    }
    m.set("status", std::string("running"));
    write_manifest(m, manifest_path);

    const MinimizeResult r = minimize(cfg.p, grid, cfg.solver, seed);
    try {
      snapshot::write(dir / "field.gpw", r.field);
    } catch (const std::runtime_error& e) {
      throw IoError(e.what());
    }
    m.set("status", std::string(r.converged ? "converged" : "not_converged"));
    m.set("message", r.message);
    m.set("iterations", static_cast<long long>(r.iterations));
    m.set("energy", r.energy);
    m.set("energy_1d", soliton1d::energy_1d(cfg.p));
    m.set("momentum", r.momentum.representative);
    m.set("multiplier", r.multiplier);
    m.set("multiplier_ls", r.multiplier_ls);
    m.set("supersonic_flag", r.supersonic_flag);
    m.set("el_residual", r.el_residual);
    m.set("projected_gradient", r.projected_gradient);
    m.set("constraint_error", r.constraint_error);
    m.set("transverse_energy", r.transverse_energy);
    m.set("snapshot", std::string("field.gpw"));
    write_manifest(m, manifest_path);
    out << m.text();
    return static_cast<int>(r.converged ? kOk : kNotConverged);
  });
}

int cmd_sweep(const RunArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(args.config);
    const Grid grid = cfg.grid();
    const fs::path dir = output_dir(args.out, cfg);
    const std::vector<double> ps = cfg.p_values.empty() ? uniform_momenta(cfg.p_grid) : cfg.p_values;
    Manifest m;
    m.set("command", std::string("sweep"));
    record_config(m, cfg);
    m.set("points", static_cast<long long>(ps.size()));
    m.set("seeds_per_point", static_cast<long long>(cfg.seeds_per_point));
    m.set("status", std::string("running"));
    write_manifest(m, dir / "sweep.manifest");

    const auto curve =
        sweep_momentum(grid, ps, cfg.solver, SeedPlan{cfg.seeds_per_point, cfg.seed_amplitude},
                       args.jobs);
    std::ostringstream csv;
    write_curve_csv(csv, curve);
    write_text(dir / "curve.csv", csv.str());
    std::vector<PredicateReport> reports;
    write_text(dir / "report.txt", curve_report(curve, reports));

    long long failed = 0;
    for (const auto& s : curve) failed += s.converged ? 0 : 1;
    m.set("not_converged", failed);
    m.set("status", std::string(failed == 0 ? "complete" : "incomplete"));
    m.set("curve", std::string("curve.csv"));
    m.set("report", std::string("report.txt"));
    write_manifest(m, dir / "sweep.manifest");
    out << csv.str();
    return static_cast<int>(failed == 0 ? kOk : kNotConverged);
  });
}

int cmd_critical_length(const RunArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load(args.config);
    const fs::path dir = output_dir(args.out, cfg);
    CriticalLengthConfig cl;
    cl.L = cfg.L;
    cl.nx = cfg.nx;
    cl.max_hy = cfg.max_hy;
    cl.solver = cfg.solver;
    cl.w_tol = cfg.w_tol;
    cl.certify_tol = cfg.certify_tol;
    cl.resolution = cfg.resolution;
    cl.relative_amplitude = cfg.seed_amplitude;
    cl.mode = cfg.seed_mode;
    Manifest m;
    m.set("command", std::string("critical-length"));
    record_config(m, cfg);
    m.set("p", cfg.p);
    m.set("ell_bracket", format_double(cfg.ell_lo) + "," + format_double(cfg.ell_hi));
    m.set("status", std::string("running"));
    write_manifest(m, dir / "critical_length.manifest");

    const CriticalLengthResult r = critical_length(cfg.p, cfg.ell_lo, cfg.ell_hi, cl);
    m.set("status", std::string("complete"));
    m.set("ell_lo", r.ell_lo);
    m.set("ell_hi", r.ell_hi);
    m.set("width", r.width);
    m.set("ratio_lo", r.ratio_lo);
    m.set("ratio_hi", r.ratio_hi);
    m.set("hi_certified", r.hi_certified);
    m.set("half_planar", r.half_planar);
    for (std::size_t k = 0; k < r.probes.size(); ++k) {
      const auto& pr = r.probes[k];
      m.set("probe." + std::to_string(k),
            "ell=" + format_double(pr.ell) + " ny=" + std::to_string(pr.ny) +
                " energy=" + format_double(pr.energy) + " ratio=" + format_double(pr.ratio) +
                " planar_seed_energy=" + format_double(pr.planar_energy) +
                " perturbed_seed_energy=" + format_double(pr.perturbed_energy) +
                " outcome=" + (pr.planar ? "planar" : "two-dimensional"));
    }
    write_manifest(m, dir / "critical_length.manifest");
    out << m.text();
    return static_cast<int>(kOk);
  });
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!args.fast && !args.config && !args.curve) {
      throw UsageError("verify: give --fast, --config or --curve");
    }
    std::vector<PredicateReport> reports;
    if (args.fast) {
      const auto ps = uniform_momenta(14);
      const auto curve = closed_form_curve(1.0, ps);
      curve_report(curve, reports);
      const std::vector<double> small = {0.2, 0.1, 0.05};
      reports.push_back(small_p_trend(closed_form_curve(1.0, small)));
      std::mt19937_64 rng(20240611);
      reports.push_back(verify_scaling(rng));
      reports.push_back(verify_symmetrize(rng));
      reports.push_back(verify_glue(rng));
    }
    if (args.curve) {
      std::ifstream in(*args.curve);
      if (!in) throw IoError("cannot read curve file " + args.curve->string());
      std::vector<CurveSample> curve;
      try {
        curve = read_curve_csv(in);
      } catch (const std::runtime_error& e) {
        throw IoError(e.what());
      }
      curve_report(curve, reports);
    }
    if (args.config) {
      const RunConfig cfg = load(*args.config);
      const std::vector<double> ps =
          cfg.p_values.empty() ? uniform_momenta(cfg.p_grid) : cfg.p_values;
      const auto curve = sweep_momentum(cfg.grid(), ps, cfg.solver,
                                        SeedPlan{cfg.seeds_per_point, cfg.seed_amplitude}, args.jobs);
      curve_report(curve, reports);
    }
    std::ostringstream text;
    write_report(text, reports);
    if (args.out) write_text(prepare_dir(*args.out) / "verify_report.txt", text.str());
    out << text.str();
    bool ok = true;
    for (const auto& r : reports) ok = ok && r.passed;
    return static_cast<int>(ok ? kOk : kNotConverged);
  });
}

int run(int argc, char** argv) {
  CLI::App app{"Travelling-wave minimizers of the Gross-Pitaevskii energy on a cylinder"};
  app.require_subcommand(1);

  SolitonArgs sol;
  auto* soliton = app.add_subcommand("soliton", "Tabulate a one-dimensional dark soliton");
  soliton->add_option("--c", sol.c, "speed, |c| <= sqrt 2");
  soliton->add_option("--p", sol.p, "momentum class representative");
  soliton->add_option("--samples", sol.samples, "number of x samples");
  soliton->add_option("--xmax", sol.xmax, "half-width of the sampled interval");
  soliton->add_option("--out", sol.out, "output directory");

  RunArgs mini;
  auto* minimize_cmd = app.add_subcommand("minimize", "Minimize the energy at fixed momentum");
  minimize_cmd->add_option("config", mini.config, "config file")->required();
  minimize_cmd->add_option("--seed", mini.seed, "seed field snapshot");
  minimize_cmd->add_option("--out", mini.out, "output directory");

  RunArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sample the minimal-energy curve");
  sweep_cmd->add_option("config", sw.config, "config file")->required();
  sweep_cmd->add_option("--out", sw.out, "output directory");
  sweep_cmd->add_option("--jobs", sw.jobs, "worker threads")->check(CLI::PositiveNumber);

  RunArgs crit;
  auto* crit_cmd = app.add_subcommand("critical-length", "Bracket the critical transverse period");
  crit_cmd->add_option("config", crit.config, "config file")->required();
  crit_cmd->add_option("--out", crit.out, "output directory");

  VerifyArgs ver;
  auto* verify_cmd = app.add_subcommand("verify", "Run the predicate battery");
  verify_cmd->add_flag("--fast", ver.fast, "closed-form curve and construction checks only");
  verify_cmd->add_option("--config", ver.config, "sweep config to run and check");
  verify_cmd->add_option("--curve", ver.curve, "existing curve file to check");
  verify_cmd->add_option("--out", ver.out, "output directory");
  verify_cmd->add_option("--jobs", ver.jobs, "worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? static_cast<int>(kOk) : static_cast<int>(kUsage);
  }
  if (*soliton) return cmd_soliton(sol, std::cout, std::cerr);
  if (*minimize_cmd) return cmd_minimize(mini, std::cout, std::cerr);
  if (*sweep_cmd) return cmd_sweep(sw, std::cout, std::cerr);
  if (*crit_cmd) return cmd_critical_length(crit, std::cout, std::cerr);
  return cmd_verify(ver, std::cout, std::cerr);
}

}  // namespace gpwave::cli
