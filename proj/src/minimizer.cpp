#include "gpwave/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gpwave/preconditioner.hpp"
#include "gpwave/soliton1d.hpp"

namespace gpwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kArmijo = 1e-4;

bool is_trivial_momentum(double p) {
  const double q = soliton1d::reduce_momentum(p);
  return std::min(q, kPi - q) < 1e-14;
}

double shift_for(const Grid& grid, double requested) {
  return requested > 0.0 ? requested : std::min(1.0, 3.0 / grid.L);
}

double lift_to(double representative, double p) {
  return representative + kPi * std::round((p - representative) / kPi);
}

// Gradient data at one iterate.
struct State {
  Field2D f;
  double energy = 0.0;
  double momentum = 0.0;
  Field2D projected;  // G = grad E - c grad P
  Field2D direction;  // M^{-1} G
  double multiplier = 0.0;
  double pg = 0.0;     // |G| in the M^{-1} metric
  double gnorm = 0.0;  // |grad E| in the M^{-1} metric
};

State evaluate(Field2D f, double p, const Preconditioner& M) {
  State s;
  const MomentumTerms terms = momentum_terms(f);
  if (terms.end_modulus_minus < 0.5 || terms.end_modulus_plus < 0.5) {
    throw std::domain_error("endpoint vacuum during iteration: enlarge L");
  }
  s.energy = energy(f);
  s.momentum = lift_to(terms.representative(), p);
  const Field2D gE = energy_gradient(f);
  const Field2D gP = momentum_gradient(f);
  const Field2D u = M.solve(gP);
  Field2D v = M.solve(gE);
  const double pu = dot(gP, u);
  if (!(pu > 0.0)) throw std::domain_error("constraint unreachable from iterate");
  s.multiplier = dot(gE, u) / pu;
  s.gnorm = std::sqrt(std::max(0.0, dot(gE, v)));
  s.projected = gE;
  s.projected.axpy(-s.multiplier, gP);
  s.direction = std::move(v);
  s.direction.axpy(-s.multiplier, u);
  s.pg = std::sqrt(std::max(0.0, dot(s.projected, s.direction)));
  s.f = std::move(f);
  return s;
}

Field2D project_with(const Field2D& f, double p, double tol, const Preconditioner& M) {
  double err = lift_to(momentum(f).representative, p) - p;
  if (std::abs(err) <= tol) return f;
  const Field2D gP = momentum_gradient(f);
  const Field2D u = M.solve(gP);
  const double slope = dot(gP, u);
  if (!(slope > 1e-300)) throw std::domain_error("constraint unreachable from iterate");

  // Secant iteration on s -> P(f + s u) - p, started from the Newton step.
  auto residual = [&](double s) {
    Field2D trial = f;
    trial.axpy(s, u);
    return lift_to(momentum(trial).representative, p) - p;
  };
  double s0 = 0.0;
  double r0 = err;
  double s1 = -err / slope;
  double r1 = residual(s1);
  for (int it = 0; it < 50; ++it) {
    if (std::abs(r1) <= tol) {
      Field2D out = f;
      out.axpy(s1, u);
      return out;
    }
    if (r1 == r0) break;
    const double s2 = s1 - r1 * (s1 - s0) / (r1 - r0);
    if (!std::isfinite(s2)) break;
    s0 = s1;
    r0 = r1;
    s1 = s2;
    r1 = residual(s1);
  }
  throw std::domain_error("constraint unreachable from iterate");
}

}  // namespace

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("solver config: ") + name + " must be positive");
    }
  };
  positive(step, "step");
  positive(grad_tol, "grad_tol");
  positive(constraint_tol, "constraint_tol");
  positive(residual_tol, "residual_tol");
  if (!(precond_shift >= 0.0) || !std::isfinite(precond_shift)) {
    throw std::invalid_argument("solver config: precond_shift must be >= 0");
  }
  if (max_iters < 0) throw std::invalid_argument("solver config: max_iters must be >= 0");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw std::invalid_argument("solver config: backtrack_factor must lie in (0, 1)");
  }
}

Field2D init_planar(double p, const Grid& grid) {
  if (is_trivial_momentum(p)) return Field2D(grid, Complex(1.0, 0.0));
  const double c = soliton1d::speed_from_momentum(p);
  Field2D f(grid);
  for (std::size_t i = 0; i < grid.nx; ++i) {
    const Complex u = soliton1d::dark_soliton(c, grid.x(i));
    for (std::size_t j = 0; j < grid.ny; ++j) f(i, j) = u;
  }
  return f;
}

Field2D init_perturbed(double p, const Grid& grid, double amplitude, int mode) {
  if (mode < 1) throw std::invalid_argument("init_perturbed: mode must be >= 1");
  if (!(amplitude >= 0.0)) throw std::invalid_argument("init_perturbed: amplitude must be >= 0");
  Field2D f = init_planar(p, grid);
  if (amplitude == 0.0) return f;
  const Complex tilt = Complex(1.0, 1.0) / std::numbers::sqrt2;
  for (std::size_t i = 0; i < grid.nx; ++i) {
    const double envelope = amplitude / std::cosh(grid.x(i));
    for (std::size_t j = 0; j < grid.ny; ++j) {
      const double phase = 2.0 * kPi * mode * static_cast<double>(j) / static_cast<double>(grid.ny);
      f(i, j) += envelope * std::cos(phase) * tilt;
    }
  }
  return f;
}

double momentum_near(const Field2D& f, double p) {
  return lift_to(momentum(f).representative, p);
}

Field2D project_momentum(const Field2D& f, double p, double tol, double precond_shift) {
  if (std::abs(momentum_near(f, p) - p) <= tol) return f;
  const Preconditioner M(f.grid(), shift_for(f.grid(), precond_shift));
  return project_with(f, p, tol, M);
}

double multiplier_estimate(const Field2D& f) {
  const Grid& g = f.grid();
  const double hx = g.hx();
  const double hy = g.hy();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 1; i + 1 < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      const Complex v = f(i, j);
      const Complex right = f(i + 1, j);
      const Complex left = f(i - 1, j);
      const Complex up = f(i, (j + 1) % g.ny);
      const Complex down = f(i, (j + g.ny - 1) % g.ny);
      const Complex rest = (right - 2.0 * v + left) / (hx * hx) +
                           (up - 2.0 * v + down) / (hy * hy) + v * (1.0 - std::norm(v));
      const Complex d = Complex(0.0, 1.0) * (right - left) / (2.0 * hx);
      num += (rest * std::conj(d)).real();
      den += std::norm(d);
    }
  }
  if (!(den > 1e-24 * static_cast<double>(g.size()))) {
    throw std::domain_error("multiplier_estimate: d_x f vanishes");
  }
  return -num / den;
}

MinimizeResult minimize(double p, const Grid& grid, const SolverConfig& cfg, const Field2D& seed) {
  cfg.validate();
  if (!(seed.grid() == grid)) throw std::invalid_argument("minimize: seed grid mismatch");
  MinimizeResult result;

  if (is_trivial_momentum(p)) {
    result.field = Field2D(grid, Complex(1.0, 0.0));
    result.multiplier = std::numeric_limits<double>::quiet_NaN();
    result.multiplier_ls = std::numeric_limits<double>::quiet_NaN();
    result.momentum = MomentumClass{0.0};
    result.converged = true;
    result.trivial = true;
    result.message = "trivial branch: constant field";
    result.energy_trace.push_back(0.0);
    return result;
  }

  const Preconditioner M(grid, shift_for(grid, cfg.precond_shift));
  const double project_tol = 0.1 * cfg.constraint_tol;
  State s = evaluate(project_with(seed, p, project_tol, M), p, M);
  result.energy_trace.push_back(s.energy);

  double tau = cfg.step;
  const double tau_min = 1e-12 * cfg.step;
  const double tau_max = 1e3 * cfg.step;
  bool stalled = false;
  double residual = el_residual(s.f, s.multiplier);
  int iter = 0;
  for (;; ++iter) {
    residual = el_residual(s.f, s.multiplier);
    const bool stationary = s.pg <= cfg.grad_tol * (1.0 + s.gnorm);
    if (stationary && residual <= cfg.residual_tol &&
        std::abs(s.momentum - p) <= cfg.constraint_tol) {
      result.converged = true;
      break;
    }
    if (iter >= cfg.max_iters) break;

    // Backtracking on the energy of the re-projected trial point. The slack
    // term absorbs roundoff in E once the predicted decrease is below it.
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(s.energy);
    bool accepted = false;
    State next;
    while (tau >= tau_min) {
      Field2D trial = s.f;
      trial.axpy(-tau, s.direction);
      try {
        trial = project_with(trial, p, project_tol, M);
        // A trial that empties an end is rejected like any other bad step;
        // only an accepted iterate can trip the vacuum guard in evaluate().
        const MomentumTerms t = momentum_terms(trial);
        if (t.end_modulus_minus < 0.5 || t.end_modulus_plus < 0.5) {
          tau *= cfg.backtrack_factor;
          continue;
        }
        const double e = energy(trial);
        if (std::isfinite(e) && e <= s.energy - kArmijo * tau * s.pg * s.pg + slack &&
            e <= s.energy + slack) {
          next = evaluate(std::move(trial), p, M);
          accepted = true;
          break;
        }
      } catch (const std::domain_error&) {
        // projection or momentum undefined at the trial point: shrink
      }
      tau *= cfg.backtrack_factor;
    }
    if (!accepted) {
      stalled = true;
      break;
    }

    // Barzilai-Borwein step in the preconditioned metric for the next trial.
    Field2D step = next.f;
    step -= s.f;
    Field2D change = next.projected;
    change -= s.projected;
    const double sy = dot(step, change);
    const double ss = dot(step, M.apply(step));
    double proposal = (sy > 0.0 && ss > 0.0) ? ss / sy : 2.0 * tau;
    tau = std::clamp(proposal, tau_min * 1e3, tau_max);

    s = std::move(next);
    result.energy_trace.push_back(s.energy);
  }

  result.iterations = iter;
  result.multiplier = s.multiplier;
  result.multiplier_ls = multiplier_estimate(s.f);
  result.energy = s.energy;
  result.momentum = MomentumClass{s.momentum};
  result.el_residual = residual;
  result.transverse_energy = transverse_energy(s.f);
  result.projected_gradient = s.pg;
  result.gradient_norm = s.gnorm;
  result.constraint_error = std::abs(s.momentum - p);
  result.supersonic_flag = std::abs(s.multiplier) >= soliton1d::kSoundSpeed;
  if (result.converged) {
    result.message = "converged";
  } else if (stalled) {
    result.message = "line search stalled";
  } else {
    result.message = "max_iters exceeded";
  }
  result.field = std::move(s.f);
  return result;
}

}  // namespace gpwave
