#pragma once

// Momentum-constrained minimization of the discrete energy: preconditioned
// projected gradient with a least-squares multiplier, Armijo backtracking
// and exact re-projection onto the momentum level set after every trial
// step.

#include <string>
#include <vector>

#include "gpwave/field.hpp"

namespace gpwave {

struct SolverConfig {
  double step = 1.0;  ///< initial step in the preconditioned metric
  int max_iters = 20000;
  double grad_tol = 1e-8;        ///< projected gradient, relative to 1 + |grad E|
  double constraint_tol = 1e-10;  ///< |P(f) - p| on the fixed branch
  double residual_tol = 1e-6;     ///< Euler-Lagrange residual
  double backtrack_factor = 0.5;
  /// alpha in M = alpha - Laplacian; 0 picks min(1, 3 / L), which keeps the
  /// long phase modes of wide domains well conditioned.
  double precond_shift = 0.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct MinimizeResult {
  Field2D field;
  double multiplier = 0.0;     ///< projected-gradient multiplier c
  double multiplier_ls = 0.0;  ///< least-squares multiplier of the EL equation
  double energy = 0.0;
  MomentumClass momentum;
  double el_residual = 0.0;
  double transverse_energy = 0.0;
  double projected_gradient = 0.0;
  double gradient_norm = 0.0;
  double constraint_error = 0.0;
  int iterations = 0;
  bool converged = false;
  bool trivial = false;          ///< p = 0 branch, constant field returned
  bool supersonic_flag = false;  ///< |c| >= sqrt 2 (reported, not an error)
  std::string message;
  std::vector<double> energy_trace;  ///< energies of accepted iterates
};

/// Planar dark soliton of momentum p sampled on the grid; the constant 1
/// when p is a multiple of pi.
Field2D init_planar(double p, const Grid& grid);

/// init_planar(p) + amplitude sech(x) cos(2 pi mode y / ell) (1 + i) / sqrt 2.
Field2D init_perturbed(double p, const Grid& grid, double amplitude, int mode);

/// Momentum representative on the branch closest to p.
double momentum_near(const Field2D& f, double p);

/// Moves f along M^{-1} grad P (precond_shift as in SolverConfig) until |P(f) - p| <= tol. Returns f unchanged
/// when already within tol. Throws std::domain_error("constraint unreachable
/// from iterate") when the root-find fails or grad P degenerates.
Field2D project_momentum(const Field2D& f, double p, double tol = 1e-10,
                         double precond_shift = 0.0);

/// Least-squares c in i c d_x f + Laplacian f + f (1 - |f|^2) = 0 over the
/// interior. Throws std::domain_error when d_x f vanishes.
double multiplier_estimate(const Field2D& f);

/// Minimizes E over {P = p} starting from seed (projected first). Throws
/// std::domain_error("endpoint vacuum during iteration: enlarge L") when the
/// mean profile drops below 1/2 in modulus at an end.
MinimizeResult minimize(double p, const Grid& grid, const SolverConfig& cfg, const Field2D& seed);

}  // namespace gpwave
