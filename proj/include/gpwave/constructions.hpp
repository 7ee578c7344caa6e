#pragma once

// Constructive devices on fields: dyadic slice-and-mirror symmetrization,
// oscillation intervals of the transverse momentum density, boundary
// gluing between two low-energy loops and energy-slice selection.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gpwave/field.hpp"

namespace gpwave {

/// Strip J_k = [k h, (k+1) h] of height h = ell / 2^level.
///
/// On the grid the strip is the closed row range [k m, (k+1) m] with
/// m = ny / 2^level; its two boundary rows are shared with the neighbouring
/// strips and carry half weight in strip averages.
struct StripIndex {
  unsigned level = 1;
  std::size_t index = 0;

  /// Rows per strip; throws std::invalid_argument when the level is not
  /// compatible with ny (level >= 1, 2^level divides ny, index < 2^level).
  std::size_t rows(std::size_t ny) const;
  std::size_t first_row(std::size_t ny) const { return index * rows(ny); }
  double height(double ell) const;
};

/// Copy of f on the strip, mirrored about its upper boundary row onto the
/// next strip and extended 2h-periodically in y.
Field2D symmetrize(const Field2D& f, StripIndex strip);

/// (1/h) int_{J_k} int e(psi): energy per unit transverse length carried by
/// the strip. Equals energy(symmetrize(f, strip)) and sums over a level to
/// 2^level energy(f).
double strip_energy(const Field2D& f, StripIndex strip);

/// Momentum built from the strip alone: the strip-mean profile plus the
/// strip-averaged transverse term. Equals momentum(symmetrize(f, strip)).
MomentumClass strip_momentum(const Field2D& f, StripIndex strip);

/// q(y_j) = 1/2 int <i d_x w(., y_j), w(., y_j)> dx for each row.
std::vector<double> transverse_momentum_density(const Field2D& f);

/// [P](psi-hat) + (1 / |b - a|) int_a^b q(y) dy with a, b snapped to rows
/// (trapezoid rule over the closed row range, wrapping around T_ell).
MomentumClass slice_momentum(const Field2D& f, double a, double b);

/// One-dimensional momentum of the row psi(., y_j), with its own end
/// arguments.
MomentumClass row_momentum(const Field2D& f, std::size_t j);

struct Interval {
  double start = 0.0;
  double length = 0.0;
  double mean = 0.0;  ///< windowed mean actually attained
};

/// Mean of the periodic piecewise-linear interpolant of q over
/// [start, start + length].
double windowed_mean(std::span<const double> q, double ell, double start, double length);

/// Window of length ell / N on which q averages to delta, or nullopt when
/// the windowed mean never reaches delta. q must have zero mean.
std::optional<Interval> find_oscillation_interval(std::span<const double> q, double ell, int N,
                                                  double delta);

struct GlueSpec {
  LoopTrace loop_minus;
  LoopTrace loop_plus;
  double R = 2.0;
};

/// Rho e^{i phi} on [-R, R] x T_ell with nx columns: modulus 1 and a linear
/// phase in |x| <= R - 1, affine collars of width 1 joining the lifted loops.
/// The end columns equal the input loops sample by sample.
Field2D glue(const GlueSpec& spec, std::size_t nx);

struct GlueMomentumReport {
  MomentumClass momentum;  ///< [P_R] of the glued field
  double energy = 0.0;     ///< E_R of the glued field
  double kappa_minus = 0.0;
  double kappa_plus = 0.0;
  double ratio = 0.0;  ///< |P_R| / (kappa_minus + kappa_plus)^{1/2}
};

GlueMomentumReport glue_momentum_bound_check(const GlueSpec& spec, std::size_t nx);

struct SliceSelection {
  double R = 0.0;
  std::size_t column_minus = 0;
  std::size_t column_plus = 0;
  double slice_energy = 0.0;  ///< (1/ell) int [e(R, y) + e(-R, y)] dy
  double shell_energy = 0.0;  ///< (1/ell) int_{Rlo <= |x| <= Rhi} e
  double shell_bound = 0.0;   ///< shell_energy / (Rhi - Rlo), snapped
};

/// Column pair +-R in [Rlo, Rhi] with the smallest transverse slice energy.
SliceSelection energy_slice_select(const Field2D& f, double Rlo, double Rhi);

}  // namespace gpwave
