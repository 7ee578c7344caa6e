#pragma once

// Complex fields on the truncated cylinder [-L, L] x T_ell and the discrete
// Ginzburg-Landau functionals defined on them.
//
// Discretization. Samples sit at x_i = -L + i hx (i < nx) and y_j = j hy
// (j < ny, periodic). Derivatives are taken on links between neighbouring
// samples, (psi_{i+1} - psi_i) / hx, which is a second-order central
// difference at the link midpoint. Pointwise terms use the trapezoid rule in
// x and the rectangle rule in y. Every functional carries the 1/ell
// normalization, so a y-independent field has the energy and momentum of its
// one-dimensional profile.

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace gpwave {

using Complex = std::complex<double>;

/// Sampling of [-L, L] x T_ell.
struct Grid {
  double L = 1.0;
  std::size_t nx = 16;
  double ell = 1.0;
  std::size_t ny = 4;

  /// Validating constructor: L, ell > 0, nx >= 16 (>= 2 for sub-windows),
  /// ny >= 4 and a power of two.
  static Grid make(double L, std::size_t nx, double ell, std::size_t ny);

  double hx() const { return 2.0 * L / static_cast<double>(nx - 1); }
  double hy() const { return ell / static_cast<double>(ny); }
  double x(std::size_t i) const { return -L + static_cast<double>(i) * hx(); }
  double y(std::size_t j) const { return static_cast<double>(j) * hy(); }
  /// Trapezoid weight of column i, in units of hx.
  double x_weight(std::size_t i) const { return (i == 0 || i + 1 == nx) ? 0.5 : 1.0; }
  std::size_t size() const { return nx * ny; }

  bool operator==(const Grid&) const = default;
};

/// Sampled complex field, stored row-major in x then y (index i * ny + j).
class Field2D {
 public:
  Field2D() = default;
  explicit Field2D(const Grid& grid, Complex fill = Complex(0.0, 0.0));
  Field2D(const Grid& grid, std::vector<Complex> values);

  const Grid& grid() const { return grid_; }
  std::size_t nx() const { return grid_.nx; }
  std::size_t ny() const { return grid_.ny; }

  Complex& operator()(std::size_t i, std::size_t j) { return values_[i * grid_.ny + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return values_[i * grid_.ny + j];
  }

  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }
  std::span<const Complex> column(std::size_t i) const {
    return std::span<const Complex>(values_).subspan(i * grid_.ny, grid_.ny);
  }

  bool all_finite() const;

  // Vector-space helpers used by the descent loop.
  Field2D& operator+=(const Field2D& other);
  Field2D& operator-=(const Field2D& other);
  Field2D& operator*=(double s);
  /// this += s * other
  Field2D& axpy(double s, const Field2D& other);

 private:
  Grid grid_;
  std::vector<Complex> values_;
};

/// Real inner product Re sum a conj(b) over all samples (no quadrature weights).
double dot(const Field2D& a, const Field2D& b);

/// psi = mean_profile + remainder, mean taken over y.
struct Decomposition {
  std::vector<Complex> mean_profile;
  Field2D remainder;
};

Decomposition decompose(const Field2D& f);

/// Momentum value in R / pi Z with a tracked real representative.
struct MomentumClass {
  double representative = 0.0;

  /// Representative reduced to [0, pi).
  double reduced() const;
  /// Distance to [0], i.e. |p| on R / pi Z.
  double magnitude() const;
  /// min_k |a - b - k pi|
  static double distance(const MomentumClass& a, const MomentumClass& b);
};

/// Function on T_ell sampled at ny points (a column of a field).
struct LoopTrace {
  std::vector<Complex> values;
  double ell = 1.0;

  std::size_t size() const { return values.size(); }
  double h() const { return ell / static_cast<double>(values.size()); }
};

LoopTrace column_loop(const Field2D& f, std::size_t i);

// ---------------------------------------------------------------------------
// Energy

double energy(const Field2D& f);

/// Pointwise energy density e(psi) at each sample. Link terms are split
/// evenly between their two end samples, so the trapezoid/rectangle
/// quadrature of the density reproduces energy(f) exactly.
std::vector<double> energy_density(const Field2D& f);

/// (1/ell) int e(psi)(x_i, y) dy for one column.
double column_energy(const Field2D& f, std::size_t i);

/// Energy of a y-independent profile with the same x-stencils (the 1D
/// energy of psi-hat).
double profile_energy(std::span<const Complex> profile, const Grid& grid);

/// (1/2 ell) int |grad w|^2 for the remainder w; nonnegative, zero iff the
/// field is y-independent.
double transverse_energy(const Field2D& f);

/// The w-integral of the splitting E(psi) = E(psi-hat) + (1/2 ell) int
/// ( |grad w|^2 + 2 <w, psi-hat>^2 - |w|^2 (1 - |psi-hat|^2)
///   + 2 <w, psi-hat> |w|^2 + |w|^4 / 2 ).
double splitting_remainder(const Field2D& f);

/// 1/2 int (|d_x psi|^2 + lambda^2 |d_y psi|^2) + 1/4 int (1 - |psi|^2)^2
/// on a grid with ell = 1.
double anisotropic_energy(const Field2D& f, double lambda);

/// Field on T_1 with psi_ell(x, y) = psi(x, ell y): the same samples on a
/// unit-period grid.
Field2D rescale_to_unit_period(const Field2D& f);

// ---------------------------------------------------------------------------
// Momentum

/// Pieces of the discrete untwisted momentum:
///   representative = bulk + (arg_plus - arg_minus) / 2
/// where bulk = (1/2 ell) int <i d_x psi, psi> and arg_* are principal
/// arguments of psi-hat at the two ends.
struct MomentumTerms {
  double bulk = 0.0;
  double arg_minus = 0.0;
  double arg_plus = 0.0;
  double end_modulus_minus = 0.0;
  double end_modulus_plus = 0.0;

  double representative() const { return bulk + 0.5 * (arg_plus - arg_minus); }
};

/// Throws std::domain_error("endpoint vacuum: enlarge L") when psi-hat
/// vanishes at an end.
MomentumTerms momentum_terms(const Field2D& f);

MomentumClass momentum(const Field2D& f);

/// 1D momentum of a single profile (same stencil as momentum()).
MomentumClass profile_momentum(std::span<const Complex> profile);

// ---------------------------------------------------------------------------
// Windows |x| <= R

/// Column range [first, last] with |x_i| <= R (up to roundoff).
std::pair<std::size_t, std::size_t> window_columns(const Grid& grid, double R);

/// Restriction of f to columns [first, last]; its grid has the same spacing.
Field2D restrict_columns(const Field2D& f, std::size_t first, std::size_t last);

/// E_R: energy of the restriction to |x| <= R. Throws when R > L or R <= 0.
double windowed_energy(const Field2D& f, double R);

/// [P_R]: momentum of the restriction to |x| <= R.
MomentumClass windowed_momentum(const Field2D& f, double R);

// ---------------------------------------------------------------------------
// Exact gradients of the discrete functionals. Entry (i, j) holds
// dF/dRe psi_ij + i dF/dIm psi_ij, so F(f + t h) = F(f) + t dot(grad, h) + O(t^2).

Field2D energy_gradient(const Field2D& f);
Field2D momentum_gradient(const Field2D& f);

// ---------------------------------------------------------------------------
// Euler-Lagrange residual

/// Discrete L2 norm over interior columns of
///   i c d_x psi + Laplacian psi + psi (1 - |psi|^2)
/// with centred first differences and the 3-point Laplacian (the discrete
/// form of grad E - c grad P divided by the quadrature weights).
double el_residual(const Field2D& f, double c);

// ---------------------------------------------------------------------------
// Loops on T_ell

/// kappa(psi) = (1/2 ell) int |d_y psi|^2 + (1/4 ell) int (1 - |psi|^2)^2
double kappa(const LoopTrace& loop);

/// C_ell = max{2 + ell / (sqrt(2) pi), 2 sqrt(2) ell / pi}
double lift_constant(double ell);

/// kappa_ell = min{1 / (4 ell^2), 1/16, 1 / (4 C_ell)^2}
double kappa_threshold(double ell);

struct LoopLift {
  std::vector<double> modulus;
  std::vector<double> phase;  ///< continuous and periodic, phase[0] = arg(loop[0])
  Complex mean;
  double kappa = 0.0;
  bool kappa_admissible = false;  ///< kappa <= kappa_ell
  double mean_phase = 0.0;        ///< (1/ell) int phase
  /// Only meaningful when kappa_admissible.
  double mean_modulus_bound = 0.0;  ///< 1 - C_ell kappa^{1/2}
  double phase_gap = 0.0;           ///< circle distance(arg mean, mean_phase)
  double phase_gap_bound = 0.0;     ///< C_ell kappa^{1/2}
};

/// Polar lift psi = |psi| e^{i phi} of a nonvanishing loop. Throws
/// std::domain_error("loop vanishes; lifting undefined") when a sample is
/// zero or the loop jumps across the origin between samples, and when the
/// loop winds around the origin.
LoopLift lift_loop(const LoopTrace& loop);

/// Distance on R / 2 pi Z.
double circle_distance(double a, double b);

/// int |psi - psi-hat|^2 (rectangle rule).
double loop_deviation(const LoopTrace& loop);

/// int |d_y psi|^2 computed from the discrete Fourier coefficients; exact
/// for trigonometric polynomials of degree < ny / 2.
double loop_dirichlet_spectral(const LoopTrace& loop);

/// Poincare-Wirtinger quotient int |psi - psi-hat|^2 / ((ell / 2 pi)^2 int |d_y psi|^2)
/// with the spectral Dirichlet integral; at most 1. Zero for constant loops.
double poincare_wirtinger_ratio(const LoopTrace& loop);

/// Chord-to-angle comparison for unimodular numbers: the circle distance of
/// the arguments divided by |z1 - z2|. On chords |z1 - z2| <= 1 the angle is
/// at most pi/3 and the sharp bound on this ratio is pi/3 (attained at the
/// chord 1); over all chords it is pi/2. Throws for z1 == z2.
double arg_chord_ratio(Complex z1, Complex z2);

/// Sharp constant for arg_chord_ratio on chords of length at most 1.
inline constexpr double kArgChordConstant = 1.0471975511965976;  // pi / 3

}  // namespace gpwave
