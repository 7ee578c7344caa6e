#pragma once

// One-dimensional dark solitons of the Gross-Pitaevskii equation and the
// closed-form minimal-energy curve I_1d(q) at fixed momentum class q mod pi.
//
// Conventions (shared with field.hpp): <a, b> = Re(a conj(b)), the momentum
// is 1/2 int <i u', u> + 1/2 [arg u] and a travelling wave of speed c solves
//   i c u' + u'' + u (1 - |u|^2) = 0.
// With these conventions the soliton of speed c carries momentum Xi(c).

#include <complex>
#include <numbers>

namespace gpwave::soliton1d {

inline constexpr double kSoundSpeed = std::numbers::sqrt2;

/// Speed of a dark soliton, validated against the sound speed sqrt(2).
class SolitonParams {
 public:
  explicit SolitonParams(double c);

  double speed() const { return c_; }
  /// sqrt(2 - c^2): inverse core width and twice the tanh amplitude squared.
  double root() const;
  /// Amplitude of the tanh profile, sqrt((2 - c^2) / 2).
  double depth() const;
  /// Momentum class representative Xi(c) in [0, pi].
  double momentum() const;
  double energy() const;

 private:
  double c_;
};

/// Dark soliton of speed c evaluated at x.
///   u_c(x) = -sqrt((2-c^2)/2) tanh(sqrt(2-c^2) x / 2) + i c / sqrt(2)
/// Throws std::domain_error when |c| > sqrt(2).
std::complex<double> dark_soliton(double c, double x);

/// Xi(c) = pi/2 - arctan(c / sqrt(2-c^2)) - (c/2) sqrt(2-c^2), continuous at
/// the endpoints (Xi(sqrt 2) = 0, Xi(-sqrt 2) = pi).
double xi(double c);

/// Xi'(c) = -sqrt(2 - c^2).
double xi_derivative(double c);

/// Reduce a momentum representative to [0, pi).
double reduce_momentum(double q);

/// Unique speed c in (-sqrt 2, sqrt 2] with Xi(c) = q mod pi.
double speed_from_momentum(double q);

/// I_1d(q) = (1/3) (2 - c_q^2)^{3/2}; even and pi-periodic.
double energy_1d(double q);

/// I_1d'(q) = c_q for 0 < q < pi; throws std::domain_error at the endpoints.
double energy_1d_slope(double q);

struct Curve1D {
  double q = 0.0;
  double value = 0.0;
  double speed = kSoundSpeed;
};

Curve1D curve_point(double q);

}  // namespace gpwave::soliton1d
