#include "gpwave/soliton1d.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gpwave::soliton1d {

namespace {

constexpr double kPi = std::numbers::pi;

void check_speed(double c) {
  if (!(std::abs(c) <= kSoundSpeed) || std::isnan(c)) {
    throw std::domain_error("soliton speed |c| = " + std::to_string(std::abs(c)) +
                            " exceeds sqrt(2)");
  }
}

// Xi in the angle variable c = sqrt(2) cos(theta): Xi = theta - sin(2 theta)/2.
double xi_of_angle(double theta) { return theta - 0.5 * std::sin(2.0 * theta); }

// Solves theta - sin(2 theta)/2 = q on [0, pi]; the map is increasing with
// derivative 2 sin^2(theta).
double angle_from_momentum(double q) {
  if (q <= 0.0) return 0.0;
  if (q >= kPi) return kPi;
  double lo = 0.0;
  double hi = kPi;
  double theta = q;
  for (int it = 0; it < 200; ++it) {
    const double f = xi_of_angle(theta) - q;
    if (std::abs(f) < 1e-15) break;
    if (f > 0.0) {
      hi = theta;
    } else {
      lo = theta;
    }
    const double s = std::sin(theta);
    const double df = 2.0 * s * s;
    double next = df > 0.0 ? theta - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - theta) < 1e-17) {
      theta = next;
      break;
    }
    theta = next;
  }
  return theta;
}

}  // namespace

SolitonParams::SolitonParams(double c) : c_(c) { check_speed(c); }

double SolitonParams::root() const { return std::sqrt(std::max(0.0, 2.0 - c_ * c_)); }

double SolitonParams::depth() const { return root() / std::numbers::sqrt2; }

double SolitonParams::momentum() const { return xi(c_); }

double SolitonParams::energy() const {
  const double r = root();
  return r * r * r / 3.0;
}

std::complex<double> dark_soliton(double c, double x) {
  const SolitonParams params(c);
  const double r = params.root();
  return {-params.depth() * std::tanh(0.5 * r * x), c / std::numbers::sqrt2};
}

double xi(double c) {
  check_speed(c);
  if (c == kSoundSpeed) return 0.0;
  if (c == -kSoundSpeed) return kPi;
  const double r = std::sqrt(2.0 - c * c);
  return 0.5 * kPi - std::atan(c / r) - 0.5 * c * r;
}

double xi_derivative(double c) {
  check_speed(c);
  return -std::sqrt(std::max(0.0, 2.0 - c * c));
}

double reduce_momentum(double q) {
  double r = std::fmod(q, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r -= kPi;
  return r;
}

double speed_from_momentum(double q) {
  const double r = reduce_momentum(q);
  if (r == 0.0) return kSoundSpeed;
  return kSoundSpeed * std::cos(angle_from_momentum(r));
}

double energy_1d(double q) {
  double r = reduce_momentum(q);
  r = std::min(r, kPi - r);
  // 2 - c^2 = 2 sin^2(theta) avoids cancellation near the sound speed.
  const double sin_theta = std::sin(angle_from_momentum(r));
  const double s = 2.0 * sin_theta * sin_theta;
  return s * std::sqrt(s) / 3.0;
}

double energy_1d_slope(double q) {
  if (!(q > 0.0 && q < kPi)) {
    throw std::domain_error("energy_1d_slope requires 0 < q < pi");
  }
  return speed_from_momentum(q);
}

Curve1D curve_point(double q) {
  const double r = reduce_momentum(q);
  return {r, energy_1d(r), speed_from_momentum(r)};
}

}  // namespace gpwave::soliton1d
