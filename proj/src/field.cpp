#include "gpwave/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gpwave {

namespace {

constexpr double kPi = std::numbers::pi;

double norm2(Complex z) { return std::norm(z); }

// Energy with a separate weight on the y-gradient term; weight 1 gives E.
double energy_weighted(const Field2D& f, double y_weight) {
  const Grid& g = f.grid();
  const double hx = g.hx();
  const double hy = g.hy();
  double x_links = 0.0;
  double y_terms = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    double column = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
      const Complex v = f(i, j);
      const Complex up = f(i, (j + 1) % g.ny);
      const double pot = 1.0 - norm2(v);
      column += y_weight * 0.5 * norm2(up - v) / (hy * hy) + 0.25 * pot * pot;
      if (i + 1 < g.nx) x_links += 0.5 * norm2(f(i + 1, j) - v);
    }
    y_terms += g.x_weight(i) * column;
  }
  return hy / g.ell * (x_links / hx + hx * y_terms);
}

void check_window(const Grid& g, double R) {
  if (!(R > 0.0) || R > g.L * (1.0 + 1e-12)) {
    throw std::domain_error("window half-width R must satisfy 0 < R <= L");
  }
}

}  // namespace

Grid Grid::make(double L, std::size_t nx, double ell, std::size_t ny) {
  if (!(L > 0.0)) throw std::invalid_argument("grid: L must be positive");
  if (!(ell > 0.0)) throw std::invalid_argument("grid: ell must be positive");
  if (nx < 16) throw std::invalid_argument("grid: nx must be at least 16");
  if (ny < 4 || !std::has_single_bit(ny)) {
    throw std::invalid_argument("grid: ny must be a power of two >= 4");
  }
  return Grid{L, nx, ell, ny};
}

Field2D::Field2D(const Grid& grid, Complex fill) : grid_(grid), values_(grid.size(), fill) {}

Field2D::Field2D(const Grid& grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("field: sample count does not match grid");
  }
}

bool Field2D::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

Field2D& Field2D::operator+=(const Field2D& other) { return axpy(1.0, other); }

Field2D& Field2D::operator-=(const Field2D& other) { return axpy(-1.0, other); }

Field2D& Field2D::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

Field2D& Field2D::axpy(double s, const Field2D& other) {
  if (other.values_.size() != values_.size()) {
    throw std::invalid_argument("field: size mismatch");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * other.values_[k];
  return *this;
}

double dot(const Field2D& a, const Field2D& b) {
  const auto va = a.values();
  const auto vb = b.values();
  if (va.size() != vb.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < va.size(); ++k) {
    s += va[k].real() * vb[k].real() + va[k].imag() * vb[k].imag();
  }
  return s;
}

Decomposition decompose(const Field2D& f) {
  const Grid& g = f.grid();
  Decomposition d{std::vector<Complex>(g.nx), f};
  for (std::size_t i = 0; i < g.nx; ++i) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) s += f(i, j);
    const Complex mean = s / static_cast<double>(g.ny);
    d.mean_profile[i] = mean;
    for (std::size_t j = 0; j < g.ny; ++j) d.remainder(i, j) -= mean;
  }
  return d;
}

double MomentumClass::reduced() const {
  double r = std::fmod(representative, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r -= kPi;
  return r;
}

double MomentumClass::magnitude() const {
  const double r = reduced();
  return std::min(r, kPi - r);
}

double MomentumClass::distance(const MomentumClass& a, const MomentumClass& b) {
  return MomentumClass{a.representative - b.representative}.magnitude();
}

LoopTrace column_loop(const Field2D& f, std::size_t i) {
  const auto col = f.column(i);
  return LoopTrace{std::vector<Complex>(col.begin(), col.end()), f.grid().ell};
}

double energy(const Field2D& f) { return energy_weighted(f, 1.0); }

std::vector<double> energy_density(const Field2D& f) {
  const Grid& g = f.grid();
  const double hx = g.hx();
  const double hy = g.hy();
  std::vector<double> e(g.size(), 0.0);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      const Complex v = f(i, j);
      const double pot = 1.0 - norm2(v);
      double dx2;
      if (i == 0) {
        dx2 = norm2(f(1, j) - v);
      } else if (i + 1 == g.nx) {
        dx2 = norm2(v - f(i - 1, j));
      } else {
        dx2 = 0.5 * (norm2(f(i + 1, j) - v) + norm2(v - f(i - 1, j)));
      }
      const double dy2 = 0.5 * (norm2(f(i, (j + 1) % g.ny) - v) +
                                norm2(v - f(i, (j + g.ny - 1) % g.ny)));
      e[i * g.ny + j] = 0.5 * dx2 / (hx * hx) + 0.5 * dy2 / (hy * hy) + 0.25 * pot * pot;
    }
  }
  return e;
}

double column_energy(const Field2D& f, std::size_t i) {
  const Grid& g = f.grid();
  if (i >= g.nx) throw std::out_of_range("column_energy: column index");
  const auto e = energy_density(f);
  double s = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) s += e[i * g.ny + j];
  return s / static_cast<double>(g.ny);
}

double profile_energy(std::span<const Complex> profile, const Grid& grid) {
  if (profile.size() != grid.nx) throw std::invalid_argument("profile_energy: length");
  const double hx = grid.hx();
  double links = 0.0;
  double pots = 0.0;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double pot = 1.0 - norm2(profile[i]);
    pots += grid.x_weight(i) * 0.25 * pot * pot;
    if (i + 1 < profile.size()) links += 0.5 * norm2(profile[i + 1] - profile[i]);
  }
  return links / hx + hx * pots;
}

double transverse_energy(const Field2D& f) {
  const Grid& g = f.grid();
  const Decomposition d = decompose(f);
  const Field2D& w = d.remainder;
  const double hx = g.hx();
  const double hy = g.hy();
  double x_links = 0.0;
  double y_links = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    double column = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
      column += 0.5 * norm2(w(i, (j + 1) % g.ny) - w(i, j)) / (hy * hy);
      if (i + 1 < g.nx) x_links += 0.5 * norm2(w(i + 1, j) - w(i, j));
    }
    y_links += g.x_weight(i) * column;
  }
  return hy / g.ell * (x_links / hx + hx * y_links);
}

double splitting_remainder(const Field2D& f) {
  const Grid& g = f.grid();
  const Decomposition d = decompose(f);
  const Field2D& w = d.remainder;
  const double hx = g.hx();
  const double hy = g.hy();
  double x_links = 0.0;
  double columns = 0.0;
  for (std::size_t i = 0; i < g.nx; ++i) {
    const Complex m = d.mean_profile[i];
    const double defect = 1.0 - norm2(m);
    double column = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) {
      const Complex v = w(i, j);
      const double proj = v.real() * m.real() + v.imag() * m.imag();
      const double n2 = norm2(v);
      column += 0.5 * norm2(w(i, (j + 1) % g.ny) - v) / (hy * hy) +
                0.5 * (2.0 * proj * proj - n2 * defect + 2.0 * proj * n2 + 0.5 * n2 * n2);
      if (i + 1 < g.nx) x_links += 0.5 * norm2(w(i + 1, j) - v);
    }
    columns += g.x_weight(i) * column;
  }
  return hy / g.ell * (x_links / hx + hx * columns);
}

double anisotropic_energy(const Field2D& f, double lambda) {
  if (!(lambda > 0.0)) throw std::domain_error("anisotropic_energy: lambda must be positive");
  if (std::abs(f.grid().ell - 1.0) > 1e-14) {
    throw std::domain_error("anisotropic_energy: grid must have unit period");
  }
  return energy_weighted(f, lambda * lambda);
}

Field2D rescale_to_unit_period(const Field2D& f) {
  Grid g = f.grid();
  g.ell = 1.0;
  const auto v = f.values();
  return Field2D(g, std::vector<Complex>(v.begin(), v.end()));
}

MomentumTerms momentum_terms(const Field2D& f) {
  const Grid& g = f.grid();
  double bulk = 0.0;
  for (std::size_t i = 0; i + 1 < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      bulk -= (f(i + 1, j) * std::conj(f(i, j))).imag();
    }
  }
  bulk *= 0.5 / static_cast<double>(g.ny);

  Complex lo = 0.0;
  Complex hi = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j) {
    lo += f(0, j);
    hi += f(g.nx - 1, j);
  }
  lo /= static_cast<double>(g.ny);
  hi /= static_cast<double>(g.ny);
  if (std::abs(lo) < 1e-12 || std::abs(hi) < 1e-12) {
    throw std::domain_error("endpoint vacuum: enlarge L");
  }
  return MomentumTerms{bulk, std::arg(lo), std::arg(hi), std::abs(lo), std::abs(hi)};
}

MomentumClass momentum(const Field2D& f) { return {momentum_terms(f).representative()}; }

MomentumClass profile_momentum(std::span<const Complex> profile) {
  if (profile.size() < 2) throw std::invalid_argument("profile_momentum: too short");
  const Complex lo = profile.front();
  const Complex hi = profile.back();
  if (std::abs(lo) < 1e-12 || std::abs(hi) < 1e-12) {
    throw std::domain_error("endpoint vacuum: enlarge L");
  }
  double bulk = 0.0;
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    bulk -= (profile[i + 1] * std::conj(profile[i])).imag();
  }
  return {0.5 * bulk + 0.5 * (std::arg(hi) - std::arg(lo))};
}

std::pair<std::size_t, std::size_t> window_columns(const Grid& grid, double R) {
  check_window(grid, R);
  const double hx = grid.hx();
  const double slack = 1e-9 * hx;
  std::size_t first = grid.nx;
  std::size_t last = 0;
  for (std::size_t i = 0; i < grid.nx; ++i) {
    if (std::abs(grid.x(i)) <= R + slack) {
      first = std::min(first, i);
      last = std::max(last, i);
    }
  }
  if (first >= last) throw std::domain_error("window narrower than one grid cell");
  return {first, last};
}

Field2D restrict_columns(const Field2D& f, std::size_t first, std::size_t last) {
  const Grid& g = f.grid();
  if (!(first < last && last < g.nx)) throw std::out_of_range("restrict_columns: range");
  const std::size_t n = last - first + 1;
  Grid sub{0.5 * static_cast<double>(n - 1) * g.hx(), n, g.ell, g.ny};
  const auto v = f.values();
  return Field2D(sub, std::vector<Complex>(v.begin() + static_cast<std::ptrdiff_t>(first * g.ny),
                                           v.begin() + static_cast<std::ptrdiff_t>((last + 1) * g.ny)));
}

double windowed_energy(const Field2D& f, double R) {
  const auto [first, last] = window_columns(f.grid(), R);
  if (first == 0 && last + 1 == f.nx()) return energy(f);
  return energy(restrict_columns(f, first, last));
}

MomentumClass windowed_momentum(const Field2D& f, double R) {
  const auto [first, last] = window_columns(f.grid(), R);
  if (first == 0 && last + 1 == f.nx()) return momentum(f);
  return momentum(restrict_columns(f, first, last));
}

Field2D energy_gradient(const Field2D& f) {
  const Grid& g = f.grid();
  const double hx = g.hx();
  const double hy = g.hy();
  const double scale = hy / g.ell;
  Field2D grad(g);
  for (std::size_t i = 0; i < g.nx; ++i) {
    const double wx = g.x_weight(i) * hx;
    for (std::size_t j = 0; j < g.ny; ++j) {
      const Complex v = f(i, j);
      Complex lap_x = 0.0;
      if (i > 0) lap_x += v - f(i - 1, j);
      if (i + 1 < g.nx) lap_x += v - f(i + 1, j);
      const Complex lap_y = 2.0 * v - f(i, (j + 1) % g.ny) - f(i, (j + g.ny - 1) % g.ny);
      grad(i, j) = scale * (lap_x / hx + wx * lap_y / (hy * hy) - wx * (1.0 - norm2(v)) * v);
    }
  }
  return grad;
}

Field2D momentum_gradient(const Field2D& f) {
  const Grid& g = f.grid();
  const MomentumTerms terms = momentum_terms(f);  // validates the ends
  const double scale = 0.5 / static_cast<double>(g.ny);
  const Complex I(0.0, 1.0);
  Field2D grad(g);
  for (std::size_t i = 0; i < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      Complex s = 0.0;
      if (i + 1 < g.nx) s += f(i + 1, j);
      if (i > 0) s -= f(i - 1, j);
      grad(i, j) = scale * I * s;
    }
  }
  const Complex lo = std::polar(terms.end_modulus_minus, terms.arg_minus);
  const Complex hi = std::polar(terms.end_modulus_plus, terms.arg_plus);
  const Complex d_lo = I * lo / std::norm(lo) * scale;
  const Complex d_hi = I * hi / std::norm(hi) * scale;
  for (std::size_t j = 0; j < g.ny; ++j) {
    grad(0, j) -= d_lo;
    grad(g.nx - 1, j) += d_hi;
  }
  return grad;
}

double el_residual(const Field2D& f, double c) {
  const Grid& g = f.grid();
  const double hx = g.hx();
  const double hy = g.hy();
  const Complex ic(0.0, c);
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < g.nx; ++i) {
    for (std::size_t j = 0; j < g.ny; ++j) {
      const Complex v = f(i, j);
      const Complex right = f(i + 1, j);
      const Complex left = f(i - 1, j);
      const Complex up = f(i, (j + 1) % g.ny);
      const Complex down = f(i, (j + g.ny - 1) % g.ny);
      const Complex r = ic * (right - left) / (2.0 * hx) + (right - 2.0 * v + left) / (hx * hx) +
                        (up - 2.0 * v + down) / (hy * hy) + v * (1.0 - norm2(v));
      s += norm2(r);
    }
  }
  return std::sqrt(s * hx * hy / g.ell);
}

double kappa(const LoopTrace& loop) {
  const std::size_t n = loop.size();
  if (n == 0) throw std::invalid_argument("kappa: empty loop");
  const double h = loop.h();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Complex v = loop.values[j];
    const double pot = 1.0 - norm2(v);
    s += 0.5 * norm2(loop.values[(j + 1) % n] - v) / (h * h) + 0.25 * pot * pot;
  }
  return s / static_cast<double>(n);
}

double lift_constant(double ell) {
  return std::max(2.0 + ell / (std::numbers::sqrt2 * kPi), 2.0 * std::numbers::sqrt2 * ell / kPi);
}

double kappa_threshold(double ell) {
  const double c = lift_constant(ell);
  return std::min({1.0 / (4.0 * ell * ell), 1.0 / 16.0, 1.0 / (16.0 * c * c)});
}

double circle_distance(double a, double b) { return std::abs(std::remainder(a - b, 2.0 * kPi)); }

LoopLift lift_loop(const LoopTrace& loop) {
  const std::size_t n = loop.size();
  if (n == 0) throw std::invalid_argument("lift_loop: empty loop");
  LoopLift lift;
  lift.modulus.resize(n);
  lift.phase.resize(n);
  Complex sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Complex v = loop.values[j];
    if (std::abs(v) == 0.0) throw std::domain_error("loop vanishes; lifting undefined");
    lift.modulus[j] = std::abs(v);
    sum += v;
  }
  lift.phase[0] = std::arg(loop.values[0]);
  double winding = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double step = std::arg(loop.values[(j + 1) % n] / loop.values[j]);
    if (std::abs(step) >= kPi * (1.0 - 1e-9)) {
      throw std::domain_error("loop vanishes; lifting undefined");
    }
    if (j + 1 < n) lift.phase[j + 1] = lift.phase[j] + step;
    winding += step;
  }
  if (std::abs(winding) > kPi) {
    throw std::domain_error("loop winds around the origin; no periodic lift");
  }
  lift.mean = sum / static_cast<double>(n);
  double phase_sum = 0.0;
  for (double p : lift.phase) phase_sum += p;
  lift.mean_phase = phase_sum / static_cast<double>(n);
  lift.kappa = kappa(loop);
  lift.kappa_admissible = lift.kappa <= kappa_threshold(loop.ell);
  const double c = lift_constant(loop.ell);
  lift.mean_modulus_bound = 1.0 - c * std::sqrt(lift.kappa);
  lift.phase_gap_bound = c * std::sqrt(lift.kappa);
  lift.phase_gap = std::abs(lift.mean) > 0.0 ? circle_distance(std::arg(lift.mean), lift.mean_phase)
                                             : kPi;
  return lift;
}

double loop_deviation(const LoopTrace& loop) {
  const std::size_t n = loop.size();
  Complex mean = 0.0;
  for (Complex v : loop.values) mean += v;
  mean /= static_cast<double>(n);
  double s = 0.0;
  for (Complex v : loop.values) s += norm2(v - mean);
  return s * loop.h();
}

double loop_dirichlet_spectral(const LoopTrace& loop) {
  const std::size_t n = loop.size();
  const double dn = static_cast<double>(n);
  double s = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    Complex coeff = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      coeff += loop.values[j] * std::polar(1.0, -2.0 * kPi * static_cast<double>(m * j % n) / dn);
    }
    coeff /= dn;
    double k = static_cast<double>(m);
    if (2 * m > n) k -= dn;
    const double wave = 2.0 * kPi * k / loop.ell;
    s += wave * wave * norm2(coeff);
  }
  return s * loop.ell;
}

double poincare_wirtinger_ratio(const LoopTrace& loop) {
  const double dirichlet = loop_dirichlet_spectral(loop);
  const double deviation = loop_deviation(loop);
  if (dirichlet <= 0.0) return 0.0;
  const double scale = loop.ell / (2.0 * kPi);
  return deviation / (scale * scale * dirichlet);
}

double arg_chord_ratio(Complex z1, Complex z2) {
  const double chord = std::abs(z1 - z2);
  if (chord == 0.0) throw std::domain_error("arg_chord_ratio: equal points");
  return circle_distance(std::arg(z1), std::arg(z2)) / chord;
}

}  // namespace gpwave
