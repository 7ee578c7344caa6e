#include "gpwave/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gpwave {

namespace {

constexpr double kPi = std::numbers::pi;

// Rows of the closed strip with their trapezoid weights (sum = m).
struct StripRows {
  std::vector<std::size_t> rows;
  std::vector<double> weights;
};

StripRows strip_rows(const Grid& g, StripIndex strip) {
  const std::size_t m = strip.rows(g.ny);
  const std::size_t base = strip.first_row(g.ny);
  StripRows out;
  for (std::size_t t = 0; t <= m; ++t) {
    out.rows.push_back((base + t) % g.ny);
    out.weights.push_back((t == 0 || t == m) ? 0.5 : 1.0);
  }
  return out;
}

double row_link_sum(const Field2D& f, std::size_t j) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < f.nx(); ++i) s -= (f(i + 1, j) * std::conj(f(i, j))).imag();
  return 0.5 * s;
}

}  // namespace

std::size_t StripIndex::rows(std::size_t ny) const {
  if (level == 0 || level >= 8 * sizeof(std::size_t)) {
    throw std::invalid_argument("strip: level must be at least 1");
  }
  const std::size_t count = std::size_t{1} << level;
  if (ny % count != 0 || ny / count == 0) {
    throw std::invalid_argument("strip: 2^level must divide ny");
  }
  if (index >= count) throw std::invalid_argument("strip: index out of range");
  return ny / count;
}

double StripIndex::height(double ell) const {
  return ell / static_cast<double>(std::size_t{1} << level);
}

Field2D symmetrize(const Field2D& f, StripIndex strip) {
  const Grid& g = f.grid();
  const std::size_t m = strip.rows(g.ny);
  const std::size_t base = strip.first_row(g.ny);
  const std::size_t period = 2 * m;
  Field2D out(g);
  for (std::size_t r = 0; r < g.ny; ++r) {
    const std::size_t t = (r + g.ny - base) % period;
    const std::size_t src = (base + (t <= m ? t : period - t)) % g.ny;
    for (std::size_t i = 0; i < g.nx; ++i) out(i, r) = f(i, src);
  }
  return out;
}

double strip_energy(const Field2D& f, StripIndex strip) {
  const Grid& g = f.grid();
  const StripRows sr = strip_rows(g, strip);
  const std::size_t m = sr.rows.size() - 1;
  const double hx = g.hx();
  const double hy = g.hy();
  double rows_part = 0.0;
  for (std::size_t t = 0; t <= m; ++t) {
    const std::size_t j = sr.rows[t];
    double links = 0.0;
    double pots = 0.0;
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double pot = 1.0 - std::norm(f(i, j));
      pots += g.x_weight(i) * 0.25 * pot * pot;
      if (i + 1 < g.nx) links += 0.5 * std::norm(f(i + 1, j) - f(i, j));
    }
    rows_part += sr.weights[t] * (links / hx + hx * pots);
  }
  double y_links = 0.0;
  for (std::size_t t = 0; t < m; ++t) {
    const std::size_t j0 = sr.rows[t];
    const std::size_t j1 = sr.rows[t + 1];
    for (std::size_t i = 0; i < g.nx; ++i) {
      y_links += g.x_weight(i) * hx * 0.5 * std::norm(f(i, j1) - f(i, j0)) / (hy * hy);
    }
  }
  return hy * (rows_part + y_links) / strip.height(g.ell);
}

MomentumClass strip_momentum(const Field2D& f, StripIndex strip) {
  const Grid& g = f.grid();
  const StripRows sr = strip_rows(g, strip);
  const double m = static_cast<double>(sr.rows.size() - 1);
  double bulk = 0.0;
  Complex lo = 0.0;
  Complex hi = 0.0;
  for (std::size_t t = 0; t < sr.rows.size(); ++t) {
    const std::size_t j = sr.rows[t];
    bulk += sr.weights[t] * row_link_sum(f, j);
    lo += sr.weights[t] * f(0, j);
    hi += sr.weights[t] * f(g.nx - 1, j);
  }
  bulk /= m;
  lo /= m;
  hi /= m;
  if (std::abs(lo) < 1e-12 || std::abs(hi) < 1e-12) {
    throw std::domain_error("endpoint vacuum: enlarge L");
  }
  return {bulk + 0.5 * (std::arg(hi) - std::arg(lo))};
}

std::vector<double> transverse_momentum_density(const Field2D& f) {
  const Decomposition d = decompose(f);
  std::vector<double> q(f.ny());
  for (std::size_t j = 0; j < f.ny(); ++j) q[j] = row_link_sum(d.remainder, j);
  return q;
}

MomentumClass slice_momentum(const Field2D& f, double a, double b) {
  const Grid& g = f.grid();
  if (!(b > a)) throw std::invalid_argument("slice_momentum: empty interval");
  const Decomposition d = decompose(f);
  const MomentumClass mean_part = profile_momentum(d.mean_profile);
  const auto q = transverse_momentum_density(f);
  const double hy = g.hy();
  const auto first = static_cast<long long>(std::llround(a / hy));
  auto last = static_cast<long long>(std::llround(b / hy));
  if (last <= first) last = first + 1;
  const auto n = static_cast<long long>(g.ny);
  double s = 0.0;
  for (long long r = first; r <= last; ++r) {
    const double w = (r == first || r == last) ? 0.5 : 1.0;
    s += w * q[static_cast<std::size_t>(((r % n) + n) % n)];
  }
  s /= static_cast<double>(last - first);
  return {mean_part.representative + s};
}

MomentumClass row_momentum(const Field2D& f, std::size_t j) {
  if (j >= f.ny()) throw std::out_of_range("row_momentum: row index");
  std::vector<Complex> row(f.nx());
  for (std::size_t i = 0; i < f.nx(); ++i) row[i] = f(i, j);
  return profile_momentum(row);
}

double windowed_mean(std::span<const double> q, double ell, double start, double length) {
  const std::size_t n = q.size();
  const double h = ell / static_cast<double>(n);
  std::vector<double> cumulative(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    cumulative[j + 1] = cumulative[j] + 0.5 * h * (q[j] + q[(j + 1) % n]);
  }
  const double total = cumulative[n];
  // Exact integral of the piecewise-linear interpolant from 0 to t.
  auto integral = [&](double t) {
    const double periods = std::floor(t / ell);
    double r = t - periods * ell;
    auto j = static_cast<std::size_t>(r / h);
    if (j >= n) j = n - 1;
    const double s = (r - static_cast<double>(j) * h) / h;
    const double a = q[j];
    const double b = q[(j + 1) % n];
    return periods * total + cumulative[j] + h * (a * s + 0.5 * (b - a) * s * s);
  };
  return (integral(start + length) - integral(start)) / length;
}

std::optional<Interval> find_oscillation_interval(std::span<const double> q, double ell, int N,
                                                  double delta) {
  if (N < 1) throw std::invalid_argument("find_oscillation_interval: N must be >= 1");
  if (q.empty()) throw std::invalid_argument("find_oscillation_interval: empty density");
  double sup = 0.0;
  double mean = 0.0;
  for (double v : q) {
    sup = std::max(sup, std::abs(v));
    mean += v;
  }
  mean /= static_cast<double>(q.size());
  if (std::abs(mean) > 1e-10 * std::max(1.0, sup)) {
    throw std::invalid_argument("find_oscillation_interval: density must have zero mean");
  }
  const double length = ell / static_cast<double>(N);
  const double h = ell / static_cast<double>(q.size());

  // Breakpoints of the windowed mean: grid starts and starts whose window
  // ends on the grid. Each piece is quadratic; subdivide to catch double
  // crossings inside a piece.
  std::vector<double> starts;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double t = static_cast<double>(j) * h;
    starts.push_back(t);
    double u = std::fmod(t - length, ell);
    if (u < 0.0) u += ell;
    starts.push_back(u);
  }
  std::sort(starts.begin(), starts.end());
  starts.push_back(ell);
  std::vector<double> probes;
  constexpr int kSub = 4;
  for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
    for (int s = 0; s < kSub; ++s) {
      probes.push_back(starts[k] + (starts[k + 1] - starts[k]) * s / kSub);
    }
  }
  probes.push_back(ell);

  // Gaps within roundoff of zero count as hits; for N = 1 the windowed mean
  // is identically zero and only this test can find it.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, sup);
  auto gap = [&](double t) {
    const double v = windowed_mean(q, ell, t, length) - delta;
    return std::abs(v) <= noise ? 0.0 : v;
  };
  double t0 = probes.front();
  double g0 = gap(t0);
  if (g0 == 0.0) return Interval{t0, length, delta};
  for (std::size_t k = 1; k < probes.size(); ++k) {
    const double t1 = probes[k];
    const double g1 = gap(t1);
    if (g1 == 0.0) return Interval{t1, length, delta};
    if ((g0 < 0.0) != (g1 < 0.0)) {
      double lo = t0;
      double hi = t1;
      double glo = g0;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * ell; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = gap(mid);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double t = 0.5 * (lo + hi);
      return Interval{t, length, windowed_mean(q, ell, t, length)};
    }
    t0 = t1;
    g0 = g1;
  }
  return std::nullopt;
}

Field2D glue(const GlueSpec& spec, std::size_t nx) {
  if (!(spec.R >= 2.0)) throw std::domain_error("glue: R must be at least 2");
  const std::size_t ny = spec.loop_minus.size();
  if (ny == 0 || spec.loop_plus.size() != ny) throw std::invalid_argument("glue: loop sizes differ");
  if (std::abs(spec.loop_minus.ell - spec.loop_plus.ell) > 1e-14) {
    throw std::invalid_argument("glue: loops live on different tori");
  }
  if (nx < 3) throw std::invalid_argument("glue: need at least 3 columns");
  const LoopLift minus = lift_loop(spec.loop_minus);
  const LoopLift plus = lift_loop(spec.loop_plus);
  const double R = spec.R;
  const Grid grid{R, nx, spec.loop_minus.ell, ny};
  const double jump = plus.mean_phase - minus.mean_phase;
  const double k = std::floor(jump / (2.0 * kPi));
  const double slope = (jump - 2.0 * k * kPi) / (2.0 * (R - 1.0));
  const double offset = 0.5 * (plus.mean_phase + minus.mean_phase + 2.0 * k * kPi);

  Field2D out(grid);
  for (std::size_t i = 0; i < nx; ++i) {
    const double x = grid.x(i);
    const double ax = std::abs(x);
    const LoopLift& side = x >= 0.0 ? plus : minus;
    for (std::size_t j = 0; j < ny; ++j) {
      double rho = 1.0;
      double phi;
      if (ax <= R - 1.0) {
        phi = slope * x + offset;
      } else {
        const double t = std::max(0.0, R - ax);
        rho = 1.0 + (R - 1.0 - ax) * (1.0 - side.modulus[j]);
        phi = side.phase[j] + t * (side.mean_phase - side.phase[j]);
      }
      out(i, j) = std::polar(rho, phi);
    }
  }
  for (std::size_t j = 0; j < ny; ++j) {
    out(0, j) = spec.loop_minus.values[j];
    out(nx - 1, j) = spec.loop_plus.values[j];
  }
  return out;
}

GlueMomentumReport glue_momentum_bound_check(const GlueSpec& spec, std::size_t nx) {
  const Field2D psi = glue(spec, nx);
  GlueMomentumReport r;
  r.momentum = momentum(psi);
  r.energy = energy(psi);
  r.kappa_minus = kappa(spec.loop_minus);
  r.kappa_plus = kappa(spec.loop_plus);
  const double root = std::sqrt(r.kappa_minus + r.kappa_plus);
  const double size = r.momentum.magnitude();
  if (root > 0.0) {
    r.ratio = size / root;
  } else {
    r.ratio = size > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return r;
}

SliceSelection energy_slice_select(const Field2D& f, double Rlo, double Rhi) {
  const Grid& g = f.grid();
  if (!(Rlo > 0.0 && Rlo < Rhi && Rhi <= g.L * (1.0 + 1e-12))) {
    throw std::domain_error("energy_slice_select: need 0 < Rlo < Rhi <= L");
  }
  const auto e = energy_density(f);
  auto column = [&](std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.ny; ++j) s += e[i * g.ny + j];
    return s / static_cast<double>(g.ny);
  };
  const double slack = 1e-9 * g.hx();
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    if (x >= Rlo - slack && x <= Rhi + slack) cols.push_back(i);
  }
  if (cols.size() < 2) throw std::domain_error("energy_slice_select: bracket narrower than a cell");

  SliceSelection best;
  best.slice_energy = std::numeric_limits<double>::infinity();
  double shell = 0.0;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::size_t i = cols[k];
    const std::size_t mirror = g.nx - 1 - i;
    const double slice = column(i) + column(mirror);
    const double w = (k == 0 || k + 1 == cols.size()) ? 0.5 : 1.0;
    shell += w * g.hx() * slice;
    if (slice < best.slice_energy) {
      best.slice_energy = slice;
      best.R = g.x(i);
      best.column_plus = i;
      best.column_minus = mirror;
    }
  }
  const double width = g.x(cols.back()) - g.x(cols.front());
  best.shell_energy = shell;
  best.shell_bound = shell / width;
  return best;
}

}  // namespace gpwave
