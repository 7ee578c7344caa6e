#include "gpwave/preconditioner.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gpwave {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct Preconditioner::Impl {
  Grid grid;
  double alpha = 1.0;
  std::vector<double> lambda;  // y-Laplacian eigenvalue per mode
  fftw_complex* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Impl(const Grid& g, double a) : grid(g), alpha(a) {
    if (!(alpha > 0.0)) throw std::invalid_argument("preconditioner: alpha must be positive");
    const double hy = g.hy();
    lambda.resize(g.ny);
    for (std::size_t m = 0; m < g.ny; ++m) {
      const double s = std::sin(std::numbers::pi * static_cast<double>(m) / static_cast<double>(g.ny));
      lambda[m] = 4.0 * s * s / (hy * hy);
    }
    std::lock_guard<std::mutex> lock(planner_mutex());
    buffer = fftw_alloc_complex(g.size());
    if (buffer == nullptr) throw std::bad_alloc();
    const int n[] = {static_cast<int>(g.ny)};
    const int howmany = static_cast<int>(g.nx);
    forward = fftw_plan_many_dft(1, n, howmany, buffer, nullptr, 1, n[0], buffer, nullptr, 1, n[0],
                                 FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_many_dft(1, n, howmany, buffer, nullptr, 1, n[0], buffer, nullptr, 1,
                                  n[0], FFTW_BACKWARD, FFTW_ESTIMATE);
    if (forward == nullptr || backward == nullptr) {
      release();
      throw std::runtime_error("preconditioner: FFTW planning failed");
    }
  }

  void release() {
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (backward != nullptr) fftw_destroy_plan(backward);
    if (buffer != nullptr) fftw_free(buffer);
    forward = backward = nullptr;
    buffer = nullptr;
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    release();
  }
};

Preconditioner::Preconditioner(const Grid& grid, double alpha)
    : impl_(std::make_unique<Impl>(grid, alpha)) {}
Preconditioner::~Preconditioner() = default;
Preconditioner::Preconditioner(Preconditioner&&) noexcept = default;
Preconditioner& Preconditioner::operator=(Preconditioner&&) noexcept = default;

const Grid& Preconditioner::grid() const { return impl_->grid; }

Field2D Preconditioner::apply(const Field2D& v) const {
  const Grid& g = impl_->grid;
  if (!(v.grid() == g)) throw std::invalid_argument("preconditioner: grid mismatch");
  const double hx = g.hx();
  const double hy = g.hy();
  const double scale = hy / g.ell;
  Field2D out(g);
  for (std::size_t i = 0; i < g.nx; ++i) {
    const double wx = g.x_weight(i) * hx;
    for (std::size_t j = 0; j < g.ny; ++j) {
      const Complex u = v(i, j);
      Complex kx = 0.0;
      if (i > 0) kx += u - v(i - 1, j);
      if (i + 1 < g.nx) kx += u - v(i + 1, j);
      const Complex ly = 2.0 * u - v(i, (j + 1) % g.ny) - v(i, (j + g.ny - 1) % g.ny);
      out(i, j) = scale * (kx / hx + wx * (impl_->alpha * u + ly / (hy * hy)));
    }
  }
  return out;
}

Field2D Preconditioner::solve(const Field2D& v) const {
  const Grid& g = impl_->grid;
  if (!(v.grid() == g)) throw std::invalid_argument("preconditioner: grid mismatch");
  const std::size_t nx = g.nx;
  const std::size_t ny = g.ny;
  const double hx = g.hx();
  const double scale = g.hy() / g.ell;
  auto* buf = reinterpret_cast<Complex*>(impl_->buffer);
  const auto src = v.values();
  std::copy(src.begin(), src.end(), buf);
  fftw_execute(impl_->forward);

  std::vector<double> cprime(nx);
  std::vector<Complex> dprime(nx);
  for (std::size_t m = 0; m < ny; ++m) {
    const double shift = impl_->alpha + impl_->lambda[m];
    auto diag = [&](std::size_t i) {
      const double k = (i == 0 || i + 1 == nx) ? 1.0 : 2.0;
      return scale * (k / hx + g.x_weight(i) * hx * shift);
    };
    const double off = -scale / hx;
    // Thomas algorithm; the matrix is symmetric and diagonally dominant.
    double b = diag(0);
    cprime[0] = off / b;
    dprime[0] = buf[m] / b;
    for (std::size_t i = 1; i < nx; ++i) {
      b = diag(i) - off * cprime[i - 1];
      cprime[i] = off / b;
      dprime[i] = (buf[i * ny + m] - off * dprime[i - 1]) / b;
    }
    buf[(nx - 1) * ny + m] = dprime[nx - 1];
    for (std::size_t i = nx - 1; i-- > 0;) {
      buf[i * ny + m] = dprime[i] - cprime[i] * buf[(i + 1) * ny + m];
    }
  }

  fftw_execute(impl_->backward);
  Field2D out(g);
  auto dst = out.values();
  const double inv = 1.0 / static_cast<double>(ny);
  for (std::size_t k = 0; k < g.size(); ++k) dst[k] = buf[k] * inv;
  return out;
}

}  // namespace gpwave
