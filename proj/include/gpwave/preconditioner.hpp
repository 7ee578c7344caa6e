#pragma once

// Sobolev-type preconditioner for the descent on a fixed grid:
//   M = (hy / ell) [ K_x / hx + W hx (alpha - Laplacian_y) ]
// with K_x the Neumann stiffness matrix in x, W the trapezoid weights and
// the periodic 3-point Laplacian in y. M is diagonalized in y by an FFT and
// solved by one tridiagonal sweep per Fourier mode.

#include <memory>

#include "gpwave/field.hpp"

namespace gpwave {

class Preconditioner {
 public:
  explicit Preconditioner(const Grid& grid, double alpha = 1.0);
  ~Preconditioner();
  Preconditioner(const Preconditioner&) = delete;
  Preconditioner& operator=(const Preconditioner&) = delete;
  Preconditioner(Preconditioner&&) noexcept;
  Preconditioner& operator=(Preconditioner&&) noexcept;

  const Grid& grid() const;

  /// M v, by direct stencil application.
  Field2D apply(const Field2D& v) const;
  /// M^{-1} v. Uses an internal FFT buffer: one instance per thread.
  Field2D solve(const Field2D& v) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gpwave
