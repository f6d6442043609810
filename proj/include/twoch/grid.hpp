// SPDX-License-Identifier: Apache-2.0
//
// Periodic 1D grid, sampled fields and the spectral primitives built on
// them: differentiation, Helmholtz inversion, quadrature, interpolation.

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace twoch {

// Thrown when a precondition on an argument is violated.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Uniform periodic grid x_i = i L / n with the symmetric wavenumber layout
// k_j = 2 pi j / L, j = 0, 1, ..., n/2, -(n/2 - 1), ..., -1. The Nyquist
// entry (j = n/2) is stored with a positive sign.
//
// Grid is a cheap handle; copies share the node and wavenumber tables.
class Grid {
 public:
  // Requires n even, n >= 8 and length > 0 (finite).
  Grid(std::size_t n, double length);

  std::size_t size() const noexcept;
  double length() const noexcept;
  double spacing() const noexcept;
  // 2 pi / L.
  double fundamental() const noexcept;
  double node(std::size_t i) const { return nodes()[i]; }
  std::span<const double> nodes() const noexcept;
  std::span<const double> wavenumbers() const noexcept;
  // Largest mode index kept by the 2/3 rule: (n - 1) / 3.
  std::size_t dealias_cutoff() const noexcept;
  // Reduce x modulo L into [0, L).
  double wrap(double x) const;

  friend bool operator==(const Grid& a, const Grid& b) noexcept;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

Grid make_grid(std::size_t n, double length);

// Real samples of a periodic function at the nodes of a grid.
class Field {
 public:
  explicit Field(Grid grid);
  Field(Grid grid, std::vector<double> values);

  template <class F>
  static Field from_function(const Grid& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
    return Field(grid, std::move(v));
  }
  static Field constant(const Grid& grid, double c) {
    return Field(grid, std::vector<double>(grid.size(), c));
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool all_finite() const noexcept;
  double max_abs() const;
  double min() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  // this += a * o
  Field& add_scaled(double a, const Field& o);

 private:
  Grid grid_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator-(Field a);
// Pointwise product.
Field operator*(const Field& a, const Field& b);
Field operator*(double s, Field a);
Field operator+(Field a, double c);
Field operator-(Field a, double c);

// Throws PreconditionError unless a and b live on equal grids.
void require_same_grid(const Field& a, const Field& b, const char* what);

// Half-spectrum (n/2 + 1 complex coefficients, unnormalised forward FFT).
std::vector<std::complex<double>> spectrum(const Field& f);
Field from_spectrum(const Grid& grid, std::span<const std::complex<double>> spec);

// Spectral derivative of order 1, 2 or 3. The Nyquist mode is zeroed for odd
// orders.
Field diff(const Field& f, int order);

// f_x, f_xx, ... up to max_order (<= 3) from a single forward transform.
std::vector<Field> derivatives(const Field& f, int max_order);

// f - f_xx.
Field helmholtz(const Field& f);
// Solves g - g_xx = f mode-wise (division by 1 + k^2).
Field helmholtz_inverse(const Field& f);

// Zero every mode with |j| > grid.dealias_cutoff().
Field dealias(const Field& f);
std::vector<std::complex<double>>& dealias_in_place(const Grid& grid,
                                                    std::vector<std::complex<double>>& spec);

// (L/n) sum_i f_i; exact for trigonometric polynomials of degree < n.
double quadrature(const Field& f);

// Trigonometric interpolant of a field, evaluable at arbitrary points.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(const Field& f);

  double operator()(double x) const;
  void evaluate(std::span<const double> points, std::span<double> out) const;
  std::vector<double> evaluate(std::span<const double> points) const;
  // Interpolant of the spectral derivative (Nyquist zeroed).
  TrigInterpolant derivative() const;

 private:
  TrigInterpolant(double omega, std::vector<std::complex<double>> coeffs)
      : omega_(omega), coeffs_(std::move(coeffs)) {}

  double omega_;
  // Pre-scaled so that f(x) = sum_k Re(coeffs_[k] exp(i k omega x)).
  std::vector<std::complex<double>> coeffs_;
};

// Piecewise cubic Hermite interpolant that preserves monotonicity of the data
// (Fritsch-Carlson slopes). Data extend as y(x + period) = y(x) + shift, so
// the same class covers periodic fields (shift = 0) and circle maps
// (shift = period).
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> knots, std::vector<double> values, double period,
                double shift);
  double operator()(double x) const;

 private:
  std::vector<double> x_;  // n + 1 knots, last = first + period
  std::vector<double> y_;
  std::vector<double> d_;
  double period_;
  double shift_;
};

enum class InterpMethod { Spectral, MonotoneCubic };

// Periodic interpolation at arbitrary (finite) points; points are reduced
// modulo L. Points that coincide with a node return the stored sample.
std::vector<double> interp(const Field& f, std::span<const double> points,
                           InterpMethod method = InterpMethod::Spectral);

}  // namespace twoch
