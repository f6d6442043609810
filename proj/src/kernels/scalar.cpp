// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "kernels/detail.hpp"

namespace twoch::kernels {
namespace {

void axpy_scalar(double a, const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + a * x[i];
}

void mul_scalar(const double* x, const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] * y[i];
}

void rk4_combine_scalar(const double* y, const double* k1, const double* k2, const double* k3,
                        const double* k4, double h, double* out, std::size_t n) {
  const double w = h / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = y[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

void rk4_accumulate_scalar(double* y, double* carry, const double* k1, const double* k2,
                           const double* k3, const double* k4, double h, std::size_t n) {
  const double w = h / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double inc = w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) + carry[i];
    const double next = y[i] + inc;
    carry[i] = inc - (next - y[i]);
    y[i] = next;
  }
}

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

double max_abs_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(x[i]);
    // NaN propagates so callers can detect non-finite data.
    if (std::isnan(a)) return a;
    if (a > m) m = a;
  }
  return m;
}

void trig_eval_scalar(const std::complex<double>* coeffs, std::size_t ncoeff, double omega,
                      const double* points, double* out, std::size_t npoints) {
  for (std::size_t p = 0; p < npoints; ++p) {
    const double theta = omega * points[p];
    const double zr = std::cos(theta);
    const double zi = std::sin(theta);
    double wr = 1.0;
    double wi = 0.0;
    double acc = 0.0;
    for (std::size_t k = 0; k < ncoeff; ++k) {
      acc += coeffs[k].real() * wr - coeffs[k].imag() * wi;
      const double nr = wr * zr - wi * zi;
      const double ni = wr * zi + wi * zr;
      wr = nr;
      wi = ni;
    }
    out[p] = acc;
  }
}

}  // namespace

const Table& scalar_table() {
  static const Table t{Backend::Scalar, axpy_scalar,   mul_scalar,      rk4_combine_scalar,
                       rk4_accumulate_scalar,
                       sum_scalar,      dot_scalar,    max_abs_scalar,  trig_eval_scalar};
  return t;
}

}  // namespace twoch::kernels
