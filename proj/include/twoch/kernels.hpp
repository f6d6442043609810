// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops used by the spectral fields, the RK4 driver and
// the flow-map reconstruction. Every kernel has a scalar reference version;
// wider variants are compiled separately and chosen once at startup.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace twoch::kernels {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend b);

// Function table for one backend. All pointers are non-null.
struct Table {
  Backend backend;

  // out[i] = y[i] + a * x[i]
  void (*axpy)(double a, const double* x, const double* y, double* out, std::size_t n);
  // out[i] = x[i] * y[i]
  void (*mul)(const double* x, const double* y, double* out, std::size_t n);
  // out[i] = y[i] + h/6 * (k1 + 2 k2 + 2 k3 + k4)
  void (*rk4_combine)(const double* y, const double* k1, const double* k2, const double* k3,
                      const double* k4, double h, double* out, std::size_t n);
  // y[i] += h/6 * (k1 + 2 k2 + 2 k3 + k4) with compensated (Kahan) summation;
  // carry[i] holds the low-order part lost by the previous updates.
  void (*rk4_accumulate)(double* y, double* carry, const double* k1, const double* k2,
                         const double* k3, const double* k4, double h, std::size_t n);
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*max_abs)(const double* x, std::size_t n);
  // out[p] = sum_k Re(coeffs[k] * exp(i k omega points[p])), k = 0..ncoeff-1
  void (*trig_eval)(const std::complex<double>* coeffs, std::size_t ncoeff, double omega,
                    const double* points, double* out, std::size_t npoints);
};

const Table& scalar_table();

// True when the backend was compiled in and the CPU reports the instructions.
bool supported(Backend b);

// Table for an explicit backend; throws std::runtime_error if unsupported.
const Table& table(Backend b);

// Backend in use. Defaults to the widest supported one; the environment
// variable TWOCH_KERNELS=scalar|avx2 overrides the default.
const Table& active();

// Switch the active backend for the whole process (tests and benchmarks).
void select(Backend b);

// Span-level wrappers over active().
void axpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> out);
void mul(std::span<const double> x, std::span<const double> y, std::span<double> out);
void rk4_combine(std::span<const double> y, std::span<const double> k1,
                 std::span<const double> k2, std::span<const double> k3,
                 std::span<const double> k4, double h, std::span<double> out);
void rk4_accumulate(std::span<double> y, std::span<double> carry, std::span<const double> k1,
                    std::span<const double> k2, std::span<const double> k3,
                    std::span<const double> k4, double h);
double sum(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double max_abs(std::span<const double> x);
void trig_eval(std::span<const std::complex<double>> coeffs, double omega,
               std::span<const double> points, std::span<double> out);

}  // namespace twoch::kernels
