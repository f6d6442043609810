// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels/detail.hpp"

namespace twoch::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(TWOCH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const Table* initial_table() {
  const char* env = std::getenv("TWOCH_KERNELS");
  if (env != nullptr) {
    const std::string want(env);
    if (want == "scalar") return &scalar_table();
    if (want == "avx2") return &table(Backend::Avx2);
    if (want != "auto") {
      throw std::runtime_error("TWOCH_KERNELS must be scalar, avx2 or auto, got '" + want + "'");
    }
  }
  return supported(Backend::Avx2) ? &table(Backend::Avx2) : &scalar_table();
}

std::atomic<const Table*>& current() {
  static std::atomic<const Table*> t{initial_table()};
  return t;
}

}  // namespace

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool supported(Backend b) {
  switch (b) {
    case Backend::Scalar: return true;
    case Backend::Avx2: {
      static const bool ok = cpu_has_avx2();
      return ok;
    }
  }
  return false;
}

const Table& table(Backend b) {
  if (!supported(b)) {
    throw std::runtime_error("kernel backend '" + std::string(to_string(b)) +
                             "' is not available on this build/CPU");
  }
#if defined(TWOCH_HAVE_AVX2)
  if (b == Backend::Avx2) return detail::avx2_table();
#endif
  return scalar_table();
}

const Table& active() { return *current().load(std::memory_order_acquire); }

void select(Backend b) { current().store(&table(b), std::memory_order_release); }

void axpy(double a, std::span<const double> x, std::span<const double> y, std::span<double> out) {
  assert(x.size() == y.size() && y.size() == out.size());
  active().axpy(a, x.data(), y.data(), out.data(), out.size());
}

void mul(std::span<const double> x, std::span<const double> y, std::span<double> out) {
  assert(x.size() == y.size() && y.size() == out.size());
  active().mul(x.data(), y.data(), out.data(), out.size());
}

void rk4_combine(std::span<const double> y, std::span<const double> k1,
                 std::span<const double> k2, std::span<const double> k3,
                 std::span<const double> k4, double h, std::span<double> out) {
  assert(y.size() == out.size() && k1.size() == out.size() && k2.size() == out.size() &&
         k3.size() == out.size() && k4.size() == out.size());
  active().rk4_combine(y.data(), k1.data(), k2.data(), k3.data(), k4.data(), h, out.data(),
                       out.size());
}

void rk4_accumulate(std::span<double> y, std::span<double> carry, std::span<const double> k1,
                    std::span<const double> k2, std::span<const double> k3,
                    std::span<const double> k4, double h) {
  assert(carry.size() == y.size() && k1.size() == y.size() && k2.size() == y.size() &&
         k3.size() == y.size() && k4.size() == y.size());
  active().rk4_accumulate(y.data(), carry.data(), k1.data(), k2.data(), k3.data(), k4.data(), h,
                          y.size());
}

double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  return active().dot(x.data(), y.data(), x.size());
}

double max_abs(std::span<const double> x) { return active().max_abs(x.data(), x.size()); }

void trig_eval(std::span<const std::complex<double>> coeffs, double omega,
               std::span<const double> points, std::span<double> out) {
  assert(points.size() == out.size());
  active().trig_eval(coeffs.data(), coeffs.size(), omega, points.data(), out.data(), out.size());
}

}  // namespace twoch::kernels
