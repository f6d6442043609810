// SPDX-License-Identifier: Apache-2.0
//
// AVX2 + FMA variants. This translation unit is built with -mavx2 -mfma and
// must only be entered after a runtime CPU check (see dispatch.cpp).

#include <immintrin.h>

#include <cmath>

#include "kernels/detail.hpp"

namespace twoch::kernels {
namespace {

constexpr std::size_t kLanes = 4;

void axpy_avx2(double a, const double* x, const double* y, double* out, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, vx, vy));
  }
  for (; i < n; ++i) out[i] = y[i] + a * x[i];
}

void mul_avx2(const double* x, const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = x[i] * y[i];
}

void rk4_combine_avx2(const double* y, const double* k1, const double* k2, const double* k3,
                      const double* k4, double h, double* out, std::size_t n) {
  const double w = h / 6.0;
  const __m256d vw = _mm256_set1_pd(w);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_loadu_pd(k4 + i));
    s = _mm256_fmadd_pd(two, _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i)), s);
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(vw, s, _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) out[i] = y[i] + w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void rk4_accumulate_avx2(double* y, double* carry, const double* k1, const double* k2,
                         const double* k3, const double* k4, double h, std::size_t n) {
  const double w = h / 6.0;
  const __m256d vw = _mm256_set1_pd(w);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d s = _mm256_add_pd(_mm256_loadu_pd(k1 + i), _mm256_loadu_pd(k4 + i));
    s = _mm256_fmadd_pd(two, _mm256_add_pd(_mm256_loadu_pd(k2 + i), _mm256_loadu_pd(k3 + i)), s);
    const __m256d inc = _mm256_fmadd_pd(vw, s, _mm256_loadu_pd(carry + i));
    const __m256d yv = _mm256_loadu_pd(y + i);
    const __m256d next = _mm256_add_pd(yv, inc);
    _mm256_storeu_pd(carry + i, _mm256_sub_pd(inc, _mm256_sub_pd(next, yv)));
    _mm256_storeu_pd(y + i, next);
  }
  for (; i < n; ++i) {
    const double inc = w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) + carry[i];
    const double next = y[i] + inc;
    carry[i] = inc - (next - y[i]);
    y[i] = next;
  }
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + kLanes));
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
    a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + kLanes), _mm256_loadu_pd(y + i + kLanes), a1);
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double max_abs_avx2(const double* x, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d m = _mm256_setzero_pd();
  __m256d nan_seen = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d a = _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i));
    nan_seen = _mm256_or_pd(nan_seen, _mm256_cmp_pd(a, a, _CMP_UNORD_Q));
    m = _mm256_max_pd(m, a);
  }
  if (_mm256_movemask_pd(nan_seen) != 0) return std::nan("");
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, m);
  double r = lanes[0];
  for (std::size_t l = 1; l < kLanes; ++l) r = lanes[l] > r ? lanes[l] : r;
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (std::isnan(a)) return a;
    if (a > r) r = a;
  }
  return r;
}

void trig_eval_avx2(const std::complex<double>* coeffs, std::size_t ncoeff, double omega,
                    const double* points, double* out, std::size_t npoints) {
  std::size_t p = 0;
  alignas(32) double zr_l[kLanes];
  alignas(32) double zi_l[kLanes];
  for (; p + kLanes <= npoints; p += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      const double theta = omega * points[p + l];
      zr_l[l] = std::cos(theta);
      zi_l[l] = std::sin(theta);
    }
    const __m256d zr = _mm256_load_pd(zr_l);
    const __m256d zi = _mm256_load_pd(zi_l);
    __m256d wr = _mm256_set1_pd(1.0);
    __m256d wi = _mm256_setzero_pd();
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < ncoeff; ++k) {
      const __m256d cr = _mm256_set1_pd(coeffs[k].real());
      const __m256d ci = _mm256_set1_pd(coeffs[k].imag());
      acc = _mm256_fmadd_pd(cr, wr, acc);
      acc = _mm256_fnmadd_pd(ci, wi, acc);
      const __m256d nr = _mm256_fmsub_pd(wr, zr, _mm256_mul_pd(wi, zi));
      const __m256d ni = _mm256_fmadd_pd(wr, zi, _mm256_mul_pd(wi, zr));
      wr = nr;
      wi = ni;
    }
    _mm256_storeu_pd(out + p, acc);
  }
  if (p < npoints) {
    scalar_table().trig_eval(coeffs, ncoeff, omega, points + p, out + p, npoints - p);
  }
}

}  // namespace

namespace detail {

const Table& avx2_table() {
  static const Table t{Backend::Avx2, axpy_avx2, mul_avx2,     rk4_combine_avx2,
                       rk4_accumulate_avx2,
                       sum_avx2,      dot_avx2,  max_abs_avx2, trig_eval_avx2};
  return t;
}

}  // namespace detail
}  // namespace twoch::kernels
