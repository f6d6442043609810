// SPDX-License-Identifier: Apache-2.0

#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cassert>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace twoch::detail {
namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t count) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * count));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// The FFTW planner is not thread safe; execution of an existing plan on
// different arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const Plans& plans_for(std::size_t n) {
  static std::map<std::size_t, Plans> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  auto real = fftw_buffer<double>(n);
  auto spec = fftw_buffer<fftw_complex>(n / 2 + 1);
  Plans p;
  const int ni = static_cast<int>(n);
  p.forward = fftw_plan_dft_r2c_1d(ni, real.get(), spec.get(), FFTW_ESTIMATE);
  p.inverse = fftw_plan_dft_c2r_1d(ni, spec.get(), real.get(), FFTW_ESTIMATE);
  return cache.emplace(n, p).first->second;
}

struct Scratch {
  FftwBuffer<double> real;
  FftwBuffer<fftw_complex> spec;
};

Scratch& scratch_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, Scratch> buffers;
  auto it = buffers.find(n);
  if (it == buffers.end()) {
    it = buffers.emplace(n, Scratch{fftw_buffer<double>(n), fftw_buffer<fftw_complex>(n / 2 + 1)})
             .first;
  }
  return it->second;
}

}  // namespace

void fft_forward(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t n = in.size();
  assert(out.size() == n / 2 + 1);
  const Plans& p = plans_for(n);
  Scratch& s = scratch_for(n);
  std::copy(in.begin(), in.end(), s.real.get());
  fftw_execute_dft_r2c(p.forward, s.real.get(), s.spec.get());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {s.spec[k][0], s.spec[k][1]};
}

void fft_inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  const std::size_t n = out.size();
  assert(in.size() == n / 2 + 1);
  const Plans& p = plans_for(n);
  Scratch& s = scratch_for(n);
  for (std::size_t k = 0; k < in.size(); ++k) {
    s.spec[k][0] = in[k].real();
    s.spec[k][1] = in[k].imag();
  }
  s.spec[0][1] = 0.0;
  s.spec[n / 2][1] = 0.0;
  fftw_execute_dft_c2r(p.inverse, s.spec.get(), s.real.get());
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = s.real[j] * scale;
}

}  // namespace twoch::detail
