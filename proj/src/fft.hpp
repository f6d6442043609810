// SPDX-License-Identifier: Apache-2.0
//
// Real-to-complex FFT of length n (half spectrum, n/2 + 1 coefficients).
// Plans use FFTW_ESTIMATE so that repeated runs pick the same algorithm and
// results are bitwise reproducible.

#pragma once

#include <complex>
#include <span>

namespace twoch::detail {

// Unnormalised forward transform: out[k] = sum_j in[j] exp(-2 pi i j k / n).
void fft_forward(std::span<const double> in, std::span<std::complex<double>> out);

// Normalised inverse (includes the 1/n factor). Imaginary parts of out-of-range
// coefficients (k = 0 and k = n/2) are ignored.
void fft_inverse(std::span<const std::complex<double>> in, std::span<double> out);

}  // namespace twoch::detail
