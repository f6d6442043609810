// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "twoch/kernels.hpp"

namespace twoch::kernels::detail {

#if defined(TWOCH_HAVE_AVX2)
const Table& avx2_table();
#endif

}  // namespace twoch::kernels::detail
