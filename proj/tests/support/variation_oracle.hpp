// SPDX-License-Identifier: Apache-2.0
//
// First variation of the action written in label coordinates, where no map
// inversion is needed. With q = gamma_X and h = H0 / q,
//
//   a = int int 1/2 [gamma_t^2 q + gamma_tX^2 / q - s (h - 1)^2 q] dX dt
//
// and differentiating along gamma + eps phi gives the integrand
//
//   gamma_t phi_t q + 1/2 gamma_t^2 phi_X + gamma_tX phi_tX / q
//     - 1/2 gamma_tX^2 phi_X / q^2 + s/2 (h^2 - 1) phi_X.
//
// Time derivatives use the same centred/one-sided second-order stencil as
// the Eulerian action, so both discretise the same time-discrete action.

#pragma once

#include <vector>

#include "twoch/variational.hpp"

namespace twoch::oracle {

inline Field stencil_dt(const std::vector<Field>& f, double h, std::size_t j) {
  const std::size_t m = f.size() - 1;
  if (j == 0) return (1.0 / (2 * h)) * (-3.0 * f[0] + 4.0 * f[1] - f[2]);
  if (j == m) return (1.0 / (2 * h)) * (3.0 * f[m] - 4.0 * f[m - 1] + f[m - 2]);
  return (1.0 / (2 * h)) * (f[j + 1] - f[j - 1]);
}

inline double label_first_variation(const FlowPath& path, const TestPath& test, Sign variant) {
  const double s = variant == Sign::Plus ? 1.0 : -1.0;
  const double h = path.time_step();
  const std::size_t m = path.slices() - 1;
  double total = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    const Field gt = stencil_dt(path.displacement, h, j);
    const Field pt = stencil_dt(test.values, h, j);
    const Field q = diff(path.displacement[j], 1) + 1.0;
    const Field gtx = diff(gt, 1);
    const Field px = diff(test.values[j], 1);
    const Field ptx = diff(pt, 1);
    double slice = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double hh = path.H0[i] / q[i];
      slice += gt[i] * pt[i] * q[i] + 0.5 * gt[i] * gt[i] * px[i] + gtx[i] * ptx[i] / q[i] -
               0.5 * gtx[i] * gtx[i] * px[i] / (q[i] * q[i]) + 0.5 * s * (hh * hh - 1.0) * px[i];
    }
    const double w = (j == 0 || j == m) ? 0.5 : 1.0;
    total += w * h * path.labels().spacing() * slice;
  }
  return total;
}

}  // namespace twoch::oracle
