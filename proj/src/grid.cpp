// SPDX-License-Identifier: Apache-2.0

#include "twoch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "twoch/kernels.hpp"

namespace twoch {

using cplx = std::complex<double>;

struct Grid::Impl {
  std::size_t n;
  double length;
  std::vector<double> nodes;
  std::vector<double> wavenumbers;
};

Grid::Grid(std::size_t n, double length) {
  if (n % 2 != 0) {
    throw PreconditionError("grid: n must be even, got " + std::to_string(n));
  }
  if (n < 8) throw PreconditionError("grid: n must be >= 8, got " + std::to_string(n));
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw PreconditionError("grid: length must be positive and finite");
  }
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->length = length;
  impl->nodes.resize(n);
  impl->wavenumbers.resize(n);
  const double omega = 2.0 * std::numbers::pi / length;
  for (std::size_t i = 0; i < n; ++i) {
    impl->nodes[i] = static_cast<double>(i) * length / static_cast<double>(n);
    const auto j = static_cast<long long>(i);
    const long long signed_j = i <= n / 2 ? j : j - static_cast<long long>(n);
    impl->wavenumbers[i] = omega * static_cast<double>(signed_j);
  }
  impl_ = std::move(impl);
}

std::size_t Grid::size() const noexcept { return impl_->n; }
double Grid::length() const noexcept { return impl_->length; }
double Grid::spacing() const noexcept { return impl_->length / static_cast<double>(impl_->n); }
double Grid::fundamental() const noexcept { return 2.0 * std::numbers::pi / impl_->length; }
std::span<const double> Grid::nodes() const noexcept { return impl_->nodes; }
std::span<const double> Grid::wavenumbers() const noexcept { return impl_->wavenumbers; }
std::size_t Grid::dealias_cutoff() const noexcept { return (impl_->n - 1) / 3; }

double Grid::wrap(double x) const {
  const double L = impl_->length;
  double r = std::fmod(x, L);
  if (r < 0.0) r += L;
  if (r >= L) r -= L;
  return r;
}

bool operator==(const Grid& a, const Grid& b) noexcept {
  return a.impl_ == b.impl_ || (a.size() == b.size() && a.length() == b.length());
}

Grid make_grid(std::size_t n, double length) { return Grid(n, length); }

// ---------------------------------------------------------------------------
// Field

Field::Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

Field::Field(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw PreconditionError("field: " + std::to_string(values_.size()) +
                            " values for a grid of " + std::to_string(grid_.size()) + " nodes");
  }
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const { return kernels::max_abs(values_); }

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

void require_same_grid(const Field& a, const Field& b, const char* what) {
  if (!(a.grid() == b.grid())) {
    throw PreconditionError(std::string(what) + ": fields live on different grids");
  }
}

Field& Field::operator+=(const Field& o) { return add_scaled(1.0, o); }
Field& Field::operator-=(const Field& o) { return add_scaled(-1.0, o); }

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::add_scaled(double a, const Field& o) {
  require_same_grid(*this, o, "field arithmetic");
  kernels::axpy(a, o.values_, values_, values_);
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator-(Field a) { return a *= -1.0; }
Field operator*(double s, Field a) { return a *= s; }

Field operator*(const Field& a, const Field& b) {
  require_same_grid(a, b, "field product");
  Field out(a.grid());
  kernels::mul(a.values(), b.values(), out.values());
  return out;
}

Field operator+(Field a, double c) {
  for (double& v : a.values()) v += c;
  return a;
}

Field operator-(Field a, double c) { return std::move(a) + (-c); }

// ---------------------------------------------------------------------------
// Spectral operations

std::vector<cplx> spectrum(const Field& f) {
  std::vector<cplx> spec(f.size() / 2 + 1);
  detail::fft_forward(f.values(), spec);
  return spec;
}

Field from_spectrum(const Grid& grid, std::span<const cplx> spec) {
  Field out(grid);
  detail::fft_inverse(spec, out.values());
  return out;
}

namespace {

// (i k)^order applied to the half spectrum.
void apply_derivative(const Grid& grid, std::span<cplx> spec, int order) {
  const std::size_t n = grid.size();
  const double omega = grid.fundamental();
  const cplx ik_unit(0.0, 1.0);
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double k = omega * static_cast<double>(j);
    cplx factor = 1.0;
    for (int p = 0; p < order; ++p) factor *= ik_unit * k;
    spec[j] *= factor;
  }
  if (order % 2 == 1) spec[n / 2] = 0.0;
}

void require_order(int order, int max_order) {
  if (order < 1 || order > max_order) {
    throw PreconditionError("diff: derivative order must be in {1, 2, 3}, got " +
                            std::to_string(order));
  }
}

}  // namespace

Field diff(const Field& f, int order) {
  require_order(order, 3);
  auto spec = spectrum(f);
  apply_derivative(f.grid(), spec, order);
  return from_spectrum(f.grid(), spec);
}

std::vector<Field> derivatives(const Field& f, int max_order) {
  require_order(max_order, 3);
  const auto base = spectrum(f);
  std::vector<Field> out;
  out.reserve(static_cast<std::size_t>(max_order));
  std::vector<cplx> work(base.size());
  for (int order = 1; order <= max_order; ++order) {
    std::copy(base.begin(), base.end(), work.begin());
    apply_derivative(f.grid(), work, order);
    out.push_back(from_spectrum(f.grid(), work));
  }
  return out;
}

Field helmholtz(const Field& f) {
  auto spec = spectrum(f);
  const double omega = f.grid().fundamental();
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double k = omega * static_cast<double>(j);
    spec[j] *= 1.0 + k * k;
  }
  return from_spectrum(f.grid(), spec);
}

Field helmholtz_inverse(const Field& f) {
  auto spec = spectrum(f);
  const double omega = f.grid().fundamental();
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const double k = omega * static_cast<double>(j);
    spec[j] /= 1.0 + k * k;
  }
  return from_spectrum(f.grid(), spec);
}

std::vector<cplx>& dealias_in_place(const Grid& grid, std::vector<cplx>& spec) {
  const std::size_t cutoff = grid.dealias_cutoff();
  for (std::size_t j = cutoff + 1; j < spec.size(); ++j) spec[j] = 0.0;
  return spec;
}

Field dealias(const Field& f) {
  auto spec = spectrum(f);
  dealias_in_place(f.grid(), spec);
  return from_spectrum(f.grid(), spec);
}

double quadrature(const Field& f) { return f.grid().spacing() * kernels::sum(f.values()); }

// ---------------------------------------------------------------------------
// Interpolation

TrigInterpolant::TrigInterpolant(const Field& f) : omega_(f.grid().fundamental()) {
  const std::size_t n = f.size();
  coeffs_ = spectrum(f);
  const double inv_n = 1.0 / static_cast<double>(n);
  coeffs_[0] *= inv_n;
  for (std::size_t k = 1; k < n / 2; ++k) coeffs_[k] *= 2.0 * inv_n;
  // For real data the Nyquist coefficient is real; its interpolant term is
  // F_{n/2} cos(n/2 omega x) / n.
  coeffs_[n / 2] = cplx(coeffs_[n / 2].real() * inv_n, 0.0);
}

double TrigInterpolant::operator()(double x) const {
  double out = 0.0;
  kernels::trig_eval(coeffs_, omega_, std::span<const double>(&x, 1), std::span<double>(&out, 1));
  return out;
}

void TrigInterpolant::evaluate(std::span<const double> points, std::span<double> out) const {
  kernels::trig_eval(coeffs_, omega_, points, out);
}

std::vector<double> TrigInterpolant::evaluate(std::span<const double> points) const {
  std::vector<double> out(points.size());
  evaluate(points, out);
  return out;
}

TrigInterpolant TrigInterpolant::derivative() const {
  std::vector<cplx> d(coeffs_.size());
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    d[k] = coeffs_[k] * cplx(0.0, omega_ * static_cast<double>(k));
  }
  d.back() = 0.0;
  return TrigInterpolant(omega_, std::move(d));
}

MonotoneCubic::MonotoneCubic(std::vector<double> knots, std::vector<double> values,
                             double period, double shift)
    : x_(std::move(knots)), y_(std::move(values)), period_(period), shift_(shift) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) {
    throw PreconditionError("monotone cubic: need >= 2 knots with matching values");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) {
      throw PreconditionError("monotone cubic: knots must be strictly increasing");
    }
  }
  if (!(x_.back() - x_.front() < period_)) {
    throw PreconditionError("monotone cubic: knots must span less than one period");
  }
  x_.push_back(x_.front() + period_);
  y_.push_back(y_.front() + shift_);

  // Secant slopes on the n cyclic intervals.
  std::vector<double> h(n);
  std::vector<double> delta(n);
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  d_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n;
    const double d0 = delta[im];
    const double d1 = delta[i];
    if (d0 * d1 <= 0.0) {
      d_[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[im];
      const double w2 = h[i] + 2.0 * h[im];
      d_[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
    }
  }
  d_[n] = d_[0];
}

double MonotoneCubic::operator()(double x) const {
  const double m = std::floor((x - x_.front()) / period_);
  double xr = x - m * period_;
  // Guard against xr landing on the upper end through rounding.
  if (xr >= x_.back()) xr -= period_;
  auto it = std::upper_bound(x_.begin(), x_.end(), xr);
  std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
  if (i >= x_.size() - 1) i = x_.size() - 2;
  const double h = x_[i + 1] - x_[i];
  const double s = (xr - x_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  const double y = h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
  return y + m * shift_;
}

std::vector<double> interp(const Field& f, std::span<const double> points, InterpMethod method) {
  const Grid& grid = f.grid();
  std::vector<double> wrapped(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    if (!std::isfinite(points[p])) throw PreconditionError("interp: non-finite point");
    wrapped[p] = grid.wrap(points[p]);
  }
  std::vector<double> out(points.size());
  if (method == InterpMethod::Spectral) {
    TrigInterpolant(f).evaluate(wrapped, out);
  } else {
    const MonotoneCubic mc(std::vector<double>(grid.nodes().begin(), grid.nodes().end()),
                           std::vector<double>(f.values().begin(), f.values().end()),
                           grid.length(), 0.0);
    for (std::size_t p = 0; p < wrapped.size(); ++p) out[p] = mc(wrapped[p]);
  }
  const double n_over_L = static_cast<double>(grid.size()) / grid.length();
  for (std::size_t p = 0; p < wrapped.size(); ++p) {
    const double j = std::round(wrapped[p] * n_over_L);
    if (j < static_cast<double>(grid.size())) {
      const auto idx = static_cast<std::size_t>(j);
      if (grid.node(idx) == wrapped[p]) out[p] = f[idx];
    }
  }
  return out;
}

}  // namespace twoch
