#include "fdirac/conformable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "fdirac/errors.hpp"

namespace fdirac {

namespace {

constexpr double pi = std::numbers::pi;

void require_same_grid(const GridFn& a, const GridFn& b) {
  if (!a.grid().same_as(b.grid())) {
    throw DomainError("GridFn operands live on different grids");
  }
}

}  // namespace

AlphaOrder::AlphaOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError(fmt::format("alpha must lie in (0, 1], got {}", alpha));
  }
}

double s_of_x(double x, AlphaOrder alpha) {
  if (x < 0.0 || std::isnan(x)) {
    throw DomainError(fmt::format("s_of_x: x must be >= 0, got {}", x));
  }
  const double a = alpha.value();
  return a == 1.0 ? x : std::pow(x, a) / a;
}

double x_of_s(double s, AlphaOrder alpha) {
  if (s < 0.0 || std::isnan(s)) {
    throw DomainError(fmt::format("x_of_s: s must be >= 0, got {}", s));
  }
  const double a = alpha.value();
  return a == 1.0 ? s : std::pow(a * s, 1.0 / a);
}

SGrid::SGrid(AlphaOrder alpha, std::size_t n_points)
    : alpha_(alpha), h_(0.0), s_(n_points), x_(n_points) {
  const double a = alpha.value();
  const double s_end = std::pow(pi, a) / a;
  const std::size_t last = n_points - 1;
  h_ = s_end / static_cast<double>(last);
  for (std::size_t k = 0; k < n_points; ++k) {
    s_[k] = h_ * static_cast<double>(k);
    x_[k] = x_of_s(s_[k], alpha);
  }
  s_[last] = s_end;
  x_[last] = pi;
}

std::shared_ptr<const SGrid> SGrid::make(AlphaOrder alpha, std::size_t n_points) {
  if (n_points < 3) {
    throw DomainError(fmt::format("SGrid needs at least 3 points, got {}", n_points));
  }
  return std::shared_ptr<const SGrid>(new SGrid(alpha, n_points));
}

double SGrid::x_mid(std::size_t k) const {
  return x_of_s(s_[k] + 0.5 * h_, alpha_);
}

bool SGrid::same_as(const SGrid& other) const noexcept {
  return this == &other ||
         (alpha_.value() == other.alpha_.value() && s_.size() == other.s_.size());
}

GridFn::GridFn(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw DomainError("GridFn requires a grid");
  if (values_.size() != grid_->size()) {
    throw DomainError(fmt::format("GridFn has {} values for a {}-point grid",
                                  values_.size(), grid_->size()));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw DomainError(fmt::format("GridFn value at index {} is not finite", k));
    }
  }
}

GridFn::GridFn(GridPtr grid, double value)
    : GridFn(grid, std::vector<double>(grid ? grid->size() : 0, value)) {}

double GridFn::at_s(double s) const {
  const std::size_t n = values_.size();
  const double h = grid_->step();
  const double u = std::clamp(s / h, 0.0, static_cast<double>(n - 1));
  // Stencil of 4 points around u, shifted inward at the ends.
  auto i0 = static_cast<std::ptrdiff_t>(std::floor(u)) - 1;
  i0 = std::clamp<std::ptrdiff_t>(i0, 0, static_cast<std::ptrdiff_t>(n) - 4);
  if (n < 4) i0 = 0;
  const std::size_t m = std::min<std::size_t>(4, n);
  double result = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    double w = 1.0;
    const double ua = static_cast<double>(i0) + static_cast<double>(a);
    for (std::size_t b = 0; b < m; ++b) {
      if (a == b) continue;
      const double ub = static_cast<double>(i0) + static_cast<double>(b);
      w *= (u - ub) / (ua - ub);
    }
    result += w * values_[static_cast<std::size_t>(i0) + a];
  }
  return result;
}

double GridFn::sup_norm() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridFn::sup_norm_on(double x_lo, double x_hi) const {
  double m = 0.0;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double x = grid_->x(k);
    if (x >= x_lo && x <= x_hi) m = std::max(m, std::abs(values_[k]));
  }
  return m;
}

GridFn GridFn::map(const std::function<double(double)>& fn) const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(), fn);
  return GridFn(grid_, std::move(out));
}

GridFn operator+(const GridFn& a, const GridFn& b) {
  require_same_grid(a, b);
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.values_[k] + b.values_[k];
  return GridFn(a.grid_, std::move(out));
}

GridFn operator-(const GridFn& a, const GridFn& b) {
  require_same_grid(a, b);
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.values_[k] - b.values_[k];
  return GridFn(a.grid_, std::move(out));
}

GridFn operator*(const GridFn& a, const GridFn& b) {
  require_same_grid(a, b);
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.values_[k] * b.values_[k];
  return GridFn(a.grid_, std::move(out));
}

GridFn operator*(double c, const GridFn& a) {
  return a.map([c](double v) { return c * v; });
}

GridFn operator+(const GridFn& a, double c) {
  return a.map([c](double v) { return v + c; });
}

GridFn sample(const GridPtr& grid, const std::function<double(double)>& fn) {
  std::vector<double> out(grid->size());
  for (std::size_t k = 1; k < out.size(); ++k) out[k] = fn(grid->x(k));

  double at_zero = 0.0;
  bool ok = false;
  try {
    at_zero = fn(0.0);
    ok = std::isfinite(at_zero);
  } catch (const Error&) {
    ok = false;
  }
  if (!ok) {
    // Limit from the right: Richardson on eps, eps/2 samples (linear remainder).
    const double eps = 1e-6 * grid->x(1);
    const double a = fn(eps);
    const double b = fn(0.5 * eps);
    const double c = fn(0.25 * eps);
    at_zero = 2.0 * b - a;
    const double again = 2.0 * c - b;
    if (!std::isfinite(at_zero) || !std::isfinite(again) ||
        std::abs(at_zero - again) > 1e-6 * (1.0 + std::abs(at_zero))) {
      throw DomainError("function has no finite limit at x = 0");
    }
  }
  out[0] = at_zero;
  return GridFn(grid, std::move(out));
}

GridFn frac_derivative(const GridFn& f) {
  const std::size_t n = f.size();
  if (n < 3) throw DomainError("frac_derivative needs at least 3 grid points");
  const double h = f.grid().step();
  const auto v = f.values();
  std::vector<double> d(n);
  if (n < 5) {
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (v[k + 1] - v[k - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    return GridFn(f.grid_ptr(), std::move(d));
  }
  // fourth order: 5-point central, one-sided 5-point at the two points next to each end
  const double w = 12.0 * h;
  d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / w;
  d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / w;
  for (std::size_t k = 2; k + 2 < n; ++k) {
    d[k] = (v[k - 2] - 8.0 * v[k - 1] + 8.0 * v[k + 1] - v[k + 2]) / w;
  }
  const std::size_t m = n - 1;
  d[m] = (25.0 * v[m] - 48.0 * v[m - 1] + 36.0 * v[m - 2] - 16.0 * v[m - 3] + 3.0 * v[m - 4]) / w;
  d[m - 1] = (3.0 * v[m] + 10.0 * v[m - 1] - 18.0 * v[m - 2] + 6.0 * v[m - 3] - v[m - 4]) / w;
  return GridFn(f.grid_ptr(), std::move(d));
}

GridFn frac_integral(const GridFn& f) {
  const std::size_t n = f.size();
  const double h = f.grid().step();
  const auto v = f.values();
  std::vector<double> out(n);
  out[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] + 0.5 * h * (v[k - 1] + v[k]);
  if (n >= 5) {
    // Euler-Maclaurin end correction lifts the cumulative trapezoid to fourth order
    const GridFn df = frac_derivative(f);
    const double c = h * h / 12.0;
    for (std::size_t k = 1; k < n; ++k) out[k] -= c * (df[k] - df[0]);
  }
  return GridFn(f.grid_ptr(), std::move(out));
}

double frac_integral_total(const GridFn& f) {
  return frac_integral(f).back();
}

GridFn smooth(const GridFn& f, std::size_t width) {
  if (width <= 1) return f;
  if (width % 2 == 0) ++width;
  const std::size_t half = width / 2;
  const std::size_t n = f.size();
  const auto v = f.values();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Window shrinks symmetrically near the ends so endpoints are not biased.
    const std::size_t r = std::min({half, k, n - 1 - k});
    double acc = 0.0;
    for (std::size_t i = k - r; i <= k + r; ++i) acc += v[i];
    out[k] = acc / static_cast<double>(2 * r + 1);
  }
  return GridFn(f.grid_ptr(), std::move(out));
}

}  // namespace fdirac
