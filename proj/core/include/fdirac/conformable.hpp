#pragma once

// Conformable fractional calculus on uniform grids in the flattened
// coordinate s = x^alpha / alpha. Under this substitution D^alpha becomes
// d/ds and the alpha-integral becomes an ordinary integral over s, so every
// operation below is a classical fourth-order stencil on a uniform s-grid.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fdirac {

/// Order of the conformable derivative, 0 < alpha <= 1.
class AlphaOrder {
public:
  explicit AlphaOrder(double alpha);
  double value() const noexcept { return alpha_; }
  operator double() const noexcept { return alpha_; }

private:
  double alpha_;
};

double s_of_x(double x, AlphaOrder alpha);
double x_of_s(double s, AlphaOrder alpha);

/// Uniform grid on [0, pi^alpha/alpha] in s with the paired x = (alpha s)^(1/alpha).
/// Immutable; shared between every GridFn sampled on it.
class SGrid {
public:
  static constexpr std::size_t default_points = 4097;

  static std::shared_ptr<const SGrid> make(AlphaOrder alpha,
                                           std::size_t n_points = default_points);

  AlphaOrder alpha() const noexcept { return alpha_; }
  std::size_t size() const noexcept { return s_.size(); }
  double step() const noexcept { return h_; }
  double s_end() const noexcept { return s_.back(); }

  double s(std::size_t k) const { return s_[k]; }
  double x(std::size_t k) const { return x_[k]; }
  /// x at the half step s_k + h/2.
  double x_mid(std::size_t k) const;

  std::span<const double> s_values() const noexcept { return s_; }
  std::span<const double> x_values() const noexcept { return x_; }

  double x_of(double s) const { return x_of_s(s, alpha_); }
  double s_of(double x) const { return s_of_x(x, alpha_); }

  bool same_as(const SGrid& other) const noexcept;

private:
  SGrid(AlphaOrder alpha, std::size_t n_points);

  AlphaOrder alpha_;
  double h_;
  std::vector<double> s_;
  std::vector<double> x_;
};

using GridPtr = std::shared_ptr<const SGrid>;

/// Real function sampled at every point of an SGrid.
class GridFn {
public:
  GridFn(GridPtr grid, std::vector<double> values);
  /// Constant function.
  GridFn(GridPtr grid, double value);

  const SGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<const double> values() const noexcept { return values_; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }

  /// Four-point Lagrange interpolation in s; clamps s to the grid range.
  double at_s(double s) const;
  double at_x(double x) const { return at_s(grid_->s_of(x)); }

  double sup_norm() const;
  /// max |f| over grid points whose x lies in [x_lo, x_hi].
  double sup_norm_on(double x_lo, double x_hi) const;

  GridFn map(const std::function<double(double)>& fn) const;

  friend GridFn operator+(const GridFn& a, const GridFn& b);
  friend GridFn operator-(const GridFn& a, const GridFn& b);
  friend GridFn operator*(const GridFn& a, const GridFn& b);
  friend GridFn operator*(double c, const GridFn& a);
  friend GridFn operator+(const GridFn& a, double c);

private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Samples fn at the grid x-values. A non-finite value (or exception) at x = 0 is
/// replaced by the limit from the right, estimated by Richardson extrapolation.
GridFn sample(const GridPtr& grid, const std::function<double(double)>& fn);

/// D^alpha f on the same grid: 5-point central differences inside, one-sided 5-point near the ends.
GridFn frac_derivative(const GridFn& f);

/// Cumulative alpha-integral from 0: trapezoid in s with the Euler-Maclaurin end correction. Value 0 at x = 0.
GridFn frac_integral(const GridFn& f);

/// Total alpha-integral over [0, pi].
double frac_integral_total(const GridFn& f);

/// Centered moving average of odd width (width <= 1 returns f unchanged).
GridFn smooth(const GridFn& f, std::size_t width);

}  // namespace fdirac
