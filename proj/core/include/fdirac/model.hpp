#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "fdirac/conformable.hpp"
#include "fdirac/expression.hpp"

namespace fdirac {

/// Textual description of a problem instance, as it appears in a config file.
struct ModelSpec {
  double alpha = 1.0;
  double theta = 0.0;
  double beta = 0.0;
  std::string p = "0";
  std::string r = "0";
  std::string m11 = "0";
  std::string m12 = "0";
  std::string m21 = "0";
  std::string m22 = "0";

  bool operator==(const ModelSpec&) const = default;
};

/// Wraps an angle into (-pi/2, pi/2].
double normalize_angle(double angle);

/// How a kernel entry M_ij(x, t) depends on its arguments; decides the memory scheme.
enum class KernelKind { Zero, TOnly, General };

/// Problem instance: the integro-differential Dirac system
///   D^a y2 + p y1 + int_0^x (M11 y1 + M12 y2) d_a t = lambda y1
///  -D^a y1 + r y2 + int_0^x (M21 y1 + M22 y2) d_a t = lambda y2
/// with boundary angles theta (x = 0) and beta (x = pi), sampled on an SGrid.
class Model {
public:
  /// Validates and samples. Potentials may only use x; kernels may use x and t.
  static Model create(const ModelSpec& spec, std::size_t grid_points = SGrid::default_points);
  static Model create(const ModelSpec& spec, GridPtr grid);

  /// Same coefficients on a different grid (the grid's alpha must match).
  Model with_grid(std::size_t grid_points) const;

  const ModelSpec& spec() const noexcept { return data_->spec; }
  AlphaOrder alpha() const noexcept { return grid().alpha(); }
  double theta() const noexcept { return data_->theta; }
  double beta() const noexcept { return data_->beta; }
  const SGrid& grid() const noexcept { return *data_->grid; }
  const GridPtr& grid_ptr() const noexcept { return data_->grid; }

  const Expression& p_expr() const noexcept { return data_->p; }
  const Expression& r_expr() const noexcept { return data_->r; }
  /// Kernel entry in row-major order: 0 = M11, 1 = M12, 2 = M21, 3 = M22.
  const Expression& kernel(std::size_t entry) const { return data_->m[entry]; }
  KernelKind kernel_kind(std::size_t entry) const { return data_->kind[entry]; }
  bool has_kernel() const noexcept;

  /// M_ij(x, t); a non-finite value at x = 0 or t = 0 is replaced by the limit from the right.
  double kernel_at(std::size_t entry, double x, double t) const;

  /// p, r at grid points.
  const GridFn& p() const noexcept { return data_->p_grid; }
  const GridFn& r() const noexcept { return data_->r_grid; }
  /// p, r at half steps s_k + h/2, k = 0..N-2.
  const std::vector<double>& p_mid() const noexcept { return data_->p_mid; }
  const std::vector<double>& r_mid() const noexcept { return data_->r_mid; }

  /// M_ij(t, t) at grid points and half steps (used for diagonal traces and
  /// for TOnly entries, where M_ij(x, t) = M_ij(t)).
  const std::vector<double>& kernel_diag(std::size_t entry) const { return data_->diag[entry]; }
  const std::vector<double>& kernel_diag_mid(std::size_t entry) const {
    return data_->diag_mid[entry];
  }

private:
  struct Data {
    explicit Data(GridPtr g) : grid(g), p_grid(g, 0.0), r_grid(g, 0.0) {}

    ModelSpec spec;
    double theta = 0.0;
    double beta = 0.0;
    GridPtr grid;
    Expression p, r;
    std::array<Expression, 4> m;
    std::array<KernelKind, 4> kind{};
    GridFn p_grid, r_grid;
    std::vector<double> p_mid, r_mid;
    std::array<std::vector<double>, 4> diag, diag_mid;
  };

  explicit Model(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

}  // namespace fdirac
