#include <cmath>

#include <fmt/format.h>

#include "fdirac/errors.hpp"
#include "fdirac/forward.hpp"

namespace fdirac {

// The increments satisfy delta_{n+1}(s) = R(lambda s) int_0^s R(-lambda u) F[delta_n](u) du
// with F[d] = (r d2 + I2[d], -p d1 - I1[d]) and R the rotation by the given angle; this is
// the variation-of-constants form of the integral equations. All levels are marched together
// over the grid so each kernel row M(x_k, .) is evaluated once.
SolutionTrace picard_solve(const Model& model, double lambda, int iterations) {
  if (iterations < 1) throw DomainError("picard_solve: iterations must be positive");
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
  const SGrid& g = model.grid();
  const std::size_t n = g.size();
  const double h = g.step();
  const auto levels = static_cast<std::size_t>(iterations) + 1;
  const auto& p = model.p().values();
  const auto& r = model.r().values();
  const double theta = model.theta();

  // d1[lvl][k], d2[lvl][k]
  std::vector<std::vector<double>> d1(levels, std::vector<double>(n)),
      d2(levels, std::vector<double>(n));
  std::vector<double> c1(levels, 0.0), c2(levels, 0.0);  // cumulative rotated integrals
  std::vector<double> g1(levels, 0.0), g2(levels, 0.0);  // previous integrand
  std::array<std::vector<double>, 4> row;
  for (auto& rw : row) rw.resize(n);

  for (std::size_t k = 0; k < n; ++k) {
    const double sk = g.s(k);
    const double xk = g.x(k);
    const double ca = std::cos(lambda * sk), sa = std::sin(lambda * sk);
    d1[0][k] = std::cos(lambda * sk - theta);
    d2[0][k] = std::sin(lambda * sk - theta);

    for (std::size_t e = 0; e < 4; ++e) {
      if (model.kernel_kind(e) == KernelKind::Zero) continue;
      for (std::size_t l = 0; l <= k; ++l) row[e][l] = model.kernel_at(e, xk, g.x(l));
    }

    for (std::size_t lvl = 0; lvl + 1 < levels; ++lvl) {
      double i1 = 0.0, i2 = 0.0;
      if (k > 0) {
        for (std::size_t e = 0; e < 4; ++e) {
          if (model.kernel_kind(e) == KernelKind::Zero) continue;
          const auto& src = e % 2 == 0 ? d1[lvl] : d2[lvl];
          double sum = 0.5 * (row[e][0] * src[0] + row[e][k] * src[k]);
          for (std::size_t l = 1; l < k; ++l) sum += row[e][l] * src[l];
          (e < 2 ? i1 : i2) += h * sum;
        }
      }
      const double f1 = r[k] * d2[lvl][k] + i2;
      const double f2 = -p[k] * d1[lvl][k] - i1;
      const double rot1 = ca * f1 + sa * f2;
      const double rot2 = -sa * f1 + ca * f2;
      if (k > 0) {
        c1[lvl] += 0.5 * h * (g1[lvl] + rot1);
        c2[lvl] += 0.5 * h * (g2[lvl] + rot2);
      }
      g1[lvl] = rot1;
      g2[lvl] = rot2;
      d1[lvl + 1][k] = ca * c1[lvl] - sa * c2[lvl];
      d2[lvl + 1][k] = sa * c1[lvl] + ca * c2[lvl];
    }
  }

  std::vector<double> phi1(n, 0.0), phi2(n, 0.0);
  for (std::size_t lvl = 0; lvl < levels; ++lvl) {
    for (std::size_t k = 0; k < n; ++k) {
      phi1[k] += d1[lvl][k];
      phi2[k] += d2[lvl][k];
    }
  }
  double phi_max = 0.0, last_max = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(phi1[k]) || !std::isfinite(phi2[k])) {
      throw SolverError(fmt::format("successive approximations diverged at grid index {}", k), k);
    }
    phi_max = std::max({phi_max, std::abs(phi1[k]), std::abs(phi2[k])});
    last_max = std::max({last_max, std::abs(d1.back()[k]), std::abs(d2.back()[k])});
  }
  if (last_max > 1e-8 * (1.0 + phi_max)) {
    throw SolverError(fmt::format(
        "successive approximations not converged after {} iterations (last increment {:.3g})",
        iterations, last_max));
  }

  // s-derivatives from the system itself, with the memory term by trapezoid.
  std::vector<double> dphi1(n), dphi2(n);
  for (std::size_t k = 0; k < n; ++k) {
    double i1 = 0.0, i2 = 0.0;
    if (k > 0 && model.has_kernel()) {
      for (std::size_t e = 0; e < 4; ++e) {
        if (model.kernel_kind(e) == KernelKind::Zero) continue;
        const auto& src = e % 2 == 0 ? phi1 : phi2;
        const double xk = g.x(k);
        double sum = 0.5 * (model.kernel_at(e, xk, g.x(0)) * src[0] +
                            model.kernel_at(e, xk, xk) * src[k]);
        for (std::size_t l = 1; l < k; ++l) sum += model.kernel_at(e, xk, g.x(l)) * src[l];
        (e < 2 ? i1 : i2) += h * sum;
      }
    }
    dphi1[k] = (r[k] - lambda) * phi2[k] + i2;
    dphi2[k] = (lambda - p[k]) * phi1[k] - i1;
  }

  const GridPtr& grid = model.grid_ptr();
  return SolutionTrace{lambda, GridFn(grid, std::move(phi1)), GridFn(grid, std::move(phi2)),
                       GridFn(grid, std::move(dphi1)), GridFn(grid, std::move(dphi2))};
}

}  // namespace fdirac
