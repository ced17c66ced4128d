#include "fdirac/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fdirac/errors.hpp"

namespace fdirac {

namespace {

constexpr double pi = std::numbers::pi;

GridFn diag_difference(const Model& model, std::size_t a, std::size_t b) {
  const auto& da = model.kernel_diag(a);
  const auto& db = model.kernel_diag(b);
  std::vector<double> out(da.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = da[k] - db[k];
  return GridFn(model.grid_ptr(), std::move(out));
}

double big_x(const PotentialFunctionals& fn, double theta, double beta) {
  return -fn.upsilon.back() * std::sin(2 * beta) + fn.upsilon0 * std::sin(2 * theta) +
         fn.upsilon_sq_int.back() - fn.Lfn.back();
}

double small_y(const PotentialFunctionals& fn, double theta, double x) {
  return fn.upsilon0 * std::sin(2 * theta) + fn.upsilon_sq_int.at_x(x) - fn.Lfn.at_x(x);
}

}  // namespace

PotentialFunctionals potential_functionals(const Model& model) {
  const GridFn& p = model.p();
  const GridFn& r = model.r();
  const GridFn ups = 0.5 * (p - r);
  return PotentialFunctionals{
      model.alpha().value(),
      0.5 * frac_integral(p + r),
      ups,
      ups.front(),
      frac_integral(diag_difference(model, 0, 3)),
      frac_integral(diag_difference(model, 1, 2)),
      frac_integral(ups * ups),
  };
}

std::array<double, 2> phi_estimate(const PotentialFunctionals& fn, double theta, double lambda,
                                   double x) {
  if (lambda == 0.0) throw DomainError("phi_estimate: lambda must be nonzero");
  const double a = fn.alpha;
  const double c = 1.0 / (2.0 * lambda);
  const double base = lambda * std::pow(x, a) / a - fn.mu.at_x(x);
  const double ph = base - theta, php = base + theta;
  const double u = fn.upsilon.at_x(x), q = fn.upsilon_sq_int.at_x(x);
  const double k = fn.Kfn.at_x(x), l = fn.Lfn.at_x(x);
  const double phi1 = std::cos(ph) + c * u * std::cos(ph) - c * fn.upsilon0 * std::cos(php) +
                      c * std::sin(ph) * q - c * k * std::cos(ph) - c * l * std::sin(ph);
  const double phi2 = std::sin(ph) - c * u * std::sin(ph) - c * fn.upsilon0 * std::sin(php) -
                      c * std::cos(ph) * q - c * k * std::sin(ph) + c * l * std::cos(ph);
  return {phi1, phi2};
}

double delta_estimate(const PotentialFunctionals& fn, double theta, double beta, double lambda) {
  if (lambda == 0.0) throw DomainError("delta_estimate: lambda must be nonzero");
  const double a = fn.alpha;
  const double c = 1.0 / (2.0 * lambda);
  const double psi = lambda * std::pow(pi, a) / a - fn.mu.back() - theta + beta;
  return std::sin(psi) - c * fn.upsilon.back() * std::sin(psi - 2 * beta) -
         c * fn.upsilon0 * std::sin(psi + 2 * theta) -
         c * std::cos(psi) * fn.upsilon_sq_int.back() - c * fn.Kfn.back() * std::sin(psi) +
         c * fn.Lfn.back() * std::cos(psi);
}

double eigenvalue_estimate(const PotentialFunctionals& fn, double theta, double beta, int n,
                           int order) {
  if (order != 1 && order != 2) throw DomainError("eigenvalue_estimate: order must be 1 or 2");
  if (n == 0 && order == 2) throw DomainError("eigenvalue_estimate: order 2 needs n != 0");
  const double a = fn.alpha;
  const double c = theta + fn.mu.back() - beta;
  double out = n * a * std::pow(pi, 1.0 - a) + a * c / std::pow(pi, a);
  if (order == 2) out += big_x(fn, theta, beta) / (2.0 * n * pi);
  return out;
}

double node_estimate(const PotentialFunctionals& fn, double theta, double beta, int n, int j) {
  if (n < 1 || j < 0 || j >= n) throw DomainError("node_estimate: need n >= 1, 0 <= j < n");
  const double a = fn.alpha;
  const double c = theta + fn.mu.back() - beta;
  const double ca = c / pi;
  const double cb = big_x(fn, theta, beta) / (2.0 * a * std::pow(pi, 2.0 - a));
  const double nn = n;
  const double lead = (j + 0.5) * std::pow(pi, a) / nn;

  auto x_alpha_at = [&](double x) {
    const double m = fn.mu.at_x(x) + theta;
    return lead + m * std::pow(pi, a - 1.0) / nn - lead * ca / nn -
           c * m * std::pow(pi, a - 2.0) / (nn * nn) + lead * (ca * ca - cb) / (nn * nn) +
           std::pow(pi, 2.0 * a - 2.0) * small_y(fn, theta, x) / (2.0 * a * nn * nn);
  };
  auto to_x = [a](double xa) { return std::pow(std::max(xa, 0.0), 1.0 / a); };

  double x = to_x(lead);
  for (int it = 0; it < 100; ++it) {
    const double next = std::clamp(to_x(x_alpha_at(x)), 0.0, pi);
    const double step = std::abs(next - x);
    x = next;
    if (step <= 1e-15 * (1.0 + x)) break;
  }
  return x;
}

double f_exact(const PotentialFunctionals& fn, double theta, double beta, double x) {
  const double a = fn.alpha;
  return (fn.mu.at_x(x) + theta) * std::pow(pi, a - 1.0) -
         std::pow(x, a) / pi * (theta + fn.mu.back() - beta);
}

double g_exact(const PotentialFunctionals& fn, double theta, double x) {
  return fn.alpha * small_y(fn, theta, x);
}

double g_limit(const PotentialFunctionals& fn, double theta, double beta, double x) {
  const double a = fn.alpha;
  const double c = theta + fn.mu.back() - beta;
  const double cb = big_x(fn, theta, beta) / (2.0 * a * std::pow(pi, 2.0 - a));
  return std::pow(pi, 2.0 * a - 2.0) * small_y(fn, theta, x) / a -
         2.0 * c * (fn.mu.at_x(x) + theta) * std::pow(pi, a - 2.0) +
         2.0 * std::pow(x, a) * ((c / pi) * (c / pi) - cb);
}

}  // namespace fdirac
