#include "fdirac/model.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "fdirac/errors.hpp"

namespace fdirac {

namespace {

constexpr double pi = std::numbers::pi;
constexpr const char* kernel_names[4] = {"M11", "M12", "M21", "M22"};

Expression parse_field(const std::string& source, const char* field) {
  try {
    return Expression::parse(source);
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", field, e.what()), e.offset());
  }
}

double eval_with_limit(const Expression& e, double x, double t, double alpha) {
  try {
    return e.eval(x, t, alpha);
  } catch (const EvalError&) {
    if (x != 0.0 && t != 0.0) throw;
  }
  // Limit from the right at the origin.
  const double eps = 1e-9;
  const double a = e.eval(x == 0.0 ? eps : x, t == 0.0 ? eps : t, alpha);
  const double b = e.eval(x == 0.0 ? 0.5 * eps : x, t == 0.0 ? 0.5 * eps : t, alpha);
  return 2.0 * b - a;
}

}  // namespace

double normalize_angle(double angle) {
  if (!std::isfinite(angle)) throw DomainError("boundary angle must be finite");
  const double k = std::ceil((angle - 0.5 * pi) / pi);
  double out = angle - k * pi;
  if (out <= -0.5 * pi) out += pi;
  return out;
}

Model Model::create(const ModelSpec& spec, std::size_t grid_points) {
  return create(spec, SGrid::make(AlphaOrder(spec.alpha), grid_points));
}

Model Model::create(const ModelSpec& spec, GridPtr grid) {
  const AlphaOrder alpha(spec.alpha);
  if (grid->alpha().value() != alpha.value()) {
    throw DomainError("grid alpha does not match the model alpha");
  }
  auto data = std::make_shared<Data>(grid);
  data->spec = spec;
  data->theta = normalize_angle(spec.theta);
  data->beta = normalize_angle(spec.beta);
  data->p = parse_field(spec.p, "p");
  data->r = parse_field(spec.r, "r");
  const std::array<const std::string*, 4> msrc = {&spec.m11, &spec.m12, &spec.m21, &spec.m22};
  for (std::size_t i = 0; i < 4; ++i) data->m[i] = parse_field(*msrc[i], kernel_names[i]);

  if (data->p.uses_t()) throw DomainError("potential p may only depend on x");
  if (data->r.uses_t()) throw DomainError("potential r may only depend on x");

  const double a = alpha.value();
  auto eval_potential = [a](const Expression& e) {
    return [&e, a](double x) { return e.eval(x, 0.0, a); };
  };
  try {
    data->p_grid = sample(grid, eval_potential(data->p));
    data->r_grid = sample(grid, eval_potential(data->r));
  } catch (const Error& e) {
    throw DomainError(fmt::format("sampling potentials failed: {}", e.what()));
  }

  const std::size_t n = grid->size();
  data->p_mid.resize(n - 1);
  data->r_mid.resize(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double xm = grid->x_mid(k);
    data->p_mid[k] = data->p.eval(xm, 0.0, a);
    data->r_mid[k] = data->r.eval(xm, 0.0, a);
  }
  for (std::size_t k = 1; k < n; ++k) {
    const double w = std::pow(grid->x(k), a - 1.0);
    if (!std::isfinite(w * data->p_grid[k]) || !std::isfinite(w * data->r_grid[k])) {
      throw DomainError(fmt::format("x^(alpha-1) p(x) or x^(alpha-1) r(x) not finite at x={}",
                                    grid->x(k)));
    }
  }

  for (std::size_t i = 0; i < 4; ++i) {
    const Expression& e = data->m[i];
    data->kind[i] = e.is_zero() ? KernelKind::Zero
                    : e.uses_x() ? KernelKind::General
                                 : KernelKind::TOnly;
    auto& diag = data->diag[i];
    auto& diag_mid = data->diag_mid[i];
    diag.assign(n, 0.0);
    diag_mid.assign(n - 1, 0.0);
    if (data->kind[i] == KernelKind::Zero) continue;
    try {
      for (std::size_t k = 0; k < n; ++k) diag[k] = eval_with_limit(e, grid->x(k), grid->x(k), a);
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const double xm = grid->x_mid(k);
        diag_mid[k] = e.eval(xm, xm, a);
      }
      if (data->kind[i] == KernelKind::General) {
        // Probe the lower triangle t <= x on a coarse lattice.
        const std::size_t probes = 17;
        for (std::size_t u = 0; u < probes; ++u) {
          const std::size_t ku = u * (n - 1) / (probes - 1);
          for (std::size_t v = 0; v <= u; ++v) {
            const std::size_t kv = v * (n - 1) / (probes - 1);
            eval_with_limit(e, grid->x(ku), grid->x(kv), a);
          }
        }
      }
    } catch (const Error& err) {
      throw DomainError(fmt::format("kernel {}: {}", kernel_names[i], err.what()));
    }
  }
  return Model(std::move(data));
}

Model Model::with_grid(std::size_t grid_points) const {
  return create(data_->spec, grid_points);
}

bool Model::has_kernel() const noexcept {
  for (auto k : data_->kind) {
    if (k != KernelKind::Zero) return true;
  }
  return false;
}

double Model::kernel_at(std::size_t entry, double x, double t) const {
  return eval_with_limit(data_->m[entry], x, t, alpha().value());
}

}  // namespace fdirac
