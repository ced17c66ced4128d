#include "fdirac/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <fmt/format.h>

#include "fdirac/asymptotics.hpp"
#include "fdirac/errors.hpp"
#include "fdirac/parallel.hpp"

namespace fdirac {

namespace {

constexpr double pi = std::numbers::pi;

struct Vec2 {
  double a = 0.0;
  double b = 0.0;
};

Vec2 operator+(Vec2 u, Vec2 v) { return {u.a + v.a, u.b + v.b}; }
Vec2 operator*(double c, Vec2 v) { return {c * v.a, c * v.b}; }

struct Rotation {
  double c, s;
  static Rotation of(double angle) { return {std::cos(angle), std::sin(angle)}; }
  Vec2 apply(Vec2 v) const { return {c * v.a - s * v.b, s * v.a + c * v.b}; }
  Vec2 inverse(Vec2 v) const { return {c * v.a + s * v.b, -s * v.a + c * v.b}; }
};

// Runs RK4 over the whole grid, keeping phi and its s-derivative at every point.
class Integrator {
public:
  Integrator(const Model& model, double lambda)
      : m_(model), g_(model.grid()), lam_(lambda), h_(g_.step()), n_(g_.size()) {
    for (std::size_t e = 0; e < 4; ++e) {
      kind_[e] = model.kernel_kind(e);
      has_tonly_ |= kind_[e] == KernelKind::TOnly;
      has_general_ |= kind_[e] == KernelKind::General;
    }
    phi1_.resize(n_);
    phi2_.resize(n_);
    d1_.resize(n_);
    d2_.resize(n_);
  }

  void run() {
    const double a = m_.alpha().value();
    const auto& p = m_.p().values();
    const auto& r = m_.r().values();
    const auto& pm = m_.p_mid();
    const auto& rm = m_.r_mid();

    Vec2 phi{std::cos(m_.theta()), -std::sin(m_.theta())};
    Vec2 psi = phi;
    Rotation rot0 = Rotation::of(0.0);
    for (std::size_t k = 0; k + 1 < n_; ++k) {
      phi1_[k] = phi.a;
      phi2_[k] = phi.b;
      const double sk = g_.s(k);
      const Rotation roth = Rotation::of(lam_ * (sk + 0.5 * h_));
      const Rotation rot1 = Rotation::of(lam_ * g_.s(k + 1));
      const double xh = g_.x_mid(k);
      const double x1 = g_.x(k + 1);

      // History sums for the three targets x_k, x_{k+1/2}, x_{k+1}.
      Vec2 hist_k, hist_h, end_h, hist_1, end_1;
      if (has_general_) {
        hist_k = general_history(g_.x(k), k, a, nullptr);
        hist_h = general_history(xh, k, a, &end_h);
        hist_1 = general_history(x1, k, a, &end_1);
      }

      const Vec2 mem_k = tonly_sum_ + hist_k;
      const Vec2 f_k = forcing(p[k], r[k], phi, mem_k);
      d1_[k] = -lam_ * phi.b + f_k.a;
      d2_[k] = lam_ * phi.a + f_k.b;
      const Vec2 k1 = rot0.inverse(f_k);

      auto half_memory = [&](Vec2 stage) {
        Vec2 mem = tonly_sum_ + 0.25 * h_ * (tonly_apply(k, false, phi) + tonly_apply(k, true, stage));
        if (has_general_) {
          mem = mem + hist_h + 0.25 * h_ * (end_h + general_diag(k, true, stage));
        }
        return mem;
      };
      auto full_memory = [&](Vec2 stage) {
        Vec2 mem = tonly_sum_ + 0.5 * h_ * (tonly_apply(k, false, phi) + tonly_apply(k + 1, false, stage));
        if (has_general_) {
          mem = mem + hist_1 + 0.5 * h_ * (end_1 + general_diag(k + 1, false, stage));
        }
        return mem;
      };

      const Vec2 phi_a = roth.apply(psi + 0.5 * h_ * k1);
      const Vec2 k2 = roth.inverse(forcing(pm[k], rm[k], phi_a, half_memory(phi_a)));
      const Vec2 phi_b = roth.apply(psi + 0.5 * h_ * k2);
      const Vec2 k3 = roth.inverse(forcing(pm[k], rm[k], phi_b, half_memory(phi_b)));
      const Vec2 phi_c = rot1.apply(psi + h_ * k3);
      const Vec2 k4 = rot1.inverse(forcing(p[k + 1], r[k + 1], phi_c, full_memory(phi_c)));

      psi = psi + (h_ / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const Vec2 next = rot1.apply(psi);
      if (!std::isfinite(next.a) || !std::isfinite(next.b)) {
        throw SolverError(
            fmt::format("non-finite solution at grid index {} (x={}, lambda={})", k + 1, x1, lam_),
            k + 1);
      }
      if (has_tonly_) {
        tonly_sum_ = tonly_sum_ + 0.5 * h_ * (tonly_apply(k, false, phi) + tonly_apply(k + 1, false, next));
      }
      phi = next;
      rot0 = rot1;
    }

    const std::size_t last = n_ - 1;
    phi1_[last] = phi.a;
    phi2_[last] = phi.b;
    Vec2 mem = tonly_sum_;
    if (has_general_) mem = mem + general_history(g_.x(last), last, a, nullptr);
    const Vec2 f = forcing(p[last], r[last], phi, mem);
    d1_[last] = -lam_ * phi.b + f.a;
    d2_[last] = lam_ * phi.a + f.b;
  }

  SolutionTrace trace() && {
    const GridPtr& grid = m_.grid_ptr();
    return SolutionTrace{lam_, GridFn(grid, std::move(phi1_)), GridFn(grid, std::move(phi2_)),
                         GridFn(grid, std::move(d1_)), GridFn(grid, std::move(d2_))};
  }

  Vec2 endpoint() const { return {phi1_.back(), phi2_.back()}; }

private:
  // Non-rotational part of the right-hand side: (r phi2 + I2, -p phi1 - I1).
  static Vec2 forcing(double p, double r, Vec2 phi, Vec2 mem) {
    return {r * phi.b + mem.b, -p * phi.a - mem.a};
  }

  // (I1, I2) contribution of t-only kernel entries at grid point k (or half step k).
  Vec2 tonly_apply(std::size_t k, bool mid, Vec2 phi) const {
    if (!has_tonly_) return {};
    Vec2 out;
    for (std::size_t e = 0; e < 4; ++e) {
      if (kind_[e] != KernelKind::TOnly) continue;
      const double m = mid ? m_.kernel_diag_mid(e)[k] : m_.kernel_diag(e)[k];
      add_entry(out, e, m, phi);
    }
    return out;
  }

  // Same for general entries on the diagonal t = x (grid point or half step).
  Vec2 general_diag(std::size_t k, bool mid, Vec2 phi) const {
    Vec2 out;
    for (std::size_t e = 0; e < 4; ++e) {
      if (kind_[e] != KernelKind::General) continue;
      const double m = mid ? m_.kernel_diag_mid(e)[k] : m_.kernel_diag(e)[k];
      add_entry(out, e, m, phi);
    }
    return out;
  }

  static void add_entry(Vec2& out, std::size_t e, double m, Vec2 phi) {
    const double v = (e % 2 == 0 ? phi.a : phi.b) * m;
    if (e < 2) {
      out.a += v;
    } else {
      out.b += v;
    }
  }

  // Trapezoid sum over [0, s_k] of M(x_target, t) phi(t) for general entries.
  // When `end` is set, returns the partial sum without the t_k term and stores
  // M(x_target, t_k) phi_k in *end.
  Vec2 general_history(double x_target, std::size_t k, double a, Vec2* end) const {
    Vec2 sum;
    for (std::size_t l = 0; l < k; ++l) {
      const double w = l == 0 ? 0.5 * h_ : h_;
      sum = sum + w * general_row(x_target, l, a);
    }
    const Vec2 last = general_row(x_target, k, a);
    if (end) {
      *end = last;
      return k == 0 ? Vec2{} : sum + 0.5 * h_ * last;
    }
    return k == 0 ? Vec2{} : sum + 0.5 * h_ * last;
  }

  Vec2 general_row(double x_target, std::size_t l, double /*a*/) const {
    Vec2 out;
    const Vec2 phi{phi1_[l], phi2_[l]};
    for (std::size_t e = 0; e < 4; ++e) {
      if (kind_[e] != KernelKind::General) continue;
      add_entry(out, e, m_.kernel_at(e, x_target, g_.x(l)), phi);
    }
    return out;
  }

  const Model& m_;
  const SGrid& g_;
  double lam_;
  double h_;
  std::size_t n_;
  std::array<KernelKind, 4> kind_{};
  bool has_tonly_ = false;
  bool has_general_ = false;
  Vec2 tonly_sum_;
  std::vector<double> phi1_, phi2_, d1_, d2_;
};

// Illinois regula falsi with a bisection fallback whenever the bracket stops shrinking.
template <typename F>
double refine_root(F&& f, double lo, double hi, double f_lo, double f_hi, double lambda_tol,
                   double delta_tol, double& f_root) {
  double a = lo, b = hi, fa = f_lo, fb = f_hi;
  int side = 0;
  double width_before = b - a;
  for (int it = 0; it < 200; ++it) {
    double c;
    if (it % 3 == 2 && (b - a) > 0.5 * width_before) {
      c = 0.5 * (a + b);
    } else {
      c = (a * fb - b * fa) / (fb - fa);
      if (!(c > a && c < b)) c = 0.5 * (a + b);
    }
    if (it % 3 == 2) width_before = b - a;
    const double fc = f(c);
    if (fc == 0.0 || std::abs(fc) <= delta_tol) {
      f_root = fc;
      return c;
    }
    if ((fc > 0.0) == (fb > 0.0)) {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    } else {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    }
    if (b - a <= lambda_tol) break;
  }
  const double c = 0.5 * (a + b);
  f_root = f(c);
  return c;
}

}  // namespace

SolutionTrace solve_phi(const Model& model, double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
  Integrator integrator(model, lambda);
  integrator.run();
  return std::move(integrator).trace();
}

std::array<double, 2> solve_endpoint(const Model& model, double lambda) {
  if (!std::isfinite(lambda)) throw DomainError("lambda must be finite");
  Integrator integrator(model, lambda);
  integrator.run();
  const Vec2 e = integrator.endpoint();
  return {e.a, e.b};
}

double char_delta(const Model& model, double lambda) {
  const auto [phi1, phi2] = solve_endpoint(model, lambda);
  return phi1 * std::sin(model.beta()) + phi2 * std::cos(model.beta());
}

const SpectrumEntry* Spectrum::find(int n) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), n,
                             [](const SpectrumEntry& e, int v) { return e.n < v; });
  return it != entries.end() && it->n == n ? &*it : nullptr;
}

Spectrum find_eigenvalues(const Model& model, int n_lo, int n_hi, const EigenOptions& opts) {
  if (n_lo > n_hi) throw DomainError("find_eigenvalues: n_lo must not exceed n_hi");
  const double a = model.alpha().value();
  const double gap = a * std::pow(pi, 1.0 - a);
  const auto functionals = potential_functionals(model);
  auto delta = [&model](double lam) { return char_delta(model, lam); };

  const auto count = static_cast<std::size_t>(n_hi - n_lo + 1);
  std::vector<std::optional<SpectrumEntry>> found(count);
  std::vector<std::string> failure(count);

  parallel_for(count, opts.jobs, [&](std::size_t i) {
    const int n = n_lo + static_cast<int>(i);
    const double seed = eigenvalue_estimate(functionals, model.theta(), model.beta(), n, 1);
    // Sample Delta on quarter-gap steps around the seed; take the sign change nearest
    // to the seed within +-gap/2, widening up to 4x when none is found.
    const double step = 0.25 * gap;
    std::map<int, double> values;
    auto value_at = [&](int m) {
      auto it = values.find(m);
      if (it != values.end()) return it->second;
      const double v = delta(seed + m * step);
      values.emplace(m, v);
      return v;
    };
    for (int reach = 2; reach <= 8; reach *= 2) {
      int best = 0;
      bool have = false;
      double best_dist = 0.0;
      for (int m = -reach; m < reach; ++m) {
        const double fa = value_at(m), fb = value_at(m + 1);
        if (fa == 0.0 || (fa > 0.0) != (fb > 0.0) || fb == 0.0) {
          const double dist = std::abs(m + 0.5);
          if (!have || dist < best_dist) {
            best = m;
            best_dist = dist;
            have = true;
          }
        }
      }
      if (!have) continue;
      const double lo = seed + best * step, hi = seed + (best + 1) * step;
      const double flo = value_at(best), fhi = value_at(best + 1);
      const double scale = std::max(std::abs(flo), std::abs(fhi));
      double froot = 0.0;
      double root;
      if (flo == 0.0) {
        root = lo;
      } else if (fhi == 0.0) {
        root = hi;
      } else {
        root = refine_root(delta, lo, hi, flo, fhi, opts.lambda_tol,
                           opts.delta_tol * std::max(1.0, scale), froot);
      }
      found[i] = SpectrumEntry{n, root, std::abs(froot), scale};
      return;
    }
    failure[i] = fmt::format("no sign change of Delta within {} of the seed {}", 2.0 * gap, seed);
  });

  Spectrum spectrum;
  for (std::size_t i = 0; i < count; ++i) {
    if (found[i]) {
      spectrum.entries.push_back(*found[i]);
    } else {
      spectrum.failures.push_back({n_lo + static_cast<int>(i), failure[i]});
    }
  }
  for (std::size_t i = 1; i < spectrum.entries.size(); ++i) {
    const auto& prev = spectrum.entries[i - 1];
    const auto& cur = spectrum.entries[i];
    if (cur.lambda - prev.lambda <= 10.0 * opts.lambda_tol) {
      throw SolverError(fmt::format("indices {} and {} converged to the same root {}", prev.n,
                                    cur.n, cur.lambda));
    }
  }
  return spectrum;
}

std::vector<double> find_nodes(const Model& model, const SpectrumEntry& entry,
                               const SolutionTrace& trace) {
  (void)entry;
  const SGrid& g = model.grid();
  const auto v = trace.phi1.values();
  const auto dv = trace.dphi1.values();
  const std::size_t n = v.size();
  const double h = g.step();
  constexpr double tiny = 1e-14;

  std::vector<double> nodes;
  auto push_s = [&](double s) {
    const double x = g.x_of(s);
    if (x > 0.0 && x < pi) nodes.push_back(x);
  };

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double fa = v[k], fb = v[k + 1];
    if (std::abs(fa) < tiny) continue;
    if (std::abs(fb) < tiny) {
      if (k + 1 < n - 1) push_s(g.s(k + 1));
      continue;
    }
    if ((fa > 0.0) == (fb > 0.0)) continue;

    // Cubic Hermite on [s_k, s_k+1] in the local variable u in [0, 1].
    const double da = dv[k] * h, db = dv[k + 1] * h;
    auto hermite = [&](double u, double& deriv) {
      const double u2 = u * u, u3 = u2 * u;
      deriv = (6 * u2 - 6 * u) * fa + (3 * u2 - 4 * u + 1) * da + (-6 * u2 + 6 * u) * fb +
              (3 * u2 - 2 * u) * db;
      return (2 * u3 - 3 * u2 + 1) * fa + (u3 - 2 * u2 + u) * da + (-2 * u3 + 3 * u2) * fb +
             (u3 - u2) * db;
    };
    double lo = 0.0, hi = 1.0;
    double u = fa / (fa - fb);
    for (int it = 0; it < 60; ++it) {
      double d = 0.0;
      const double fu = hermite(u, d);
      if (fu == 0.0) break;
      if ((fu > 0.0) == (fa > 0.0)) {
        lo = u;
      } else {
        hi = u;
      }
      double next = d != 0.0 ? u - fu / d : 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - u) < 1e-16) {
        u = next;
        break;
      }
      u = next;
    }
    push_s(g.s(k) + u * h);
  }
  return nodes;
}

NodalSet compute_nodal_set(const Model& model, const Spectrum& spectrum, std::size_t jobs) {
  const auto& entries = spectrum.entries;
  std::vector<std::vector<double>> per_entry(entries.size());
  parallel_for(entries.size(), jobs, [&](std::size_t i) {
    const SolutionTrace trace = solve_phi(model, entries[i].lambda);
    per_entry[i] = find_nodes(model, entries[i], trace);
  });

  NodalSet set;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const int n = entries[i].n;
    if (per_entry[i].size() != static_cast<std::size_t>(std::max(n, 0))) {
      set.count_mismatch.push_back(n);
    }
    set.nodes.emplace(n, std::move(per_entry[i]));
  }
  set.n_min = 0;
  for (auto it = set.nodes.rbegin(); it != set.nodes.rend(); ++it) {
    if (it->second.size() != static_cast<std::size_t>(std::max(it->first, 0))) break;
    set.n_min = it->first;
  }
  return set;
}

}  // namespace fdirac
