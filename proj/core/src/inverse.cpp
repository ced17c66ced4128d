#include "fdirac/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "fdirac/errors.hpp"

namespace fdirac {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int min_n_max = 16;

const std::vector<double>& nodes_of(const NodalDataset& data, int n) {
  auto it = data.nodes.find(n);
  if (it == data.nodes.end()) {
    throw DomainError(fmt::format("index {} is not in the nodal dataset", n));
  }
  if (it->second.empty()) throw DomainError(fmt::format("index {} has no nodes", n));
  return it->second;
}

std::size_t nearest_node(const std::vector<double>& xs, double x) {
  auto it = std::lower_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return xs.size() - 1;
  const auto k = static_cast<std::size_t>(it - xs.begin());
  if (k == 0) return 0;
  // Ties go to the smaller j.
  return (x - xs[k - 1] <= xs[k] - x) ? k - 1 : k;
}

double lagrange(const double* s, const double* v, std::size_t m, double at) {
  double out = 0.0;
  for (std::size_t a = 0; a < m; ++a) {
    double w = 1.0;
    for (std::size_t b = 0; b < m; ++b) {
      if (a != b) w *= (at - s[b]) / (s[a] - s[b]);
    }
    out += w * v[a];
  }
  return out;
}

// Values known at increasing abscissae s_j, carried to the grid.
GridFn transfer(const std::vector<double>& s, const std::vector<double>& v, const GridPtr& grid,
                Transfer mode) {
  const std::size_t m = s.size();
  const double s_lo = s.front(), s_hi = s.back();
  std::vector<double> out(grid->size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double at = grid->s(k);
    if (m < 3) {
      out[k] = m == 1 ? v[0] : lagrange(s.data(), v.data(), 2, at);
      continue;
    }
    if (at <= s_lo) {
      out[k] = lagrange(s.data(), v.data(), 3, at);
    } else if (at >= s_hi) {
      out[k] = lagrange(s.data() + m - 3, v.data() + m - 3, 3, at);
    } else if (mode == Transfer::Nearest) {
      auto it = std::lower_bound(s.begin(), s.end(), at);
      auto j = static_cast<std::size_t>(it - s.begin());
      if (j > 0 && at - s[j - 1] <= s[j] - at) --j;
      out[k] = v[j];
    } else {
      auto it = std::upper_bound(s.begin(), s.end(), at);
      const auto j = static_cast<std::size_t>(it - s.begin());  // s[j-1] < at <= s[j]
      const std::size_t cnt = std::min<std::size_t>(4, m);
      const std::size_t lo = std::min(j >= 2 ? j - 2 : 0, m - cnt);
      out[k] = lagrange(s.data() + lo, v.data() + lo, cnt, at);
    }
  }
  return GridFn(grid, std::move(out));
}

struct IndexPlan {
  int n_max = 0;
  int n_second = 0;
  int n_third = 0;
};

IndexPlan plan_indices(const NodalDataset& data, Extrapolation mode) {
  IndexPlan plan;
  plan.n_max = data.n_max();
  if (plan.n_max < min_n_max) {
    throw InsufficientData(
        fmt::format("need nodal data up to n >= {}, largest index is {}", min_n_max, plan.n_max));
  }
  auto largest_at_most = [&](int bound) {
    auto it = data.nodes.upper_bound(bound);
    return it == data.nodes.begin() ? 0 : std::prev(it)->first;
  };
  plan.n_second = largest_at_most(plan.n_max / 2);
  if (plan.n_second > 0) plan.n_third = largest_at_most(plan.n_second / 2);
  if (mode == Extrapolation::LargestN) plan.n_second = plan.n_third = 0;
  return plan;
}

// Richardson for an O(1/n) remainder from indices n1 > n2.
GridFn richardson(const GridFn& a1, int n1, const GridFn& a2, int n2) {
  const double w1 = static_cast<double>(n1) / (n1 - n2);
  const double w2 = static_cast<double>(n2) / (n1 - n2);
  return w1 * a1 - w2 * a2;
}

// Same for an A/n + B/n^2 remainder from three indices: Lagrange extrapolation to 1/n = 0.
GridFn richardson3(const GridFn& a1, int n1, const GridFn& a2, int n2, const GridFn& a3, int n3) {
  const double h1 = 1.0 / n1, h2 = 1.0 / n2, h3 = 1.0 / n3;
  const double w1 = h2 * h3 / ((h2 - h1) * (h3 - h1));
  const double w2 = h1 * h3 / ((h1 - h2) * (h3 - h2));
  const double w3 = h1 * h2 / ((h1 - h3) * (h2 - h3));
  return w1 * a1 + w2 * a2 + w3 * a3;
}

struct NodeSeries {
  std::vector<double> s;
  std::vector<double> value;
};

// Node values carry a (-1)^j component at the next order; averaging neighbours removes it
// and leaves an O(1/n^2) bias that the extrapolation absorbs.
NodeSeries pair_average(const NodeSeries& in) {
  NodeSeries out;
  for (std::size_t j = 0; j + 1 < in.s.size(); ++j) {
    out.s.push_back(0.5 * (in.s[j] + in.s[j + 1]));
    out.value.push_back(0.5 * (in.value[j] + in.value[j + 1]));
  }
  return out;
}

NodeSeries f_series(const NodalDataset& data, int n) {
  const double a = data.alpha.value();
  const double pa = std::pow(pi, a);
  const auto& xs = nodes_of(data, n);
  NodeSeries out;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double xa = std::pow(xs[j], a);
    out.s.push_back(xa / a);
    out.value.push_back(n * (xa - (j + 0.5) * pa / n));
  }
  return out;
}

double g_term(double alpha, int n, std::size_t j, double x, double theta, double beta,
              double mu) {
  const double pa = std::pow(pi, alpha);
  const double nn = n;
  const double lead = (j + 0.5) * pa / nn;
  return 2.0 * nn * nn *
         (std::pow(x, alpha) - lead - (mu + theta) * std::pow(pi, alpha - 1.0) / nn +
          lead * (theta - beta) / (nn * pi));
}

NodeSeries g_series(const NodalDataset& data, int n, double theta, double beta,
                    const GridFn& mu_hat) {
  const double a = data.alpha.value();
  const auto& xs = nodes_of(data, n);
  NodeSeries out;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double s = std::pow(xs[j], a) / a;
    out.s.push_back(s);
    out.value.push_back(g_term(a, n, j, xs[j], theta, beta, mu_hat.at_s(s)));
  }
  return out;
}

}  // namespace

int NodalDataset::n_max() const { return nodes.empty() ? 0 : nodes.rbegin()->first; }

void NodalDataset::validate() const {
  for (const auto& [n, xs] : nodes) {
    if (n < 1) throw DomainError(fmt::format("nodal index {} must be positive", n));
    if (xs.size() != static_cast<std::size_t>(n)) {
      throw DomainError(fmt::format("index {} has {} nodes, expected {}", n, xs.size(), n));
    }
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (!(xs[j] > 0.0 && xs[j] < pi)) {
        throw DomainError(fmt::format("node {} of index {} is outside (0, pi): {}", j, n, xs[j]));
      }
      if (j > 0 && !(xs[j] > xs[j - 1])) {
        throw DomainError(fmt::format("nodes of index {} are not strictly increasing at j={}", n, j));
      }
    }
  }
}

NodalDataset NodalDataset::from_nodal_set(AlphaOrder alpha, const NodalSet& set) {
  NodalDataset data;
  data.alpha = alpha;
  for (const auto& [n, xs] : set.nodes) {
    if (n >= 1 && xs.size() == static_cast<std::size_t>(n)) data.nodes.emplace(n, xs);
  }
  return data;
}

double approximant_f(const NodalDataset& data, double x, int n) {
  const auto& xs = nodes_of(data, n);
  const std::size_t j = nearest_node(xs, x);
  const double a = data.alpha.value();
  return n * (std::pow(xs[j], a) - (j + 0.5) * std::pow(pi, a) / n);
}

double approximant_g(const NodalDataset& data, double x, int n, double theta, double beta,
                     double mu_at_node) {
  const auto& xs = nodes_of(data, n);
  const std::size_t j = nearest_node(xs, x);
  return g_term(data.alpha.value(), n, j, xs[j], theta, beta, mu_at_node);
}

Limits extract_limits(const NodalDataset& data, const GridPtr& grid, const InverseOptions& opts) {
  if (grid->alpha().value() != data.alpha.value()) {
    throw DomainError("grid alpha does not match the nodal dataset alpha");
  }
  const IndexPlan plan = plan_indices(data, opts.extrapolation);
  const double a = data.alpha.value();
  InverseDiagnostics diag;
  diag.n_max = plan.n_max;
  diag.n_second = plan.n_second;

  auto per_index = [&](auto&& series_of) {
    std::map<int, GridFn> out;
    for (int n : {plan.n_max, plan.n_second, plan.n_third}) {
      if (n <= 0 || out.count(n)) continue;
      const NodeSeries ser = pair_average(series_of(n));
      out.emplace(n, transfer(ser.s, ser.value, grid, opts.transfer));
    }
    return out;
  };
  // f feeds g through 2n (f_n - f_hat), so it needs the 1/n^2 term removed as well
  auto combine = [&](const std::map<int, GridFn>& a_n, const char* name, double& increment,
                     bool three_level) {
    const GridFn& top = a_n.at(plan.n_max);
    if (plan.n_second == 0) {
      if (opts.extrapolation == Extrapolation::Richardson) {
        diag.warnings.push_back(fmt::format(
            "{}: no index <= {} available, using the n = {} approximant without extrapolation",
            name, plan.n_max / 2, plan.n_max));
      }
      return top;
    }
    const GridFn& second = a_n.at(plan.n_second);
    increment = (top - second).sup_norm_on(0.1 * pi, 0.9 * pi);
    if (plan.n_third > 0) {
      const double previous = (second - a_n.at(plan.n_third)).sup_norm_on(0.1 * pi, 0.9 * pi);
      if (increment > previous) {
        diag.warnings.push_back(fmt::format(
            "{}: approximants are not contracting (|a({}) - a({})| = {:.3g} > |a({}) - a({})| = "
            "{:.3g}); extrapolation may be ill-conditioned",
            name, plan.n_max, plan.n_second, increment, plan.n_second, plan.n_third, previous));
      }
    }
    if (three_level && plan.n_third > 0) {
      return richardson3(top, plan.n_max, second, plan.n_second, a_n.at(plan.n_third),
                         plan.n_third);
    }
    return richardson(top, plan.n_max, second, plan.n_second);
  };

  const auto f_n = per_index([&](int n) { return f_series(data, n); });
  GridFn f_hat = combine(f_n, "f", diag.f_increment, true);
  const double scale = std::pow(pi, 1.0 - a);
  const double theta_hat = scale * f_hat.front();
  const double beta_hat = scale * f_hat.back();

  // mu from f: f = (mu + theta) pi^(a-1) - (a s / pi)(theta - beta).
  const double c_hat = theta_hat - beta_hat;
  std::vector<double> mu(grid->size());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    mu[k] = scale * (f_hat[k] + a * grid->s(k) * c_hat / pi) - theta_hat;
  }
  GridFn mu_hat(grid, std::move(mu));

  const auto g_n =
      per_index([&](int n) { return g_series(data, n, theta_hat, beta_hat, mu_hat); });
  GridFn g_hat = combine(g_n, "g", diag.g_increment, false);

  return Limits{std::move(f_hat), std::move(g_hat), std::move(mu_hat), theta_hat, beta_hat,
                std::move(diag)};
}

GridFn recover_mu_derivative(const GridFn& f_hat, double theta_hat, double beta_hat) {
  const double a = f_hat.grid().alpha().value();
  const double scale = std::pow(pi, 1.0 - a);
  return scale * (frac_derivative(f_hat) + (a / pi) * (theta_hat - beta_hat));
}

GridFn recover_upsilon(const GridFn& g_hat, const GridFn& L, std::size_t* clamped) {
  const double a = g_hat.grid().alpha().value();
  const GridFn radicand = (1.0 / a) * frac_derivative(g_hat + a * L);
  std::size_t count = 0;
  GridFn out = radicand.map([&count](double v) {
    if (v < 0.0) {
      ++count;
      return 0.0;
    }
    return std::sqrt(v);
  });
  if (clamped) *clamped = count;
  return out;
}

PotentialPair recover_pr(const GridFn& dmu_hat, const GridFn& upsilon_hat) {
  return PotentialPair{upsilon_hat + dmu_hat, dmu_hat - upsilon_hat};
}

GridFn recover_L(const GridFn& g_hat, const GridFn& upsilon, double theta) {
  const double a = g_hat.grid().alpha().value();
  return frac_integral(upsilon * upsilon) + upsilon.front() * std::sin(2.0 * theta) -
         (1.0 / a) * g_hat;
}

ReconstructionResult reconstruct(const NodalDataset& data, const KnownData& known,
                                 const GridPtr& grid, const InverseOptions& opts) {
  data.validate();
  Limits lim = extract_limits(data, grid, opts);
  const GridFn f_used = smooth(lim.f_hat, opts.smoothing);
  const GridFn g_used = smooth(lim.g_hat, opts.smoothing);
  GridFn dmu = recover_mu_derivative(f_used, lim.theta_hat, lim.beta_hat);

  ReconstructionResult out{lim.theta_hat, lim.beta_hat, lim.f_hat, lim.g_hat, dmu,
                           GridFn(grid, 0.0), std::nullopt, std::nullopt, std::nullopt,
                           std::move(lim.diagnostics)};

  if (const auto* kl = std::get_if<KnownL>(&known)) {
    if (!kl->L.grid().same_as(*grid)) throw DomainError("known L is on a different grid");
    std::size_t clamped = 0;
    out.upsilon_abs_hat = recover_upsilon(g_used, kl->L, &clamped);
    out.diagnostics.clamped_radicands = clamped;
    if (clamped > 0) {
      out.diagnostics.warnings.push_back(
          fmt::format("upsilon: {} negative radicands clamped to zero", clamped));
    }
    PotentialPair pr = recover_pr(dmu, out.upsilon_abs_hat);
    out.p_hat = std::move(pr.p);
    out.r_hat = std::move(pr.r);
  } else {
    const auto& kp = std::get<KnownPotentials>(known);
    if (!kp.p.grid().same_as(*grid) || !kp.r.grid().same_as(*grid)) {
      throw DomainError("known potentials are on a different grid");
    }
    const GridFn ups = 0.5 * (kp.p - kp.r);
    out.upsilon_abs_hat = ups.map([](double v) { return std::abs(v); });
    out.L_hat = recover_L(g_used, ups, out.theta_hat);
  }
  return out;
}

}  // namespace fdirac
