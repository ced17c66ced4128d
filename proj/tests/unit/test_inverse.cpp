#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fdirac/asymptotics.hpp"
#include "fdirac/errors.hpp"
#include "fdirac/forward.hpp"
#include "fdirac/inverse.hpp"
#include "reference.hpp"

using namespace fdirac;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double lo = 0.1 * pi, hi = 0.9 * pi;

ModelSpec spec(double alpha, double theta, double beta, const std::string& p, const std::string& r) {
  ModelSpec s;
  s.alpha = alpha;
  s.theta = theta;
  s.beta = beta;
  s.p = p;
  s.r = r;
  return s;
}

NodalDataset solver_nodes(const Model& m, int n_lo, int n_hi) {
  const Spectrum s = find_eigenvalues(m, n_lo, n_hi, EigenOptions{1e-11, 1e-10, 4});
  return NodalDataset::from_nodal_set(m.alpha(), compute_nodal_set(m, s, 4));
}

// Nodes of the constant-potential problem, straight from the closed form.
NodalDataset closed_form_nodes(double alpha, double theta, double beta, double c, int n_lo, int n_hi) {
  NodalDataset d;
  d.alpha = AlphaOrder(alpha);
  for (int n = n_lo; n <= n_hi; ++n) {
    auto& xs = d.nodes[n];
    for (int j = 0; j < n; ++j) xs.push_back(reference::node_const(n, j, alpha, theta, beta, c));
  }
  return d;
}

GridFn on_grid(const GridPtr& g, const std::function<double(double)>& fn) {
  std::vector<double> v(g->size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(g->x(k));
  return GridFn(g, std::move(v));
}

}  // namespace

TEST(NodalDataset, Validation) {
  NodalDataset d = closed_form_nodes(1.0, 0, 0, 0, 1, 8);
  EXPECT_EQ(d.n_max(), 8);
  EXPECT_NO_THROW(d.validate());
  NodalDataset short_list = d;
  short_list.nodes[5].pop_back();
  EXPECT_THROW(short_list.validate(), DomainError);
  NodalDataset unsorted = d;
  std::swap(unsorted.nodes[4][0], unsorted.nodes[4][1]);
  EXPECT_THROW(unsorted.validate(), DomainError);
  NodalDataset outside = d;
  outside.nodes[3].back() = pi;
  EXPECT_THROW(outside.validate(), DomainError);
  EXPECT_EQ(NodalDataset{}.n_max(), 0);
}

TEST(NodalDataset, FromNodalSetDropsMiscounted) {
  NodalSet set;
  set.nodes[2] = {1.0, 2.0};
  set.nodes[3] = {0.5, 1.5};
  set.count_mismatch = {3};
  const NodalDataset d = NodalDataset::from_nodal_set(AlphaOrder(1.0), set);
  EXPECT_EQ(d.nodes.size(), 1u);
  EXPECT_TRUE(d.nodes.count(2));
}

TEST(ApproximantF, ZeroPotential) {
  const NodalDataset d = closed_form_nodes(1.0, 0, 0, 0, 1, 40);
  for (int n : {5, 17, 40}) {
    for (double x : {0.2, 1.0, 3.0}) EXPECT_NEAR(approximant_f(d, x, n), 0.0, 1e-12);
  }
  EXPECT_THROW(approximant_f(d, 1.0, 41), DomainError);
}

TEST(ApproximantF, BoundaryAngleShift) {
  const NodalDataset d = closed_form_nodes(1.0, 0.2, 0, 0, 1, 256);
  std::vector<double> err;
  for (int n : {16, 32, 64, 128, 256}) err.push_back(std::abs(approximant_f(d, pi / 2, n) - 0.1));
  EXPECT_LT(err.back(), 5e-3);
  // node-selection jitter is O(1/n) as well; the trend is what matters
  EXPECT_TRUE(reference::envelope_decreasing(err, 0.9, 3));
}

TEST(ApproximantF, ConvergesToLimitOnSolverNodes) {
  const Model m = Model::create(spec(1.0, 0, 0, "cos(2*x)", "cos(2*x)"));
  const auto fn = potential_functionals(m);
  const NodalDataset d = solver_nodes(m, 16, 64);
  std::vector<double> err;
  for (int n : {16, 32, 64}) err.push_back(std::abs(approximant_f(d, pi / 2, n) - f_exact(fn, 0, 0, pi / 2)));
  for (std::size_t i = 0; i < err.size(); ++i) EXPECT_LT(err[i] * (16 << i), 2.0);
  EXPECT_LT(err.back(), 0.03);
}

TEST(ApproximantG, VanishesWithoutPotential) {
  const NodalDataset d = closed_form_nodes(1.0, 0, 0, 0, 1, 32);
  for (int n : {8, 32}) {
    for (double x : {0.4, 2.2}) EXPECT_NEAR(approximant_g(d, x, n, 0, 0, 0), 0.0, 1e-10);
  }
}

TEST(ApproximantG, CosinePotentialsConvergeToZero) {
  // upsilon = 0, L = 0, theta = 0: both the formula and the nodal limit vanish
  const Model m = Model::create(spec(1.0, 0, 0, "cos(2*x)", "cos(2*x)"));
  const auto fn = potential_functionals(m);
  const NodalDataset d = solver_nodes(m, 64, 64);
  const double x = 1.3;
  const auto& xs = d.nodes.at(64);
  const double node = *std::min_element(xs.begin(), xs.end(), [x](double u, double v) {
    return std::abs(u - x) < std::abs(v - x);
  });
  // mu must be taken at the node: the approximant scales by n^2
  const double mu_node = fn.mu.at_x(node);
  EXPECT_NEAR(approximant_g(d, x, 64, 0, 0, mu_node), g_limit(fn, 0, 0, x), 2e-2);
  EXPECT_NEAR(g_exact(fn, 0, x), 0.0, 1e-12);
}

TEST(ApproximantG, ConvergesToNodalLimitNotToTheFormula) {
  // upsilon = sin x: the O(1/n^2) node terms carry a -x I(upsilon^2)(pi)/pi part into the
  // limit; at x = pi/2 it cancels I(upsilon^2)(pi/2) = pi/4 exactly.
  const Model m = Model::create(spec(1.0, 0, 0, "sin(x)", "-sin(x)"));
  const auto fn = potential_functionals(m);
  const NodalDataset d = solver_nodes(m, 16, 128);
  EXPECT_NEAR(g_limit(fn, 0, 0, pi / 2), 0.0, 1e-6);
  EXPECT_NEAR(g_exact(fn, 0, pi / 2), pi / 4, 1e-6);
  std::vector<double> err;
  for (int n : {16, 32, 64, 128}) {
    const auto& xs = d.nodes.at(n);
    const double node = xs[static_cast<std::size_t>(n / 2)];
    err.push_back(std::abs(approximant_g(d, pi / 2, n, 0, 0, fn.mu.at_x(node)) - g_limit(fn, 0, 0, pi / 2)));
  }
  EXPECT_LT(err.back(), 0.05);
  EXPECT_TRUE(reference::envelope_decreasing(err, 0.9, 2));
}

TEST(ExtractLimits, ZeroPotential) {
  const Model m = Model::create(spec(1.0, 0, 0, "0", "0"));
  const Limits lim = extract_limits(solver_nodes(m, 16, 64), m.grid_ptr());
  EXPECT_NEAR(lim.theta_hat, 0.0, 1e-6);
  EXPECT_NEAR(lim.beta_hat, 0.0, 1e-6);
  EXPECT_LT(lim.f_hat.sup_norm(), 1e-6);
  EXPECT_LT(lim.g_hat.sup_norm(), 1e-6);
  EXPECT_EQ(lim.diagnostics.n_max, 64);
  EXPECT_EQ(lim.diagnostics.n_second, 32);
}

TEST(ExtractLimits, BoundaryAngles) {
  {
    const Model m = Model::create(spec(1.0, 0.2, 0.1, "0", "0"));
    const Limits lim = extract_limits(solver_nodes(m, 16, 64), m.grid_ptr());
    EXPECT_NEAR(lim.theta_hat, 0.2, 2e-3);
    EXPECT_NEAR(lim.beta_hat, 0.1, 2e-3);
  }
  {
    const Model m = Model::create(spec(0.5, 0.3, 0, "0", "0"));
    const Limits lim = extract_limits(solver_nodes(m, 16, 64), m.grid_ptr());
    EXPECT_NEAR(lim.theta_hat, 0.3, 5e-3);
    EXPECT_NEAR(std::sqrt(pi) * lim.f_hat.front(), lim.theta_hat, 1e-12);
  }
}

TEST(ExtractLimits, InsufficientData) {
  const NodalDataset d = closed_form_nodes(1.0, 0, 0, 0, 1, 15);
  const GridPtr g = SGrid::make(AlphaOrder(1.0), 257);
  EXPECT_THROW(extract_limits(d, g), InsufficientData);
  EXPECT_NO_THROW(extract_limits(closed_form_nodes(1.0, 0, 0, 0, 1, 16), g));
  EXPECT_THROW(extract_limits(d, SGrid::make(AlphaOrder(0.5), 257)), DomainError);
}

TEST(ExtractLimits, RichardsonBeatsTheLargestIndex) {
  const Model m = Model::create(spec(1.0, 0.2, -0.1, "cos(2*x) + sin(x)", "cos(2*x) - sin(x)"));
  const auto fn = potential_functionals(m);
  const NodalDataset d = solver_nodes(m, 16, 64);
  const GridFn f_true = on_grid(m.grid_ptr(), [&](double x) { return f_exact(fn, 0.2, -0.1, x); });
  InverseOptions largest;
  largest.extrapolation = Extrapolation::LargestN;
  const double e_rich = (extract_limits(d, m.grid_ptr()).f_hat - f_true).sup_norm_on(lo, hi);
  const double e_raw = (extract_limits(d, m.grid_ptr(), largest).f_hat - f_true).sup_norm_on(lo, hi);
  EXPECT_LT(e_rich, e_raw);
  EXPECT_LT(e_rich, 1e-3);
}

TEST(RecoverMu, Examples) {
  const GridPtr g = SGrid::make(AlphaOrder(1.0));
  EXPECT_LT(recover_mu_derivative(GridFn(g, 0.0), 0, 0).sup_norm(), 1e-15);

  const Model cosm = Model::create(spec(1.0, 0, 0, "cos(2*x)", "cos(2*x)"));
  const Limits l1 = extract_limits(solver_nodes(cosm, 16, 64), cosm.grid_ptr());
  const GridFn dmu = recover_mu_derivative(l1.f_hat, l1.theta_hat, l1.beta_hat);
  EXPECT_LT((dmu - cosm.p()).sup_norm_on(lo, hi), 5e-3);

  const Model ang = Model::create(spec(1.0, 0.2, 0.1, "0", "0"));
  const Limits l2 = extract_limits(solver_nodes(ang, 16, 64), ang.grid_ptr());
  EXPECT_LT(recover_mu_derivative(l2.f_hat, l2.theta_hat, l2.beta_hat).sup_norm_on(lo, hi), 5e-3);
}

TEST(RecoverUpsilon, Examples) {
  const GridPtr g = SGrid::make(AlphaOrder(1.0));
  EXPECT_EQ(recover_upsilon(GridFn(g, 0.0), GridFn(g, 0.0)).sup_norm(), 0.0);

  const Model m = Model::create(spec(1.0, 0, 0, "sin(x)", "-sin(x)"));
  const auto fn = potential_functionals(m);
  const GridFn ge = on_grid(m.grid_ptr(), [&](double x) { return g_exact(fn, 0, x); });
  const GridFn ups = recover_upsilon(ge, fn.Lfn);
  EXPECT_LT((ups - fn.upsilon).sup_norm_on(lo, hi), 1e-6);
}

TEST(RecoverUpsilon, NodalDataSeeUpsilonSquaredLessItsMean) {
  // With theta = beta = 0 and L = 0 the nodal limit differentiates to upsilon^2 - mean(upsilon^2).
  // For upsilon = sin x: sin^2 x - 1/2, positive on (pi/4, 3pi/4) and clamped elsewhere.
  const Model m = Model::create(spec(1.0, 0, 0, "sin(x)", "-sin(x)"));
  const ReconstructionResult res = reconstruct(solver_nodes(m, 16, 64), KnownL{GridFn(m.grid_ptr(), 0.0)}, m.grid_ptr());
  const GridFn expect = on_grid(m.grid_ptr(), [](double x) {
    return std::sqrt(std::max(0.0, std::sin(x) * std::sin(x) - 0.5));
  });
  EXPECT_LT((res.upsilon_abs_hat - expect).sup_norm_on(0.3 * pi, 0.7 * pi), 0.1);
  EXPECT_GT(res.diagnostics.clamped_radicands, 0u);
  for (double v : res.upsilon_abs_hat.values()) ASSERT_GE(v, 0.0);
}

TEST(RecoverPr, Examples) {
  const GridPtr g = SGrid::make(AlphaOrder(1.0), 513);
  const GridFn c2 = on_grid(g, [](double x) { return std::cos(2 * x); });
  const GridFn sn = on_grid(g, [](double x) { return std::sin(x); });
  const PotentialPair a = recover_pr(c2, GridFn(g, 0.0));
  EXPECT_EQ((a.p - c2).sup_norm(), 0.0);
  EXPECT_EQ((a.r - c2).sup_norm(), 0.0);
  const PotentialPair b = recover_pr(GridFn(g, 0.0), sn);
  EXPECT_EQ((b.p - sn).sup_norm(), 0.0);
  EXPECT_EQ((b.r + sn).sup_norm(), 0.0);
}

TEST(RecoverL, Examples) {
  const GridPtr g = SGrid::make(AlphaOrder(1.0));
  EXPECT_EQ(recover_L(GridFn(g, 0.0), GridFn(g, 0.0), 0).sup_norm(), 0.0);

  ModelSpec s = spec(1.0, 0, 0, "sin(x)", "-sin(x)");
  s.m12 = "0.25";
  const Model m = Model::create(s);
  const auto fn = potential_functionals(m);
  const GridFn ge = on_grid(m.grid_ptr(), [&](double x) { return g_exact(fn, 0, x); });
  const GridFn L = recover_L(ge, fn.upsilon, 0);
  EXPECT_LT((L - on_grid(m.grid_ptr(), [](double x) { return x / 4; })).sup_norm(), 1e-6);
}

TEST(RecoverL, NodalDataGiveTheNodalLimit) {
  // p = r = 0, M12 = 1: the nodal limit carries -x (c/pi)^2-type terms; with c = 0 it is
  // g_exact - x X/pi where X = -L(pi), so L_hat = x - x = 0 rather than x.
  ModelSpec s = spec(1.0, 0, 0, "0", "0");
  s.m12 = "1";
  const Model m = Model::create(s);
  const auto fn = potential_functionals(m);
  const ReconstructionResult res =
      reconstruct(solver_nodes(m, 16, 64), KnownPotentials{m.p(), m.r()}, m.grid_ptr());
  ASSERT_TRUE(res.L_hat);
  EXPECT_FALSE(res.p_hat);
  const GridFn gl = on_grid(m.grid_ptr(), [&](double x) { return g_limit(fn, 0, 0, x); });
  EXPECT_LT((*res.L_hat - recover_L(gl, fn.upsilon, 0)).sup_norm_on(lo, hi), 2e-2);
  EXPECT_LT(res.L_hat->sup_norm_on(lo, hi), 2e-2);
}

TEST(Identities, BoundaryAnglesFromExactF) {
  for (double a : {0.5, 0.8, 1.0}) {
    const Model m = Model::create(spec(a, 0.35, -0.25, "0", "0"));
    const auto fn = potential_functionals(m);
    const double scale = std::pow(pi, 1 - a);
    EXPECT_NEAR(scale * f_exact(fn, 0.35, -0.25, 0.0), 0.35, 1e-10);
    EXPECT_NEAR(scale * f_exact(fn, 0.35, -0.25, pi), -0.25, 1e-10);
  }
}

TEST(Identities, ExactLimitsInvertToPotentials) {
  for (double a : {0.5, 1.0}) {
    const Model m = Model::create(spec(a, 0.2, 0.1, "cos(2*x) + sin(x)", "cos(2*x) - sin(x)"));
    const auto fn = potential_functionals(m);
    // mu(pi) = 0 only at alpha = 1; f_exact keeps mu(pi) in its slope either way
    const double beta_eff = 0.1 - fn.mu.back();
    const GridFn fe = on_grid(m.grid_ptr(), [&](double x) { return f_exact(fn, 0.2, 0.1, x); });
    const GridFn ge = on_grid(m.grid_ptr(), [&](double x) { return g_exact(fn, 0.2, x); });
    const GridFn dmu = recover_mu_derivative(fe, 0.2, beta_eff);
    const GridFn ups = recover_upsilon(ge, fn.Lfn);
    const PotentialPair pr = recover_pr(dmu, ups);
    // one numerical derivative of f on the grid
    EXPECT_LT((pr.p - m.p()).sup_norm_on(lo, hi), 1e-5) << a;
    EXPECT_LT((pr.r - m.r()).sup_norm_on(lo, hi), 1e-5) << a;
  }
}

TEST(Reconstruct, ZeroPotential) {
  const Model m = Model::create(spec(1.0, 0, 0, "0", "0"));
  const ReconstructionResult res =
      reconstruct(solver_nodes(m, 16, 64), KnownL{GridFn(m.grid_ptr(), 0.0)}, m.grid_ptr());
  ASSERT_TRUE(res.p_hat && res.r_hat);
  EXPECT_FALSE(res.L_hat);
  EXPECT_NEAR(res.theta_hat, 0.0, 1e-6);
  EXPECT_NEAR(res.beta_hat, 0.0, 1e-6);
  EXPECT_LT(res.p_hat->sup_norm_on(lo, hi), 1e-4);
  EXPECT_LT(res.r_hat->sup_norm_on(lo, hi), 1e-4);
}

TEST(Reconstruct, Deterministic) {
  const Model m = Model::create(spec(1.0, 0.1, 0, "cos(2*x) + sin(x)", "cos(2*x) - sin(x)"), 1025);
  const NodalDataset d = solver_nodes(m, 16, 48);
  const KnownL known{GridFn(m.grid_ptr(), 0.0)};
  const ReconstructionResult a = reconstruct(d, known, m.grid_ptr());
  const ReconstructionResult b = reconstruct(d, known, m.grid_ptr());
  EXPECT_EQ(a.theta_hat, b.theta_hat);
  EXPECT_EQ(a.beta_hat, b.beta_hat);
  EXPECT_EQ((*a.p_hat - *b.p_hat).sup_norm(), 0.0);
  EXPECT_EQ((a.g_hat - b.g_hat).sup_norm(), 0.0);
}

TEST(Reconstruct, RejectsMismatchedGrids) {
  const Model m = Model::create(spec(1.0, 0, 0, "0", "0"), 513);
  const NodalDataset d = closed_form_nodes(1.0, 0, 0, 0, 1, 32);
  const GridPtr other = SGrid::make(AlphaOrder(1.0), 257);
  EXPECT_THROW(reconstruct(d, KnownL{GridFn(other, 0.0)}, m.grid_ptr()), DomainError);
}
