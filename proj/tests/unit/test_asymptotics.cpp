#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fdirac/asymptotics.hpp"
#include "fdirac/errors.hpp"
#include "fdirac/forward.hpp"
#include "reference.hpp"

using namespace fdirac;

namespace {

constexpr double pi = std::numbers::pi;

ModelSpec spec(double alpha, double theta, double beta, const std::string& p, const std::string& r) {
  ModelSpec s;
  s.alpha = alpha;
  s.theta = theta;
  s.beta = beta;
  s.p = p;
  s.r = r;
  return s;
}

}  // namespace

TEST(Functionals, ZeroPotential) {
  const Model m = Model::create(spec(0.5, 0, 0, "0", "0"), 257);
  const auto fn = potential_functionals(m);
  for (const GridFn* f : {&fn.mu, &fn.upsilon, &fn.Kfn, &fn.Lfn, &fn.upsilon_sq_int}) {
    EXPECT_EQ(f->sup_norm(), 0.0);
  }
  EXPECT_EQ(fn.upsilon0, 0.0);
}

TEST(Functionals, CosinePotentials) {
  const Model m = Model::create(spec(1.0, 0, 0, "cos(2*x)", "cos(2*x)"));
  const auto fn = potential_functionals(m);
  const GridFn mu = sample(m.grid_ptr(), [](double x) { return std::sin(2 * x) / 2; });
  EXPECT_LT((fn.mu - mu).sup_norm(), 1e-6);
  EXPECT_EQ(fn.upsilon.sup_norm(), 0.0);
  EXPECT_NEAR(fn.mu.back(), 0.0, 1e-6);
}

TEST(Functionals, DiagonalTraces) {
  ModelSpec s;
  s.m12 = "1";
  const Model m = Model::create(s);
  const auto fn = potential_functionals(m);
  EXPECT_LT((fn.Lfn - sample(m.grid_ptr(), [](double x) { return x; })).sup_norm(), 1e-12);
  EXPECT_EQ(fn.Kfn.sup_norm(), 0.0);
}

TEST(Functionals, Invariants) {
  ModelSpec s = spec(0.7, 0.1, 0.2, "sin(x) + x", "cos(x)");
  s.m11 = "x*t";
  s.m22 = "exp(-t)";
  s.m21 = "0.3";
  const Model m = Model::create(s, 1025);
  const auto fn = potential_functionals(m);
  EXPECT_EQ(fn.mu.front(), 0.0);
  EXPECT_EQ(fn.Kfn.front(), 0.0);
  EXPECT_EQ(fn.Lfn.front(), 0.0);
  EXPECT_EQ(fn.upsilon_sq_int.front(), 0.0);
  for (std::size_t k = 1; k < fn.upsilon_sq_int.size(); ++k) {
    ASSERT_GE(fn.upsilon_sq_int[k], fn.upsilon_sq_int[k - 1]);
  }
  // independent quadrature of the diagonal trace M11(t,t) - M22(t,t) = t^2 - e^-t in x
  const double a = 0.7;
  const double K_pi = reference::simpson(
      [a](double u) {
        // t = u^(1/a) removes the t^(a-1) weight: int t^(a-1) f dt = (1/a) int f(u^(1/a)) du
        const double t = std::pow(u, 1.0 / a);
        return (t * t - std::exp(-t)) / a;
      },
      0.0, std::pow(pi, a), 20000);
  EXPECT_NEAR(fn.Kfn.back(), K_pi, 2e-5);  // trapezoid, h^2 at 1025 points
}

TEST(PhiEstimate, ReducesToClosedForms) {
  const Model zero = Model::create(spec(0.5, 0, 0, "0", "0"), 513);
  const auto fz = potential_functionals(zero);
  for (double x : {0.3, 1.0, 2.9}) {
    const auto e = phi_estimate(fz, 0.2, 7.0, x);
    EXPECT_NEAR(e[0], std::cos(7.0 * reference::s_of_x(x, 0.5) - 0.2), 1e-12);
    EXPECT_NEAR(e[1], std::sin(7.0 * reference::s_of_x(x, 0.5) - 0.2), 1e-12);
  }
  const Model c = Model::create(spec(1.0, 0, 0, "0.4", "0.4"));
  const auto fc = potential_functionals(c);
  for (double x : {0.3, 1.0, 2.9}) {
    const auto e = phi_estimate(fc, 0.1, 9.0, x);
    EXPECT_NEAR(e[0], std::cos(9.0 * x - 0.4 * x - 0.1), 1e-10);
    EXPECT_NEAR(e[1], std::sin(9.0 * x - 0.4 * x - 0.1), 1e-10);
  }
}

TEST(PhiEstimate, RemainderShrinksFasterThanOneOverLambda) {
  const Model m = Model::create(spec(1.0, 0, 0, "sin(x)", "0"));
  const auto fn = potential_functionals(m);
  auto err = [&](double lam) {
    const SolutionTrace t = solve_phi(m, lam);
    const auto e = phi_estimate(fn, 0.0, lam, 2.0);
    return std::max(std::abs(e[0] - t.phi1.at_x(2.0)), std::abs(e[1] - t.phi2.at_x(2.0)));
  };
  const double C = err(20.0) * 400.0;
  EXPECT_LE(err(40.0), 2.0 * C / 1600.0);
  EXPECT_LE(err(80.0), 2.0 * C / 6400.0);
}

TEST(DeltaEstimate, Examples) {
  const Model zero = Model::create(spec(1.0, 0, 0, "0", "0"), 257);
  const auto fz = potential_functionals(zero);
  const Model zero_h = Model::create(spec(0.5, 0, 0, "0", "0"), 257);
  const auto fh = potential_functionals(zero_h);
  for (double lam : {1.3, 4.0, 17.5}) {
    EXPECT_NEAR(delta_estimate(fz, 0, 0, lam), std::sin(lam * pi), 1e-12);
    EXPECT_NEAR(delta_estimate(fz, 0, 0.4, lam), std::sin(lam * pi + 0.4), 1e-12);
    EXPECT_NEAR(delta_estimate(fh, 0, 0, lam), std::sin(lam * 2 * std::sqrt(pi)), 1e-12);
  }
}

TEST(DeltaEstimate, RemainderAgainstSolver) {
  const Model m = Model::create(spec(1.0, 0.3, 0.2, "sin(x)", "0"));
  const auto fn = potential_functionals(m);
  auto err = [&](double lam) { return std::abs(delta_estimate(fn, 0.3, 0.2, lam) - char_delta(m, lam)); };
  // off the eigenvalues: half-integer shifts
  const double C = err(20.25) * 20.25 * 20.25;
  EXPECT_LE(err(40.25), 2.0 * C / (40.25 * 40.25));
  std::vector<double> scaled;
  for (double lam : {10.25, 20.25, 40.25, 80.25}) scaled.push_back(lam * err(lam));
  for (double v : scaled) EXPECT_LT(v, 1.0);
}

TEST(EigenvalueEstimate, Examples) {
  const Model zero = Model::create(spec(0.5, 0, 0, "0", "0"), 257);
  EXPECT_NEAR(eigenvalue_estimate(potential_functionals(zero), 0, 0, 4, 1), 2 * std::sqrt(pi), 1e-12);
  const Model one = Model::create(spec(1.0, 0, 0, "0", "0"), 257);
  const auto f1 = potential_functionals(one);
  for (int n : {1, 7, 30}) {
    EXPECT_NEAR(eigenvalue_estimate(f1, 0.2, 0, n, 1), n + 0.2 / pi, 1e-12);
    EXPECT_NEAR(eigenvalue_estimate(f1, 0.2, 0, n, 2), n + 0.2 / pi, 1e-12);
  }
}

TEST(EigenvalueEstimate, ExactForConstantPotential) {
  for (double a : {0.5, 1.0}) {
    const Model m = Model::create(spec(a, 0.3, -0.1, "0.6", "0.6"));
    const auto fn = potential_functionals(m);
    for (int n : {1, 10, 40}) {
      EXPECT_NEAR(eigenvalue_estimate(fn, 0.3, -0.1, n, 2), reference::lambda_const(n, a, 0.3, -0.1, 0.6), 1e-6);
    }
  }
}

TEST(EigenvalueEstimate, ScaledResidualDecays) {
  for (double a : {0.5, 1.0}) {
    const Model m = Model::create(spec(a, 0, 0, "sin(x)", "0"));
    const auto fn = potential_functionals(m);
    const Spectrum s = find_eigenvalues(m, 1, 128);
    std::vector<double> scaled;
    for (int n : {8, 16, 32, 64, 128}) {
      scaled.push_back(n * std::abs(s.find(n)->lambda - eigenvalue_estimate(fn, 0, 0, n, 2)));
    }
    EXPECT_TRUE(reference::envelope_decreasing(scaled, 0.9, 3)) << "alpha " << a;
  }
}

TEST(NodeEstimate, Examples) {
  const Model zero = Model::create(spec(1.0, 0, 0, "0", "0"), 257);
  const auto fz = potential_functionals(zero);
  EXPECT_NEAR(node_estimate(fz, 0, 0, 5, 2), pi / 2, 1e-14);

  // theta = 0.2: the printed expansion, and the exact node (pi/2 + 0.2)/(10 + 0.2/pi)
  const double x = node_estimate(fz, 0.2, 0, 10, 0);
  const double expansion = pi / 20 + 0.2 / 10 - (pi / 20) * (0.2 / (10 * pi)) - 0.2 * 0.2 / (pi * 100);
  EXPECT_NEAR(x, expansion, 1e-5);
  EXPECT_NEAR(x, reference::node_const(10, 0, 1.0, 0.2, 0, 0), 1e-5);
  EXPECT_LT(std::abs(x - reference::node_const(10, 0, 1.0, 0.2, 0, 0)),
            std::abs(expansion - reference::node_const(10, 0, 1.0, 0.2, 0, 0)));
  EXPECT_THROW(node_estimate(fz, 0, 0, 5, 5), DomainError);
}

TEST(NodeEstimate, BoundedScaledResidualForCosinePotentials) {
  const Model m = Model::create(spec(1.0, 0, 0, "cos(2*x)", "cos(2*x)"));
  const auto fn = potential_functionals(m);
  const Spectrum s = find_eigenvalues(m, 10, 60);
  const NodalSet set = compute_nodal_set(m, s, 4);
  for (int n = 10; n <= 60; n += 10) {
    const auto& xs = set.nodes.at(n);
    const int j = static_cast<int>(std::lround(n / 2.0 - 0.5));
    EXPECT_LT(n * n * std::abs(xs[j] - node_estimate(fn, 0, 0, n, j)), 0.1) << n;
  }
}

TEST(NodeEstimate, ScaledResidualDecaysAtFixedPoint) {
  const Model m = Model::create(spec(1.0, 0.3, 0.1, "cos(2*x) + sin(x)", "cos(2*x) - sin(x)"));
  const auto fn = potential_functionals(m);
  const Spectrum s = find_eigenvalues(m, 16, 128);
  const NodalSet set = compute_nodal_set(m, s, 4);
  std::vector<double> scaled;
  for (int n : {16, 32, 64, 128}) {
    const auto& xs = set.nodes.at(n);
    std::size_t j = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      if (std::abs(xs[i] - 2.0) < std::abs(xs[j] - 2.0)) j = i;
    }
    scaled.push_back(n * n * std::abs(xs[j] - node_estimate(fn, 0.3, 0.1, n, static_cast<int>(j))));
  }
  EXPECT_TRUE(reference::envelope_decreasing(scaled, 0.9, 2));
  for (double v : scaled) EXPECT_LT(v, 10.0);
}

TEST(LimitFunctions, Examples) {
  const Model zero = Model::create(spec(1.0, 0, 0, "0", "0"), 257);
  const auto fz = potential_functionals(zero);
  for (double x : {0.0, 0.7, 2.0, pi}) {
    EXPECT_NEAR(f_exact(fz, 0.2, 0, x), 0.2 * (1 - x / pi), 1e-14);
    EXPECT_EQ(g_exact(fz, 0.0, x), 0.0);
  }
  const Model ups = Model::create(spec(1.0, 0, 0, "sin(x)", "-sin(x)"));
  const auto fu = potential_functionals(ups);
  for (double x : {0.5, 1.5, 3.0}) EXPECT_NEAR(g_exact(fu, 0, x), x / 2 - std::sin(2 * x) / 4, 1e-6);

  ModelSpec same = spec(1.0, 0, 0, "cos(x)", "cos(x)");
  same.m12 = "sin(x*t)";
  same.m21 = "sin(x*t)";
  const auto fs = potential_functionals(Model::create(same, 513));
  for (double x : {0.5, 1.5, 3.0}) EXPECT_NEAR(g_exact(fs, 0, x), 0.0, 1e-12);
}

TEST(LimitFunctions, EndpointValues) {
  const Model m = Model::create(spec(1.0, 0.25, -0.15, "cos(2*x) + 1", "cos(2*x) - 1"));
  const auto fn = potential_functionals(m);
  ASSERT_NEAR(fn.mu.back(), 0.0, 1e-6);
  EXPECT_NEAR(f_exact(fn, 0.25, -0.15, pi), -0.15, 1e-6);
  const Model h = Model::create(spec(0.5, 0.25, -0.15, "x", "1"));
  EXPECT_NEAR(f_exact(potential_functionals(h), 0.25, -0.15, 0.0), 0.25 / std::sqrt(pi), 1e-14);
}

TEST(LimitFunctions, IndependentOfK) {
  ModelSpec a = spec(0.8, 0.3, 0.1, "sin(x)", "x/4");
  ModelSpec b = a;
  b.m11 = "0.7*cos(t)";
  b.m22 = "0.7*cos(t)";
  ModelSpec c = a;
  c.m11 = "x - t";
  const auto fa = potential_functionals(Model::create(a, 1025));
  const auto fb = potential_functionals(Model::create(b, 1025));
  const auto fc = potential_functionals(Model::create(c, 1025));
  for (double x : {0.2, 1.1, 2.7}) {
    EXPECT_EQ(f_exact(fa, 0.3, 0.1, x), f_exact(fb, 0.3, 0.1, x));
    EXPECT_EQ(g_exact(fa, 0.3, x), g_exact(fb, 0.3, x));
    EXPECT_EQ(f_exact(fa, 0.3, 0.1, x), f_exact(fc, 0.3, 0.1, x));
    EXPECT_EQ(g_exact(fa, 0.3, x), g_exact(fc, 0.3, x));
  }
}
