#pragma once

// Large-lambda asymptotics of the solution, the characteristic function, the
// eigenvalues and the nodes, together with the nodal limit functions f and g.

#include <array>

#include "fdirac/conformable.hpp"
#include "fdirac/model.hpp"

namespace fdirac {

struct PotentialFunctionals {
  double alpha = 1.0;
  GridFn mu;              // (1/2) I_a(p + r)
  GridFn upsilon;         // (p - r)/2
  double upsilon0 = 0.0;  // upsilon(0)
  GridFn Kfn;             // I_a(M11(t,t) - M22(t,t))
  GridFn Lfn;             // I_a(M12(t,t) - M21(t,t))
  GridFn upsilon_sq_int;  // I_a(upsilon^2)
};

PotentialFunctionals potential_functionals(const Model& model);

/// Leading term plus every 1/(2 lambda) correction of (phi1, phi2)(x, lambda).
std::array<double, 2> phi_estimate(const PotentialFunctionals& fn, double theta, double lambda,
                                   double x);

/// Same expansion for Delta(lambda), at x = pi.
double delta_estimate(const PotentialFunctionals& fn, double theta, double beta, double lambda);

/// lambda_n to order 1 (n alpha pi^(1-alpha) + alpha (theta + mu(pi) - beta)/pi^alpha) or
/// order 2 (adds X/(2 n pi), X = -upsilon(pi) sin 2beta + upsilon(0) sin 2theta
/// + I_a(upsilon^2)(pi) - L(pi)). The 1/n coefficient comes from solving delta_estimate = 0.
double eigenvalue_estimate(const PotentialFunctionals& fn, double theta, double beta, int n,
                           int order);

/// Node x_n^j to O(1/n^2) in x^alpha, with mu, I_a(upsilon^2), L evaluated at the node
/// itself (fixed-point iteration started from the leading term).
double node_estimate(const PotentialFunctionals& fn, double theta, double beta, int n, int j);

/// f(x) = (mu(x) + theta) pi^(alpha-1) - (x^alpha/pi)(theta + mu(pi) - beta).
double f_exact(const PotentialFunctionals& fn, double theta, double beta, double x);

/// g(x) = alpha (upsilon(0) sin 2theta + I_a(upsilon^2)(x) - L(x)).
double g_exact(const PotentialFunctionals& fn, double theta, double x);

/// Actual n -> infinity limit of the g-approximant 2n^2(...) built from nodes, which keeps the
/// O(1/n^2) node terms that g_exact leaves out:
///   pi^(2a-2) Y/a - 2c (mu + theta) pi^(a-2) + 2 x^a ((c/pi)^2 - X/(2 a pi^(2-a)))
/// with c = theta + mu(pi) - beta, Y = g_exact/alpha and X as in eigenvalue_estimate.
double g_limit(const PotentialFunctionals& fn, double theta, double beta, double x);

}  // namespace fdirac
