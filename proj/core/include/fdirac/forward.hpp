#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "fdirac/conformable.hpp"
#include "fdirac/model.hpp"

namespace fdirac {

/// Solution phi(x, lambda) of the initial value problem phi(0) = (cos theta, -sin theta),
/// with s-derivatives (= D^alpha phi).
struct SolutionTrace {
  double lambda;
  GridFn phi1, phi2;
  GridFn dphi1, dphi2;
};

/// Fixed-step RK4 on the s-grid. The free rotation exp(lambda s J) is factored out
/// exactly and RK4 integrates the slowly varying co-rotating amplitude; the Volterra
/// memory term is a trapezoid sum over the accepted history plus a stage-dependent
/// trapezoid over the current (half) step. Throws SolverError on a non-finite state.
SolutionTrace solve_phi(const Model& model, double lambda);

/// (phi1(pi), phi2(pi)) without keeping the trace.
std::array<double, 2> solve_endpoint(const Model& model, double lambda);

/// Successive approximations of the Volterra integral equations: phi = sum of increments,
/// each increment obtained from the previous one by nested alpha-quadratures against
/// sin/cos(lambda (x^a - t^a)/a). Independent of solve_phi; used as its oracle.
/// Throws SolverError when the last increment is larger than 1e-8 (1 + max|phi|).
SolutionTrace picard_solve(const Model& model, double lambda, int iterations);

/// Characteristic function phi1(pi) sin(beta) + phi2(pi) cos(beta).
double char_delta(const Model& model, double lambda);

struct SpectrumEntry {
  int n;
  double lambda;
  double delta_residual;  ///< |Delta(lambda_n)|
  double delta_scale;     ///< max |Delta| at the ends of the initial bracket
};

struct SpectrumFailure {
  int n;
  std::string reason;
};

struct Spectrum {
  std::vector<SpectrumEntry> entries;     ///< sorted by n
  std::vector<SpectrumFailure> failures;  ///< indices whose root could not be bracketed

  const SpectrumEntry* find(int n) const;
};

struct EigenOptions {
  double lambda_tol = 1e-11;
  double delta_tol = 1e-10;
  std::size_t jobs = 1;
};

/// Eigenvalues lambda_n for n in [n_lo, n_hi], seeded from the two leading terms of the
/// eigenvalue asymptotics and refined by an Illinois/bisection hybrid on Delta.
/// Per-index failures are collected in Spectrum::failures; roots shared by two
/// indices raise SolverError.
Spectrum find_eigenvalues(const Model& model, int n_lo, int n_hi, const EigenOptions& opts = {});

/// Zeros of phi1(., lambda_n) in the open interval (0, pi), ascending.
std::vector<double> find_nodes(const Model& model, const SpectrumEntry& entry,
                               const SolutionTrace& trace);

/// Nodes for every entry of a spectrum.
struct NodalSet {
  std::map<int, std::vector<double>> nodes;
  /// Indices whose node count differs from n.
  std::vector<int> count_mismatch;
  /// Smallest n such that every computed index >= n has exactly n nodes (0 if none).
  int n_min = 0;
};

NodalSet compute_nodal_set(const Model& model, const Spectrum& spectrum, std::size_t jobs = 1);

}  // namespace fdirac
