#pragma once

// Reconstruction of theta, beta, D^alpha mu, |upsilon| and then (p, r) or L from nodal points.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fdirac/conformable.hpp"
#include "fdirac/forward.hpp"

namespace fdirac {

struct NodalDataset {
  AlphaOrder alpha{1.0};
  std::map<int, std::vector<double>> nodes;

  /// Largest stored index, 0 when empty.
  int n_max() const;
  /// Throws DomainError unless every list has n strictly increasing entries in (0, pi).
  void validate() const;

  /// Keeps the indices of a computed nodal set whose node count is right.
  static NodalDataset from_nodal_set(AlphaOrder alpha, const NodalSet& set);

  bool operator==(const NodalDataset& o) const {
    return alpha.value() == o.alpha.value() && nodes == o.nodes;
  }
};

/// n((x_n^j)^alpha - (j + 1/2) pi^alpha / n) at the node nearest to x (ties go to smaller j).
double approximant_f(const NodalDataset& data, double x, int n);

/// 2n^2((x_n^j)^alpha - (j+1/2)pi^alpha/n - (mu + theta)/(n pi^(1-alpha))
///      + ((j+1/2)pi^alpha/n)((theta - beta)/(n pi)))
/// at the node nearest to x, with mu = mu_at_node (mu(pi) = 0 assumed).
double approximant_g(const NodalDataset& data, double x, int n, double theta, double beta,
                     double mu_at_node);

enum class Extrapolation { Richardson, LargestN };
/// How per-index node values are carried onto the grid: cubic interpolation across the
/// node sequence, or the value at the nearest node.
enum class Transfer { Interpolate, Nearest };

struct InverseOptions {
  Extrapolation extrapolation = Extrapolation::Richardson;
  Transfer transfer = Transfer::Interpolate;
  /// Moving-average width applied to f_hat and g_hat before differentiation (<= 1: off).
  std::size_t smoothing = 0;
};

struct InverseDiagnostics {
  int n_max = 0;
  int n_second = 0;  // second index used by the extrapolation, 0 if none
  std::size_t clamped_radicands = 0;
  // sup over [0.1 pi, 0.9 pi] of |a(n_max) - a(n_second)| for the f- and g-approximants
  double f_increment = 0.0;
  double g_increment = 0.0;
  std::vector<std::string> warnings;
  /// Per-stage sup-norm errors against a known truth, filled by callers that have one.
  std::map<std::string, double> residuals;
};

struct Limits {
  GridFn f_hat;
  GridFn g_hat;
  GridFn mu_hat;
  double theta_hat;
  double beta_hat;
  InverseDiagnostics diagnostics;
};

/// f_hat, theta_hat, beta_hat, then mu_hat and g_hat on the given grid.
/// Throws InsufficientData when n_max < 16.
Limits extract_limits(const NodalDataset& data, const GridPtr& grid,
                      const InverseOptions& opts = {});

/// D^alpha mu = pi^(1-alpha) (D^alpha f + (alpha/pi)(theta - beta)), mu(pi) = 0.
GridFn recover_mu_derivative(const GridFn& f_hat, double theta_hat, double beta_hat);

/// |upsilon| = sqrt(max(0, D^alpha(g + alpha L)) / alpha). Negative radicands are clamped and
/// counted in *clamped when given.
GridFn recover_upsilon(const GridFn& g_hat, const GridFn& L, std::size_t* clamped = nullptr);

struct PotentialPair {
  GridFn p;
  GridFn r;
};

PotentialPair recover_pr(const GridFn& dmu_hat, const GridFn& upsilon_hat);

/// L = upsilon(0) sin 2theta + I_a(upsilon^2) - g/alpha.
GridFn recover_L(const GridFn& g_hat, const GridFn& upsilon, double theta);

struct KnownL {
  GridFn L;
};
struct KnownPotentials {
  GridFn p;
  GridFn r;
};
using KnownData = std::variant<KnownL, KnownPotentials>;

struct ReconstructionResult {
  double theta_hat = 0.0;
  double beta_hat = 0.0;
  GridFn f_hat;
  GridFn g_hat;
  GridFn dmu_hat;
  GridFn upsilon_abs_hat;
  std::optional<GridFn> p_hat;
  std::optional<GridFn> r_hat;
  std::optional<GridFn> L_hat;
  InverseDiagnostics diagnostics;
};

ReconstructionResult reconstruct(const NodalDataset& data, const KnownData& known,
                                 const GridPtr& grid, const InverseOptions& opts = {});

}  // namespace fdirac
