#pragma once

#include <optional>
#include <string>
#include <vector>

#include "foldlab/decomposition.hpp"
#include "foldlab/fit.hpp"
#include "foldlab/norm.hpp"

namespace foldlab {

enum class Verdict { Pass, Fail, Inconclusive };

std::string verdict_name(Verdict v);
// Fail dominates Inconclusive, which dominates Pass.
Verdict combine(Verdict a, Verdict b);

// n/2 - k / (2(2k + 1))
double predicted_exponent(int n, int k);
// From the two projection types: n/2 when h never vanishes, the one-sided
// prediction when one side is a fold, nothing otherwise.
std::optional<double> predicted_exponent(int n, int k_left, int k_right);

struct DecayPoint {
  double lambda = 0.0;
  double norm = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::size_t grid_x = 0;
  std::size_t grid_theta = 0;
  bool stable = false;
};

struct DecayFit {
  std::vector<DecayPoint> points;
  std::optional<PowerLawFit> fit;  // over stable points
  std::optional<double> predicted_d;
  double tolerance = 0.05;
  bool monotone = false;  // norms non-increasing within 5%
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

// Ascending positive list with a constant ratio.
void check_geometric(const std::vector<double>& lambdas);

// Turns measured points into a fit and verdict.
DecayFit fit_decay(std::vector<DecayPoint> points, std::optional<double> predicted_d, double tolerance);

DecayFit decay_sweep(const PolynomialPhase& phase, const Amplitude& amplitude, const std::vector<double>& lambdas,
                     const RefineOptions& opts, std::optional<double> predicted_d, double tolerance);

enum class ComponentWhich { Shell, NearCritical };

std::string component_which_name(ComponentWhich w);
std::optional<ComponentWhich> parse_component_which(const std::string& name);

struct ComponentRow {
  double lambda = 0.0;
  int hbar_exp = 0;
  ComponentKind kind = ComponentKind::DyadicShell;
  std::string sigma;  // "+" / "-" for shells, sign pattern for sigma pieces
  double norm = 0.0;
  double bound = 0.0;  // calibrated bound shape
  double ratio = 0.0;  // norm / bound
  bool skipped = false;
  bool stable = false;
};

struct SeriesFit {
  std::string series;
  LinearFit fit;  // log norm against log hbar
};

struct ComponentSweep {
  ComponentWhich which = ComponentWhich::Shell;
  std::vector<ComponentRow> rows;
  std::vector<SeriesFit> slopes;
  double factor = 10.0;
  double max_ratio = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

// Bound shapes: shells lambda^{-n/2} hbar^{-1/2}, near-critical
// lambda^{-(n-1)/2} hbar^{1/2 + 1/(2k)}.
double component_shape(ComponentWhich which, int n, int k, double lambda, double hbar);

// Dyadic exponents N with hbar_star(lambda, k) <= 2^{-N} <= 1/2.
std::vector<int> admissible_hbar_exps(double lambda, int k);

// True when the component's cutoff vanishes at every sample of the support.
bool component_empty(const DecompositionContext& ctx, const ComponentDescriptor& d);

// Norms of each component; the shape constant is calibrated per series at
// the largest hbar and every ratio must stay at or below `factor`.
ComponentSweep component_sweep(const DecompositionContext& ctx, const TensorBump& base, double lambda,
                               const std::vector<int>& hbar_exps, ComponentWhich which, const RefineOptions& opts,
                               double factor = 10.0);

struct OrthogonalityRow {
  int separation = 0;
  std::size_t pairs = 0;
  double tt_star = 0.0;  // max |tau_X tau_Y^*|
  double tstar_t = 0.0;  // max |tau_X^* tau_Y|
};

struct OrthogonalityProbe {
  int hbar_exp = 0;
  std::vector<int> sigma;
  std::vector<long> theta;
  std::vector<std::vector<long>> xs;  // nonempty pieces
  double tau = 0.0;                   // max |tau_X|
  std::vector<OrthogonalityRow> rows;
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
};

// Pieces of the near-critical (sigma) component at a fixed Theta, localized
// at X on the scale hbar^{1/k}; dense norms of pairwise products.
OrthogonalityProbe orthogonality_probe(const DecompositionContext& ctx, const TensorBump& base, double lambda,
                                       int hbar_exp, const std::vector<int>& sigma, const std::vector<long>& theta,
                                       int max_separation, const DiscretizationPolicy& policy);

// Largest singular value of a small dense matrix.
double dense_norm(const CMatrix& m);

}  // namespace foldlab
