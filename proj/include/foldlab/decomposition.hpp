#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "foldlab/amplitude.hpp"
#include "foldlab/cutoffs.hpp"
#include "foldlab/operator.hpp"
#include "foldlab/phase.hpp"
#include "foldlab/singularity.hpp"

namespace foldlab {

enum class ComponentKind { DyadicShell, NearCritical, SigmaRefined, LatticePiece };

std::string component_kind_name(ComponentKind kind);
std::optional<ComponentKind> parse_component_kind(const std::string& name);

struct LatticeIndex {
  std::vector<long> theta;            // Theta in Z^n
  std::optional<std::vector<long>> x;  // X in Z^n, or no x-localization
};

// hbar = 2^{-hbar_exp}. sign selects the base cutoff: +1/-1 is the shell
// beta(+-h/hbar), 0 the near-critical beta_bar(h/hbar). sigma has length k-1
// for sigma-refined and lattice pieces.
struct ComponentDescriptor {
  ComponentKind kind = ComponentKind::DyadicShell;
  int hbar_exp = 0;
  int sign = 1;
  std::vector<int> sigma;
  std::optional<LatticeIndex> lattice;

  double hbar() const;
  std::string label() const;
};

// Everything the factors depend on besides the descriptor.
struct DecompositionContext {
  PhaseCalculusPtr calc;
  ProjectionSide side = ProjectionSide::Right;
  int k = 1;                       // type of the side over the support
  Box support;                     // amplitude support
  double D = 1.0;                  // 2 x sampled sup |h| over the support
  std::optional<CoordinateSplit> split;
  CutoffFamily cutoffs;

  // Exact polynomial K^j h when the kernel field is constant on the support.
  std::vector<PolynomialPhase> kernel_powers;

  double kernel_derivative(std::span<const double> p, int j) const;
};

// Builds the context: samples D, fixes the coordinate split and, when the
// kernel field has constant coefficients, the exact polynomials K^j h.
DecompositionContext make_context(PhaseCalculusPtr calc, const TensorBump& base, int k,
                                  ProjectionSide side = ProjectionSide::Right);

// lambda^{-k/(2k+1)}
double hbar_star(double lambda, int k);
// Largest N with 2^{-N} >= hbar_star(lambda, k).
int crossover_exp(double lambda, int k);
// Smallest shell exponent: 2^{-N} covers every |h| on the support.
int coarsest_shell_exp(const DecompositionContext& ctx);

void validate_descriptor(const DecompositionContext& ctx, const ComponentDescriptor& d);

// Product of cutoffs multiplying psi for this component.
AmplitudeFactor amplitude_factor(const DecompositionContext& ctx, const ComponentDescriptor& d);

// Shells N in [coarsest, No) of both signs plus the near-critical piece at
// No; the near-critical piece is split into its 2^{k-1} sigma pieces when
// refine_sigma is set.
std::vector<ComponentDescriptor> decompose(const DecompositionContext& ctx, int hbar_o_exp, bool refine_sigma = false);

// Theta lattice points whose pieces can touch the support.
std::vector<std::vector<long>> lattice_points(const DecompositionContext& ctx, int hbar_exp);

// Splits a shell or sigma-refined piece into its Theta lattice pieces.
std::vector<ComponentDescriptor> lattice_refine(const DecompositionContext& ctx, const ComponentDescriptor& d);

// max over seeded probes of |T u - sum_c T_c u| / |T u|.
double reconstruct_check(const DiscreteOperator& op, const DecompositionContext& ctx,
                         const std::vector<ComponentDescriptor>& components, int probes, std::uint64_t seed);
double reconstruct_check(const DiscreteOperator& op, const DecompositionContext& ctx, int hbar_o_exp, int probes,
                         std::uint64_t seed);

struct ConvexityResult {
  bool no_samples = false;
  std::size_t pairs = 0;
  double min_ratio = 0.0;   // min |S_t(x,t) - S_t(y,t)| / (hbar |x - y|)
  double min_h_over_hbar = 0.0;  // min sign h / hbar along the segments
  bool lemma2_holds = false;     // min_h_over_hbar >= 1/4
};

// Stratified seeded pairs on the support of a sigma-refined shell piece with
// segment length <= max_length in (eta', x_n) coordinates.
ConvexityResult verify_convexity(const DecompositionContext& ctx, const ComponentDescriptor& d, std::size_t pairs,
                                 std::uint64_t seed, double max_length = 1.0 / 12.0);

struct Lemma1Result {
  double lhs = 0.0;  // finite-difference (d/dx_n at fixed eta') eta_n
  double rhs = 0.0;  // h / det S_x't'
  double rel_error = 0.0;
  CoordinateSplit split;
};

Lemma1Result verify_lemma1(const PhaseCalculus& calc, std::span<const double> point, double fd_step = 1e-4);

}  // namespace foldlab
