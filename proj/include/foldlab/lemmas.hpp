#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace foldlab {

enum class LemmaMode { Envelope, Growth };
enum class LemmaVerdict { Holds, Fails, HypothesesViolated };

std::string lemma_verdict_name(LemmaVerdict v);

// f and its derivatives sampled on [0, l]; t must start at 0 and end at l.
// derivs[j][i] = f^{(j)}(t[i]).
struct LemmaSamples {
  double l = 1.0;
  std::vector<double> t;
  std::vector<std::vector<double>> derivs;
};

struct LemmaParams {
  std::vector<int> sigma;  // envelope: one sign; growth: k - 1 signs
  double epsilon = 0.0;
  double kappa = 0.0;
  int k = 1;
};

struct LemmaResult {
  LemmaVerdict verdict = LemmaVerdict::Holds;
  std::optional<double> witness;  // violating t on failure
  std::string detail;
};

// Envelope: sigma f' >= -eps on [0, l] implies
//   min(f(0), f(l)) - eps l <= f(t) <= max(f(0), f(l)) + eps l.
// Growth: sigma_j f^(j) >= -eps at both ends (j < k) and |f^(k)| >= kappa
// imply |f(l) - f(0)| >= kappa l^k / k! - (k - 1) eps l.
LemmaResult elementary_lemma_check(const LemmaSamples& samples, LemmaMode mode, const LemmaParams& params);

// Samples of the polynomial sum_i coeffs[i] t^i and its first `order` derivatives.
LemmaSamples sample_polynomial(const std::vector<double>& coeffs, double l, int order, std::size_t points);

struct LemmaSelfTest {
  std::size_t draws = 0;
  std::size_t satisfying = 0;  // instances meeting the hypotheses
  std::size_t holds = 0;
  std::size_t fails = 0;
  std::size_t violated = 0;    // flagged, not counted as failures
};

// Seeded random polynomial instances, a share of them built to violate the
// hypotheses, drawn until `satisfying_target` instances meet the hypotheses.
LemmaSelfTest lemma_self_test(LemmaMode mode, std::size_t satisfying_target, std::uint64_t seed);

}  // namespace foldlab
