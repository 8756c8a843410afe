#pragma once

// Photon-number distributions of a single-mode SPDC source (geometric) and of
// a weak coherent state (Poisson), their moments, and the series truncation
// policy shared by every module that sums over photon number.

#include <cstdint>
#include <functional>

namespace spdc {

/// Default bound on the geometric tail mass x^(n_max+1) left out of a sum.
inline constexpr double kDefaultTruncationEpsilon = 1e-12;

/// Relative tolerance used when a closed form is checked against its series.
inline constexpr double kSeriesAgreementEpsilon = 1e-10;

/// Hard cap on the number of terms any photon-number series may use.
inline constexpr int kMaxTruncationOrder = 10000;

/// Per-pulse pair-emission parameter x = p * tau = gamma^2, 0 <= x < 1.
class EmissionProbability {
 public:
  /// Throws DomainError unless 0 <= x < 1. x >= 1 is never clamped.
  explicit EmissionProbability(double x);

  /// x = power * tau. Power in mW and tau in 1/mW, as tabulated for the
  /// 76 MHz source.
  static EmissionProbability from_pump(double power_mw, double tau_per_mw);

  [[nodiscard]] double value() const noexcept { return x_; }
  [[nodiscard]] double gamma() const noexcept;

 private:
  double x_;
};

/// Pr(n) = (1 - x) x^n.
[[nodiscard]] double pair_probability(int n, EmissionProbability x);

/// Mean pairs per pulse x / (1 - x). Also the mean photon number of either
/// the signal or the idler mode alone.
[[nodiscard]] double mean_pairs_per_pulse(EmissionProbability x);

/// Same quantity from the truncated series sum n Pr(n).
[[nodiscard]] double mean_pairs_per_pulse_series(
    EmissionProbability x, double epsilon = kDefaultTruncationEpsilon);

/// All-pair generation rate f x / (1 - x), pairs per second.
[[nodiscard]] double pair_rate(double rep_rate_hz, EmissionProbability x);

/// One-pair generation rate f (1 - x) x, pairs per second.
[[nodiscard]] double one_pair_rate(double rep_rate_hz, EmissionProbability x);

/// Smallest n_max >= 1 with x^(n_max+1) <= epsilon. Throws ResourceError
/// when n_max would exceed kMaxTruncationOrder.
[[nodiscard]] int truncation_order(EmissionProbability x,
                                   double epsilon = kDefaultTruncationEpsilon);

/// Geometric pair distribution truncated at n_max with its exact tail mass.
struct PairDistribution {
  EmissionProbability x;
  int n_max;
  double tail_mass;  ///< x^(n_max+1), the probability beyond n_max

  static PairDistribution truncated(EmissionProbability x,
                                    double epsilon = kDefaultTruncationEpsilon);

  [[nodiscard]] double probability(int n) const { return pair_probability(n, x); }
};

/// e^-nu nu^n / n!, evaluated in log space.
[[nodiscard]] double poisson_probability(int n, double mean);

/// Poisson photon-number law of a coherent state.
struct CoherentDistribution {
  double mean;

  /// Throws DomainError for a negative or non-finite mean.
  explicit CoherentDistribution(double nu);

  [[nodiscard]] double probability(int n) const { return poisson_probability(n, mean); }

  /// Smallest n_max whose upper tail P(N > n_max) is bounded by epsilon.
  [[nodiscard]] int truncation_order(double epsilon = kDefaultTruncationEpsilon) const;
};

/// Sums sum_{n >= 0} weight(n) (1 - x) x^n to a relative accuracy
/// rel_epsilon. The weight must be non-negative with a term ratio
/// weight(n+1)/weight(n) that is non-increasing once positive (true for click
/// probabilities, their products, and polynomials in n); the stopping rule
/// bounds the remaining tail by a geometric series at the current ratio.
/// Throws ResourceError past kMaxTruncationOrder terms.
[[nodiscard]] double geometric_expectation(const std::function<double(int)>& weight,
                                           EmissionProbability x,
                                           double rel_epsilon = 1e-15);

}  // namespace spdc
