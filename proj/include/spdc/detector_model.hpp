#pragma once

// Click, singles, and coincidence rates of bucket (non-photon-number-resolving)
// detectors fed by the pulsed pair source, in the two-arm configuration and in
// the heralded configuration where the signal arm passes a 50/50 fiber
// beamsplitter onto detectors 2 and 3.

#include "spdc/photon_statistics.hpp"

namespace spdc {

/// Overall detection efficiency of one arm (coupling x transmission x SDE).
class Efficiency {
 public:
  constexpr Efficiency() = default;
  /// Throws DomainError outside [0, 1].
  explicit Efficiency(double eta);

  [[nodiscard]] constexpr double value() const noexcept { return eta_; }

 private:
  double eta_ = 0.0;
};

/// Per-arm efficiencies. eta1 is the idler arm. In the two-arm setup eta2 is
/// the signal arm. In the heralded-split setup eta2 and eta3 are the two
/// branches after the beamsplitter; the 1/2 split itself is modelled by the
/// binomial photon partition, so it is not folded into eta2/eta3.
struct DetectorChain {
  Efficiency eta1;
  Efficiency eta2;
  Efficiency eta3;
};

/// Rates in counts/s. Two-arm fields: sc1, sc2, cc. Heralded-split fields:
/// sc1h (idler singles), cc12, cc13, cc123.
struct RatePrediction {
  double sc1 = 0.0;
  double sc2 = 0.0;
  double cc = 0.0;
  double sc1h = 0.0;
  double cc12 = 0.0;
  double cc13 = 0.0;
  double cc123 = 0.0;
};

/// 1 - (1 - eta)^n.
[[nodiscard]] double click_probability(int n, Efficiency eta);

/// f sum_n (1 - (1-eta)^n) Pr(n), closed form f x eta / (1 - (1-eta) x).
[[nodiscard]] double singles_rate(double rep_rate_hz, EmissionProbability x, Efficiency eta);

/// Series path of singles_rate, summed to relative accuracy rel_epsilon.
[[nodiscard]] double singles_rate_series(double rep_rate_hz, EmissionProbability x,
                                         Efficiency eta, double rel_epsilon = 1e-15);

/// f sum_n (1 - (1-eta1)^n)(1 - (1-eta2)^n) Pr(n). The closed form
/// f x eta1 eta2 (1 - a b x^2) / ((1 - a x)(1 - b x)(1 - a b x)), with
/// a = 1 - eta1 and b = 1 - eta2, is the inclusion-exclusion sum of four
/// geometric series with the common terms cancelled, so it stays accurate
/// as x -> 0.
[[nodiscard]] double coincidence_rate(double rep_rate_hz, EmissionProbability x,
                                      Efficiency eta1, Efficiency eta2);

[[nodiscard]] double coincidence_rate_series(double rep_rate_hz, EmissionProbability x,
                                             Efficiency eta1, Efficiency eta2,
                                             double rel_epsilon = 1e-15);

/// sc1, sc2 and cc of the two-arm configuration.
[[nodiscard]] RatePrediction predict_two_arm(double rep_rate_hz, EmissionProbability x,
                                             const DetectorChain& chain);

/// Heralded-split rates (sc1h, cc12, cc13, cc123). Each n-photon signal pulse
/// is partitioned as k photons to detector 3 and n - k to detector 2 with
/// weight C(n, k) / 2^n; the sums over n are truncated per truncation_order.
/// Binomial weights switch to log space above n = 60.
[[nodiscard]] RatePrediction split_coincidences(double rep_rate_hz, EmissionProbability x,
                                                const DetectorChain& chain,
                                                double epsilon = kDefaultTruncationEpsilon);

/// C(n, k) / 2^n.
[[nodiscard]] double binomial_split_weight(int n, int k);

enum class SourceKind { thermal, coherent };
enum class ResponseVariant {
  click,   ///< per-pulse click probability E[1 - (1-eta)^n]
  literal  ///< photon-weighted E[(1 - (1-eta)^n) n]
};

/// Detected quantity per pulse for a thermal (geometric, mean mu) or coherent
/// (Poisson, mean nu) input. The click variant uses the closed forms
/// 1 - 1/(1 + eta mu) and 1 - exp(-eta nu); the literal variant sums the
/// photon-weighted series with tail mass bounded by epsilon.
[[nodiscard]] double detected_vs_incident(SourceKind source, double mean, Efficiency eta,
                                          ResponseVariant variant,
                                          double epsilon = kDefaultTruncationEpsilon);

/// Series evaluation of either variant, for cross-checking the closed forms.
[[nodiscard]] double detected_vs_incident_series(SourceKind source, double mean,
                                                 Efficiency eta, ResponseVariant variant,
                                                 double epsilon = kDefaultTruncationEpsilon);

/// Geometric parameter q = mu / (1 + mu) of a thermal state with mean mu.
[[nodiscard]] EmissionProbability thermal_parameter(double mean);

}  // namespace spdc
