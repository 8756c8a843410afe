#pragma once

// Second- and third-order zero-delay correlation functions of the pair
// source: from raw heralded-split counts, predicted for bucket detectors,
// and for the ideal heralded, unheralded (thermal) and signal+idler
// (squeezed) fields. Each ideal-field function has a closed form and a
// series path; the closed form is the production path.

#include <optional>
#include <string>
#include <vector>

#include "spdc/detector_model.hpp"
#include "spdc/inversion.hpp"

namespace spdc {

/// 2 cc123 sc1 / (cc12 + cc13)^2. Throws DomainError when cc12 + cc13 <= 0.
[[nodiscard]] double g2_from_counts(double sc1, double cc12, double cc13, double cc123);

/// One-sigma Poisson uncertainty of g2_from_counts for a counting time T,
/// treating the three count totals as independent.
[[nodiscard]] double g2_from_counts_uncertainty(double sc1, double cc12, double cc13,
                                                double cc123, double counting_time_s = 1.0);

/// g2 that the raw-count estimator would report for the bucket-detector
/// model, from split_coincidences. f cancels. Throws DivergenceError when
/// no two-fold coincidences are possible.
[[nodiscard]] double g2_heralded_predicted(EmissionProbability x, const DetectorChain& chain,
                                           double rep_rate_hz = kDefaultRepRateHz,
                                           double epsilon = kDefaultTruncationEpsilon);

/// Heralded signal with the vacuum term removed: 2x.
[[nodiscard]] double g2_heralded_ideal(EmissionProbability x);
[[nodiscard]] double g2_heralded_ideal_series(EmissionProbability x, double rel_epsilon = 1e-15);

/// Unheralded signal (thermal): exactly 2, the x -> 0 limit included.
[[nodiscard]] double g2_unheralded(EmissionProbability x);
/// Throws DivergenceError at x = 0, where the series is 0/0.
[[nodiscard]] double g2_unheralded_series(EmissionProbability x, double rel_epsilon = 1e-15);

/// Signal and idler together (2n photons per n-pair term): 1/(2x) + 3/2.
/// Throws DivergenceError at x = 0.
[[nodiscard]] double g2_signal_idler(EmissionProbability x);
[[nodiscard]] double g2_signal_idler_series(EmissionProbability x, double rel_epsilon = 1e-15);

/// Third order, signal and idler: 6 + 3(1 - x)/x. Throws DivergenceError at x = 0.
[[nodiscard]] double g3_signal_idler(EmissionProbability x);
[[nodiscard]] double g3_signal_idler_series(EmissionProbability x, double rel_epsilon = 1e-15);
/// Same quantity from raw moments (<m^3> - 3<m^2> + 2<m>) / <m>^3, m = 2n.
[[nodiscard]] double g3_signal_idler_moments(EmissionProbability x, double rel_epsilon = 1e-15);

/// Third order, unheralded signal: exactly 6. Throws DivergenceError at x = 0.
[[nodiscard]] double g3_unheralded(EmissionProbability x);
[[nodiscard]] double g3_unheralded_series(EmissionProbability x, double rel_epsilon = 1e-15);

/// How eta2/eta3 of the split configuration are derived from the two-arm
/// signal efficiency: eta_branch = eta_signal * scale. The defaults scale by
/// detector SDE ratios, SDE2/SDE_signal and SDE3/SDE_signal, where the
/// two-arm signal detector is detector 2 (SDE 0.68) and detector 3 has SDE
/// 0.56.
struct EtaSplitPolicy {
  static constexpr double kSdeDetector2 = 0.68;
  static constexpr double kSdeDetector3 = 0.56;
  static constexpr double kSdeSignalArm = kSdeDetector2;

  double eta2_scale = kSdeDetector2 / kSdeSignalArm;
  double eta3_scale = kSdeDetector3 / kSdeSignalArm;

  /// Chain for the split configuration from a recovered two-arm row.
  /// Throws DomainError if a scaled efficiency leaves [0, 1].
  [[nodiscard]] DetectorChain chain(double eta_idler, double eta_signal) const;
};

enum class Provenance { analytic, monte_carlo, measured };

[[nodiscard]] std::string to_string(Provenance provenance);

/// A table entry: a value, or empty with the reason it is missing
/// (divergent, not measured, row failed).
struct CorrelationValue {
  std::optional<double> value;
  Provenance provenance = Provenance::analytic;
  std::string note;

  friend bool operator==(const CorrelationValue&, const CorrelationValue&) = default;
};

/// The seven correlation columns for one pump power.
struct CorrelationReport {
  double power_mw = 0.0;
  CorrelationValue g2_exp;   ///< from measured three-fold counts
  CorrelationValue g2_exp2;  ///< predicted bucket-detector estimator
  CorrelationValue g2_sh;    ///< ideal heralded signal
  CorrelationValue g2_s;     ///< unheralded signal
  CorrelationValue g2_si;    ///< signal + idler
  CorrelationValue g3_si;
  CorrelationValue g3_s;

  friend bool operator==(const CorrelationReport&, const CorrelationReport&) = default;
};

/// Evaluates every column for each inverted row. Errors are isolated per
/// entry: a divergent or failed entry is left empty with a note.
[[nodiscard]] std::vector<CorrelationReport> build_table_two(
    const std::vector<TableOneRow>& rows, const EtaSplitPolicy& policy = {},
    double rep_rate_hz = kDefaultRepRateHz, double epsilon = kDefaultTruncationEpsilon);

/// A digitized measured g2 point (pump power, value) for comparison with
/// predictions; not used to tune anything.
struct MeasuredG2 {
  double power_mw = 0.0;
  double g2 = 0.0;
  std::optional<double> cc123;
};

struct G2Comparison {
  double power_mw = 0.0;
  double measured = 0.0;
  std::optional<double> predicted_exp2;
  std::optional<double> ideal_heralded;
};

/// Pairs each measured point with the report at the same power, if any.
[[nodiscard]] std::vector<G2Comparison> compare_with_measured(
    const std::vector<CorrelationReport>& reports, const std::vector<MeasuredG2>& measured);

}  // namespace spdc
