#pragma once

// Recovery of the source constant tau and the two arm efficiencies from one
// pump power's measured singles and coincidence rates, and reconstruction of
// the derived pair-rate columns for a whole power sweep.
//
// Units: pump power in mW and tau in 1/mW, so x = power * tau.

#include <optional>
#include <string>
#include <vector>

#include "spdc/photon_statistics.hpp"

namespace spdc {

/// Nominal repetition rate of the mode-locked pump laser.
inline constexpr double kDefaultRepRateHz = 76e6;

/// Heralded-split measurement columns, counts/s.
struct HeraldedCounts {
  double cc12 = 0.0;
  double cc13 = 0.0;
  double cc123 = 0.0;

  friend bool operator==(const HeraldedCounts&, const HeraldedCounts&) = default;
};

/// One pump power's measured rates, counts/s.
struct CountRecord {
  double power_mw = 0.0;
  double sc1 = 0.0;
  double sc2 = 0.0;
  double cc = 0.0;
  std::optional<HeraldedCounts> heralded;

  friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

struct InversionOptions {
  double tolerance = 1e-9;  ///< max relative mismatch of the three rate equations
  int max_iterations = 200;
  /// Newton iterations before the bracketing fallback takes over. Zero
  /// sends every solve straight to the fallback.
  int newton_iterations = 200;
};

struct InversionResult {
  double tau = 0.0;  ///< 1/mW
  double eta1 = 0.0;
  double eta2 = 0.0;
  double residual = 0.0;  ///< max relative mismatch of sc1, sc2, cc at the solution
  int iterations = 0;
  bool used_fallback = false;
};

/// Solves the singles/coincidence equations for (tau, eta1, eta2).
///
/// Damped Newton in (logit x, logit eta1, logit eta2), started from the
/// low-power estimates eta1 = cc/sc2, eta2 = cc/sc1, x = sc1 sc2 / (cc f).
/// If Newton stalls, the efficiencies are eliminated in closed form from
/// the two singles equations and x is bracketed by bisection on the
/// coincidence equation.
///
/// Throws DataInconsistencyError when cc <= 0, cc > min(sc1, sc2) or
/// min(sc1, sc2) >= f, and InversionFailure (with the best residual) when
/// no root reaches the tolerance.
[[nodiscard]] InversionResult invert_counts(double rep_rate_hz, double power_mw, double sc1,
                                            double sc2, double cc,
                                            const InversionOptions& options = {});

/// Max relative mismatch between the closed-form rates at (x, eta1, eta2)
/// and the measured sc1, sc2, cc.
[[nodiscard]] double equation_residual(double rep_rate_hz, double x, double eta1, double eta2,
                                       double sc1, double sc2, double cc);

/// Low-power estimate N = sc1 sc2 / cc, which ignores multi-pair emission.
[[nodiscard]] double naive_pair_rate(double sc1, double sc2, double cc);

/// SDE = sc h c / (P lambda) for an attenuated laser of power P (W) and
/// wavelength lambda (m), with the exact SI values of h and c.
[[nodiscard]] double sde_from_attenuated_laser(double sc, double power_w,
                                               double wavelength_m);

enum class RowStatus { ok, inconsistent, inversion_failed, invalid };

[[nodiscard]] std::string to_string(RowStatus status);

/// Measured row plus its inversion and the pair-rate columns derived from
/// the recovered x = power * tau.
struct TableOneRow {
  CountRecord measured;
  RowStatus status = RowStatus::ok;
  std::string diagnostic;
  double tau = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double pair_rate = 0.0;      ///< N, pairs/s
  double one_pair_rate = 0.0;  ///< N1, pairs/s
  double mean_pairs = 0.0;     ///< n-bar per pulse
  double residual = 0.0;
  int iterations = 0;

  [[nodiscard]] bool ok() const noexcept { return status == RowStatus::ok; }
  [[nodiscard]] double emission_probability() const noexcept { return measured.power_mw * tau; }

  friend bool operator==(const TableOneRow&, const TableOneRow&) = default;
};

/// Inverts every record independently. A failing row is flagged with its
/// status and diagnostic; the other rows are still computed.
[[nodiscard]] std::vector<TableOneRow> build_table(const std::vector<CountRecord>& records,
                                                   double rep_rate_hz,
                                                   const InversionOptions& options = {});

/// One-sigma spread of the recovered parameters when each measured rate
/// carries Poisson noise sqrt(rate T) / T for a counting time T seconds.
/// The rates are treated as independent; a reporting aid, not used for
/// any pass/fail decision.
struct ParameterBands {
  double tau = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
};

[[nodiscard]] ParameterBands poisson_parameter_bands(double rep_rate_hz,
                                                     const CountRecord& record,
                                                     double counting_time_s = 1.0,
                                                     const InversionOptions& options = {});

}  // namespace spdc
