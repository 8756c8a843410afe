#pragma once

// Subcommand bodies behind the spdc_stats executable. Each returns the
// process exit code and writes diagnostics to `log`; outputs land in
// RunConfig::out_dir.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spdc/correlation.hpp"
#include "spdc/montecarlo.hpp"
#include "spdc/saturation.hpp"

namespace spdc {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitPartialFailure = 2,
  kExitMonteCarloDisagreement = 3,
};

struct RunConfig {
  double rep_rate_hz = kDefaultRepRateHz;
  double eps_trunc = kDefaultTruncationEpsilon;
  double tol_inv = InversionOptions{}.tolerance;
  EtaSplitPolicy split;
  ResponseVariant variant = ResponseVariant::click;
  std::uint64_t seed = 42;
  std::uint64_t pulses = 10'000'000;
  /// 0 defers to SPDC_STATS_THREADS, then hardware concurrency.
  unsigned threads = 0;
  std::string out_dir = ".";

  /// Throws InputError for a value outside its domain.
  void validate() const;
};

/// sweep.csv -> table1.csv, table1.json. Exit 2 when any row is flagged.
int cmd_invert(const std::string& sweep_path, const RunConfig& config, std::ostream& log);

/// table1.json -> table2.csv, table2.json, and g2_comparison.csv when a
/// reference file of measured g2 points is given. Exit 2 when any input row
/// was not inverted.
int cmd_correlations(const std::string& table1_json_path, const RunConfig& config,
                     std::ostream& log,
                     const std::optional<std::string>& reference_g2_path = std::nullopt);

struct SaturationRequest {
  std::vector<double> etas = default_saturation_efficiencies();
  std::vector<double> mean_grid = default_mean_grid();
};

/// curves.csv for both source kinds at every eta, under config.variant.
int cmd_saturation(const RunConfig& config, std::ostream& log,
                   const SaturationRequest& request = {});

struct SimulateRequest {
  SimMode mode = SimMode::two_arm;
  double x = 0.0135;
  double eta1 = 0.215;
  /// Two-arm signal efficiency. In heralded_split mode the branch
  /// efficiencies are eta2 scaled by the split policy.
  double eta2 = 0.198;
  /// Overrides the scaled detector-3 efficiency in heralded_split mode.
  std::optional<double> eta3;
  SourceKind source = SourceKind::thermal;
  double mean = 1.0;
};

/// One simulated quantity beside its analytic value.
struct SimComparison {
  std::string name;
  std::string unit;
  double simulated = 0.0;
  double std_error = 0.0;
  double predicted = 0.0;
  double sigma = 0.0;  ///< (simulated - predicted) / standard error
};

/// Runs the simulation and pairs every tally with its analytic prediction.
[[nodiscard]] std::vector<SimComparison> compare_simulation(const SimConfig& sim,
                                                            const SimCounts& counts,
                                                            double rep_rate_hz, double epsilon);

/// simcounts.json: configuration, tallies, comparisons. Exit 3 when any
/// |sigma| exceeds 5.
int cmd_simulate(const RunConfig& config, const SimulateRequest& request, std::ostream& log);

/// Statistical acceptance band, in standard errors.
inline constexpr double kSigmaBand = 5.0;

}  // namespace spdc
