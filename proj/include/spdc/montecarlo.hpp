#pragma once

// Per-pulse stochastic simulation of the source and detectors. It samples
// the physical process photon by photon (no click formulas), so its tallies
// are an independent check on detector_model and correlation.
//
// Each pulse draws from its own counter-based random stream keyed by
// (seed, pulse index), so results do not depend on how pulses are
// distributed over worker threads.

#include <cstdint>
#include <optional>

#include "spdc/detector_model.hpp"

namespace spdc {

/// Counter-based stream: the k-th draw of pulse i under seed s is a fixed
/// function of (s, i, k). SplitMix64 finalizer over a Weyl sequence.
class PulseStream {
 public:
  PulseStream(std::uint64_t seed, std::uint64_t pulse_index) noexcept;

  [[nodiscard]] std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  [[nodiscard]] double next_uniform() noexcept;

 private:
  std::uint64_t state_;
};

/// Pair number from Pr(n) = (1 - x) x^n by inversion, n = floor(ln u / ln x).
[[nodiscard]] std::uint64_t geometric_sampler(double x, PulseStream& rng);

/// Photon number of a coherent state, sequential inversion of the Poisson CDF.
[[nodiscard]] std::uint64_t poisson_sampler(double mean, PulseStream& rng);

enum class SimMode {
  two_arm,         ///< idler -> detector 1, signal -> detector 2
  heralded_split,  ///< idler -> detector 1, signal -> 50/50 splitter -> detectors 2, 3
  saturation       ///< single thermal or coherent mode -> detector 1
};

struct SaturationSource {
  SourceKind kind = SourceKind::thermal;
  double mean = 0.0;
};

struct SimConfig {
  std::uint64_t pulses = 0;
  std::uint64_t seed = 0;
  EmissionProbability x{0.0};
  DetectorChain chain;
  SimMode mode = SimMode::two_arm;
  SaturationSource saturation;  ///< used in saturation mode only
  /// Worker threads; 0 reads SPDC_STATS_THREADS, then hardware concurrency.
  unsigned workers = 0;
  std::uint64_t chunk_pulses = 1u << 20;
};

/// Integer tallies of one simulation. In two_arm mode pair12 counts the
/// detector 1-2 coincidences; in saturation mode only clicks1 and
/// photons_on_click1 are filled.
struct SimCounts {
  std::uint64_t pulses = 0;
  std::uint64_t clicks1 = 0;
  std::uint64_t clicks2 = 0;
  std::uint64_t clicks3 = 0;
  std::uint64_t pair12 = 0;
  std::uint64_t pair13 = 0;
  std::uint64_t triple123 = 0;
  /// Sum of incident photon numbers over pulses where detector 1 clicked.
  std::uint64_t photons_on_click1 = 0;
  /// Sum of their squares, for the standard error of the photon-weighted mean.
  std::uint64_t photons_on_click1_sq = 0;

  SimCounts& operator+=(const SimCounts& other);
  friend bool operator==(const SimCounts&, const SimCounts&) = default;
};

/// Throws DomainError for pulses == 0 and ResourceError when a tally would
/// overflow 64 bits.
[[nodiscard]] SimCounts simulate(const SimConfig& config);

/// Per-pulse frequency of a tally with its binomial standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

[[nodiscard]] Estimate frequency(std::uint64_t count, std::uint64_t pulses);

/// Frequency scaled to counts/s at the repetition rate.
[[nodiscard]] Estimate rate(std::uint64_t count, std::uint64_t pulses, double rep_rate_hz);

/// Raw-count g2 estimator 2 N1 N123 / (N12 + N13)^2 on heralded_split
/// tallies, with a delta-method standard error built from the per-pulse
/// indicator covariances. Empty when there are no two-fold coincidences.
[[nodiscard]] std::optional<Estimate> g2_estimate(const SimCounts& counts);

/// Photon-weighted detection per pulse E[click n] from saturation tallies.
[[nodiscard]] Estimate photon_weighted_detection(const SimCounts& counts);

/// (estimate - expected) / sigma where sigma is the binomial standard error
/// at the expected per-pulse probability.
[[nodiscard]] double sigma_distance(std::uint64_t count, std::uint64_t pulses,
                                    double expected_probability);

/// Worker count a simulation with workers = 0 would use.
[[nodiscard]] unsigned default_workers();

}  // namespace spdc
