#pragma once

// Detected-vs-incident response of one bucket detector to a thermal and a
// coherent input of equal mean photon number, and the gap between them.

#include <utility>
#include <vector>

#include "spdc/detector_model.hpp"

namespace spdc {

struct SaturationPoint {
  double mean_in = 0.0;
  double detected = 0.0;

  friend bool operator==(const SaturationPoint&, const SaturationPoint&) = default;
};

/// Points are in grid order. For the click variant detected < 1 and the
/// curve is non-decreasing in mean_in.
struct SaturationCurve {
  SourceKind source = SourceKind::thermal;
  double eta = 0.0;
  ResponseVariant variant = ResponseVariant::click;
  std::vector<SaturationPoint> points;
};

/// Throws DomainError for a negative or non-finite grid value.
[[nodiscard]] SaturationCurve curve(SourceKind source, Efficiency eta, ResponseVariant variant,
                                    const std::vector<double>& mean_grid,
                                    double epsilon = kDefaultTruncationEpsilon);

/// (mean, coherent - thermal) over the grid.
[[nodiscard]] std::vector<std::pair<double, double>> saturation_gap(
    Efficiency eta, ResponseVariant variant, const std::vector<double>& mean_grid,
    double epsilon = kDefaultTruncationEpsilon);

/// count points spaced evenly in log10 between lo and hi, both included.
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, int count);

/// 60 points from 1e-2 to 1e2.
[[nodiscard]] std::vector<double> default_mean_grid();

/// 0.2, 0.5, 0.8.
[[nodiscard]] std::vector<double> default_saturation_efficiencies();

[[nodiscard]] const char* to_string(SourceKind source);
[[nodiscard]] const char* to_string(ResponseVariant variant);

}  // namespace spdc
