#include "spdc/saturation.hpp"

#include <cmath>
#include <fmt/format.h>

#include "spdc/errors.hpp"

namespace spdc {

namespace {

void check_grid(const std::vector<double>& mean_grid) {
  for (double mean : mean_grid) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
      throw DomainError(fmt::format("mean photon number {} must be finite and >= 0", mean));
    }
  }
}

}  // namespace

SaturationCurve curve(SourceKind source, Efficiency eta, ResponseVariant variant,
                      const std::vector<double>& mean_grid, double epsilon) {
  check_grid(mean_grid);
  SaturationCurve out{source, eta.value(), variant, {}};
  out.points.reserve(mean_grid.size());
  for (double mean : mean_grid) {
    out.points.push_back({mean, detected_vs_incident(source, mean, eta, variant, epsilon)});
  }
  return out;
}

std::vector<std::pair<double, double>> saturation_gap(Efficiency eta, ResponseVariant variant,
                                                      const std::vector<double>& mean_grid,
                                                      double epsilon) {
  const SaturationCurve coherent = curve(SourceKind::coherent, eta, variant, mean_grid, epsilon);
  const SaturationCurve thermal = curve(SourceKind::thermal, eta, variant, mean_grid, epsilon);
  std::vector<std::pair<double, double>> gap;
  gap.reserve(mean_grid.size());
  for (std::size_t i = 0; i < mean_grid.size(); ++i) {
    gap.emplace_back(mean_grid[i], coherent.points[i].detected - thermal.points[i].detected);
  }
  return gap;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) {
    throw DomainError(fmt::format("log grid needs 0 < lo <= hi and count >= 1, got {} {} {}",
                                  lo, hi, count));
  }
  if (count == 1) return {lo};
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double a = std::log10(lo);
  const double step = (std::log10(hi) - a) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = std::pow(10.0, a + step * i);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

std::vector<double> default_mean_grid() { return log_grid(1e-2, 1e2, 60); }

std::vector<double> default_saturation_efficiencies() { return {0.2, 0.5, 0.8}; }

const char* to_string(SourceKind source) {
  return source == SourceKind::coherent ? "coherent" : "thermal";
}

const char* to_string(ResponseVariant variant) {
  return variant == ResponseVariant::literal ? "literal" : "click";
}

}  // namespace spdc
