#include "spdc/photon_statistics.hpp"

#include <cmath>
#include <fmt/format.h>

#include "spdc/errors.hpp"

namespace spdc {

EmissionProbability::EmissionProbability(double x) : x_(x) {
  if (!(x >= 0.0 && x < 1.0)) {
    throw DomainError(fmt::format("emission probability x = {} outside [0, 1)", x));
  }
}

EmissionProbability EmissionProbability::from_pump(double power_mw, double tau_per_mw) {
  if (!(power_mw >= 0.0) || !(tau_per_mw >= 0.0)) {
    throw DomainError(fmt::format("pump power {} mW and tau {} /mW must be non-negative",
                                  power_mw, tau_per_mw));
  }
  return EmissionProbability(power_mw * tau_per_mw);
}

double EmissionProbability::gamma() const noexcept { return std::sqrt(x_); }

double pair_probability(int n, EmissionProbability x) {
  if (n < 0) throw DomainError(fmt::format("pair number {} is negative", n));
  const double v = x.value();
  if (n == 0) return 1.0 - v;
  return (1.0 - v) * std::pow(v, n);
}

double mean_pairs_per_pulse(EmissionProbability x) {
  return x.value() / (1.0 - x.value());
}

double mean_pairs_per_pulse_series(EmissionProbability x, double epsilon) {
  const int n_max = truncation_order(x, epsilon);
  double sum = 0.0;
  for (int n = 1; n <= n_max; ++n) sum += n * pair_probability(n, x);
  return sum;
}

double pair_rate(double rep_rate_hz, EmissionProbability x) {
  if (!(rep_rate_hz > 0.0)) {
    throw DomainError(fmt::format("repetition rate {} Hz must be positive", rep_rate_hz));
  }
  return rep_rate_hz * mean_pairs_per_pulse(x);
}

double one_pair_rate(double rep_rate_hz, EmissionProbability x) {
  if (!(rep_rate_hz > 0.0)) {
    throw DomainError(fmt::format("repetition rate {} Hz must be positive", rep_rate_hz));
  }
  return rep_rate_hz * pair_probability(1, x);
}

int truncation_order(EmissionProbability x, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError(fmt::format("truncation epsilon {} outside (0, 1)", epsilon));
  }
  const double v = x.value();
  if (v == 0.0) return 1;

  const double estimate = std::ceil(std::log(epsilon) / std::log(v)) - 1.0;
  if (estimate > kMaxTruncationOrder) {
    throw ResourceError(fmt::format(
        "series at x = {} needs about {} terms for epsilon = {}, cap is {}", v, estimate,
        epsilon, kMaxTruncationOrder));
  }
  int n = std::max(1, static_cast<int>(estimate));
  // log-ratio estimate can be off by one in floating point
  while (std::pow(v, n + 1) > epsilon) ++n;
  while (n > 1 && std::pow(v, n) <= epsilon) --n;
  if (n > kMaxTruncationOrder) {
    throw ResourceError(fmt::format("truncation order {} exceeds cap {}", n,
                                    kMaxTruncationOrder));
  }
  return n;
}

PairDistribution PairDistribution::truncated(EmissionProbability x, double epsilon) {
  const int n_max = truncation_order(x, epsilon);
  return PairDistribution{x, n_max, std::pow(x.value(), n_max + 1)};
}

double poisson_probability(int n, double mean) {
  if (n < 0) throw DomainError(fmt::format("photon number {} is negative", n));
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw DomainError(fmt::format("Poisson mean {} must be finite and non-negative", mean));
  }
  if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
}

CoherentDistribution::CoherentDistribution(double nu) : mean(nu) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) {
    throw DomainError(fmt::format("coherent mean {} must be finite and non-negative", nu));
  }
}

int CoherentDistribution::truncation_order(double epsilon) const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError(fmt::format("truncation epsilon {} outside (0, 1)", epsilon));
  }
  if (mean == 0.0) return 1;
  // Past the mode, successive term ratios nu/(k+1) only shrink, so the tail
  // beyond n is at most p(n+1) / (1 - nu/(n+2)).
  for (int n = 1; n <= kMaxTruncationOrder; ++n) {
    if (n + 2 <= mean) continue;
    const double next = poisson_probability(n + 1, mean);
    const double ratio = mean / (n + 2.0);
    if (next / (1.0 - ratio) <= epsilon) return n;
  }
  throw ResourceError(fmt::format("Poisson mean {} needs more than {} terms", mean,
                                  kMaxTruncationOrder));
}

double geometric_expectation(const std::function<double(int)>& weight,
                             EmissionProbability x, double rel_epsilon) {
  const double v = x.value();
  if (v == 0.0) return weight(0);

  double sum = 0.0;
  double previous = 0.0;
  double probability = 1.0 - v;
  for (int n = 0; n <= kMaxTruncationOrder; ++n, probability *= v) {
    if (probability == 0.0) return sum;  // underflow: nothing left to add
    const double term = weight(n) * probability;
    sum += term;
    if (term > 0.0 && previous > 0.0) {
      const double ratio = term / previous;
      if (ratio < 1.0 && term * ratio / (1.0 - ratio) <= rel_epsilon * sum) return sum;
    }
    previous = term;
  }
  throw ResourceError(fmt::format("series at x = {} did not converge within {} terms", v,
                                  kMaxTruncationOrder));
}

}  // namespace spdc
