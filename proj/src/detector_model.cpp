#include "spdc/detector_model.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

#include "spdc/errors.hpp"

namespace spdc {

namespace {

void require_rep_rate(double rep_rate_hz) {
  if (!(rep_rate_hz > 0.0) || !std::isfinite(rep_rate_hz)) {
    throw DomainError(fmt::format("repetition rate {} Hz must be positive", rep_rate_hz));
  }
}

void require_mean(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw DomainError(fmt::format("mean photon number {} must be finite and >= 0", mean));
  }
}

// Threshold above which C(n, k) leaves the exactly representable range.
constexpr int kLogBinomialThreshold = 60;

}  // namespace

Efficiency::Efficiency(double eta) : eta_(eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw DomainError(fmt::format("efficiency {} outside [0, 1]", eta));
  }
}

double click_probability(int n, Efficiency eta) {
  if (n < 0) throw DomainError(fmt::format("photon number {} is negative", n));
  if (n == 0) return 0.0;
  return -std::expm1(n * std::log1p(-eta.value()));
}

double singles_rate(double rep_rate_hz, EmissionProbability x, Efficiency eta) {
  require_rep_rate(rep_rate_hz);
  const double v = x.value();
  const double e = eta.value();
  return rep_rate_hz * v * e / (1.0 - (1.0 - e) * v);
}

double singles_rate_series(double rep_rate_hz, EmissionProbability x, Efficiency eta,
                           double rel_epsilon) {
  require_rep_rate(rep_rate_hz);
  if (eta.value() == 0.0) return 0.0;
  return rep_rate_hz *
         geometric_expectation([&](int n) { return click_probability(n, eta); }, x,
                               rel_epsilon);
}

double coincidence_rate(double rep_rate_hz, EmissionProbability x, Efficiency eta1,
                        Efficiency eta2) {
  require_rep_rate(rep_rate_hz);
  const double v = x.value();
  const double a = 1.0 - eta1.value();
  const double b = 1.0 - eta2.value();
  const double numerator = v * eta1.value() * eta2.value() * (1.0 - a * b * v * v);
  const double denominator = (1.0 - a * v) * (1.0 - b * v) * (1.0 - a * b * v);
  return rep_rate_hz * numerator / denominator;
}

double coincidence_rate_series(double rep_rate_hz, EmissionProbability x, Efficiency eta1,
                               Efficiency eta2, double rel_epsilon) {
  require_rep_rate(rep_rate_hz);
  if (eta1.value() == 0.0 || eta2.value() == 0.0) return 0.0;
  return rep_rate_hz *
         geometric_expectation(
             [&](int n) { return click_probability(n, eta1) * click_probability(n, eta2); },
             x, rel_epsilon);
}

RatePrediction predict_two_arm(double rep_rate_hz, EmissionProbability x,
                               const DetectorChain& chain) {
  RatePrediction out;
  out.sc1 = singles_rate(rep_rate_hz, x, chain.eta1);
  out.sc2 = singles_rate(rep_rate_hz, x, chain.eta2);
  out.cc = coincidence_rate(rep_rate_hz, x, chain.eta1, chain.eta2);
  return out;
}

double binomial_split_weight(int n, int k) {
  if (n < 0 || k < 0 || k > n) {
    throw DomainError(fmt::format("binomial weight C({}, {}) undefined", n, k));
  }
  if (n > kLogBinomialThreshold) {
    const double log_weight = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                              std::lgamma(n - k + 1.0) - n * std::numbers::ln2;
    return std::exp(log_weight);
  }
  // multiplicative form, k <= n/2 keeps intermediate values small
  const int m = std::min(k, n - k);
  double c = 1.0;
  for (int i = 1; i <= m; ++i) c = c * (n - m + i) / i;
  return std::ldexp(c, -n);
}

RatePrediction split_coincidences(double rep_rate_hz, EmissionProbability x,
                                  const DetectorChain& chain, double epsilon) {
  require_rep_rate(rep_rate_hz);
  const int n_max = truncation_order(x, epsilon);

  double sc1 = 0.0;
  double cc12 = 0.0;
  double cc13 = 0.0;
  double cc123 = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double herald = pair_probability(n, x) * click_probability(n, chain.eta1);
    if (herald == 0.0) continue;
    double branch2 = 0.0;  // k = 0 .. n-1: at least one photon toward detector 2
    double branch3 = 0.0;  // k = 1 .. n: at least one photon toward detector 3
    double both = 0.0;     // k = 1 .. n-1
    for (int k = 0; k <= n; ++k) {
      const double w = binomial_split_weight(n, k);
      const double c2 = click_probability(n - k, chain.eta2);
      const double c3 = click_probability(k, chain.eta3);
      if (k <= n - 1) branch2 += w * c2;
      if (k >= 1) branch3 += w * c3;
      if (k >= 1 && k <= n - 1) both += w * c2 * c3;
    }
    sc1 += herald;
    cc12 += herald * branch2;
    cc13 += herald * branch3;
    cc123 += herald * both;
  }

  RatePrediction out;
  out.sc1h = rep_rate_hz * sc1;
  out.cc12 = rep_rate_hz * cc12;
  out.cc13 = rep_rate_hz * cc13;
  out.cc123 = rep_rate_hz * cc123;
  return out;
}

EmissionProbability thermal_parameter(double mean) {
  require_mean(mean);
  return EmissionProbability(mean / (1.0 + mean));
}

double detected_vs_incident(SourceKind source, double mean, Efficiency eta,
                            ResponseVariant variant, double epsilon) {
  require_mean(mean);
  if (variant == ResponseVariant::literal) {
    return detected_vs_incident_series(source, mean, eta, variant, epsilon);
  }
  const double z = eta.value() * mean;
  switch (source) {
    case SourceKind::coherent:
      return -std::expm1(-z);
    case SourceKind::thermal:
      return z / (1.0 + z);
  }
  return 0.0;
}

double detected_vs_incident_series(SourceKind source, double mean, Efficiency eta,
                                   ResponseVariant variant, double epsilon) {
  require_mean(mean);
  if (mean == 0.0 || eta.value() == 0.0) return 0.0;
  const auto weight = [&](int n) {
    const double c = click_probability(n, eta);
    return variant == ResponseVariant::literal ? c * n : c;
  };

  double sum = 0.0;
  if (source == SourceKind::coherent) {
    const CoherentDistribution dist(mean);
    // sum_{n>N} n p(n) = nu P(count >= N), so the photon-weighted tail needs
    // one extra term and epsilon scaled by the mean
    const int n_max = variant == ResponseVariant::literal
                          ? dist.truncation_order(epsilon / std::max(1.0, mean)) + 1
                          : dist.truncation_order(epsilon);
    for (int n = 1; n <= n_max; ++n) sum += weight(n) * dist.probability(n);
    return sum;
  }

  const EmissionProbability q = thermal_parameter(mean);
  int n_max = truncation_order(q, epsilon);
  if (variant == ResponseVariant::literal) {
    // tail of sum n q^n (1-q) beyond N is q^(N+1) (N + 1 + q/(1-q))
    const double v = q.value();
    while (std::pow(v, n_max + 1) * (n_max + 1 + v / (1.0 - v)) > epsilon) {
      if (++n_max > kMaxTruncationOrder) {
        throw ResourceError(fmt::format("thermal mean {} needs more than {} terms", mean,
                                        kMaxTruncationOrder));
      }
    }
  }
  for (int n = 1; n <= n_max; ++n) sum += weight(n) * pair_probability(n, q);
  return sum;
}

}  // namespace spdc
