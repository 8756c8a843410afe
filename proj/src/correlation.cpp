#include "spdc/correlation.hpp"

#include <cmath>
#include <fmt/format.h>

#include "spdc/errors.hpp"

namespace spdc {

namespace {

// Normalized factorial moment numerator / mean^order, guarding the x = 0 case.
double ratio_or_diverge(double numerator, double mean, int order, const char* name) {
  const double denominator = std::pow(mean, order);
  if (denominator == 0.0) {
    throw DivergenceError(fmt::format("{} diverges: mean photon number is zero", name));
  }
  return numerator / denominator;
}

}  // namespace

double g2_from_counts(double sc1, double cc12, double cc13, double cc123) {
  const double twofold = cc12 + cc13;
  if (!(twofold > 0.0)) {
    throw DomainError(fmt::format("g2 from counts needs cc12 + cc13 > 0, got {}", twofold));
  }
  if (sc1 < 0.0 || cc123 < 0.0) {
    throw DomainError("g2 from counts needs non-negative sc1 and cc123");
  }
  return 2.0 * cc123 * sc1 / (twofold * twofold);
}

double g2_from_counts_uncertainty(double sc1, double cc12, double cc13, double cc123,
                                  double counting_time_s) {
  if (!(counting_time_s > 0.0)) {
    throw DomainError(fmt::format("counting time {} s must be positive", counting_time_s));
  }
  const double g2 = g2_from_counts(sc1, cc12, cc13, cc123);
  if (cc123 == 0.0 || sc1 == 0.0) return 0.0;
  const double n_single = sc1 * counting_time_s;
  const double n_triple = cc123 * counting_time_s;
  const double n_twofold = (cc12 + cc13) * counting_time_s;
  return g2 * std::sqrt(1.0 / n_single + 1.0 / n_triple + 4.0 / n_twofold);
}

double g2_heralded_predicted(EmissionProbability x, const DetectorChain& chain,
                             double rep_rate_hz, double epsilon) {
  const RatePrediction r = split_coincidences(rep_rate_hz, x, chain, epsilon);
  const double twofold = r.cc12 + r.cc13;
  if (twofold == 0.0) {
    throw DivergenceError("predicted heralded g2 diverges: no two-fold coincidences");
  }
  return 2.0 * r.sc1h * r.cc123 / (twofold * twofold);
}

double g2_heralded_ideal(EmissionProbability x) { return 2.0 * x.value(); }

double g2_heralded_ideal_series(EmissionProbability x, double rel_epsilon) {
  // heralded state has n pairs with probability Pr(n - 1); sum over m = n - 1
  const double numerator =
      geometric_expectation([](int m) { return (m + 1.0) * m; }, x, rel_epsilon);
  const double mean = geometric_expectation([](int m) { return m + 1.0; }, x, rel_epsilon);
  return ratio_or_diverge(numerator, mean, 2, "heralded g2");
}

double g2_unheralded(EmissionProbability) { return 2.0; }

double g2_unheralded_series(EmissionProbability x, double rel_epsilon) {
  const double numerator =
      geometric_expectation([](int n) { return n * (n - 1.0); }, x, rel_epsilon);
  const double mean = geometric_expectation([](int n) { return 1.0 * n; }, x, rel_epsilon);
  return ratio_or_diverge(numerator, mean, 2, "unheralded g2");
}

double g2_signal_idler(EmissionProbability x) {
  if (x.value() == 0.0) {
    throw DivergenceError("signal+idler g2 diverges at zero pump");
  }
  return 0.5 / x.value() + 1.5;
}

double g2_signal_idler_series(EmissionProbability x, double rel_epsilon) {
  const double numerator = geometric_expectation(
      [](int n) { return (2.0 * n) * (2.0 * n - 1.0); }, x, rel_epsilon);
  const double mean = geometric_expectation([](int n) { return 2.0 * n; }, x, rel_epsilon);
  return ratio_or_diverge(numerator, mean, 2, "signal+idler g2");
}

double g3_signal_idler(EmissionProbability x) {
  if (x.value() == 0.0) {
    throw DivergenceError("signal+idler g3 diverges at zero pump");
  }
  return 6.0 + 3.0 * (1.0 - x.value()) / x.value();
}

double g3_signal_idler_series(EmissionProbability x, double rel_epsilon) {
  const double numerator = geometric_expectation(
      [](int n) {
        const double m = 2.0 * n;
        return m * (m - 1.0) * (m - 2.0);
      },
      x, rel_epsilon);
  const double mean = geometric_expectation([](int n) { return 2.0 * n; }, x, rel_epsilon);
  return ratio_or_diverge(numerator, mean, 3, "signal+idler g3");
}

double g3_signal_idler_moments(EmissionProbability x, double rel_epsilon) {
  const auto moment = [&](int power) {
    return geometric_expectation([power](int n) { return std::pow(2.0 * n, power); }, x,
                                 rel_epsilon);
  };
  const double m1 = moment(1);
  const double m2 = moment(2);
  const double m3 = moment(3);
  return ratio_or_diverge(m3 - 3.0 * m2 + 2.0 * m1, m1, 3, "signal+idler g3");
}

double g3_unheralded(EmissionProbability x) {
  if (x.value() == 0.0) {
    throw DivergenceError("unheralded g3 diverges at zero pump");
  }
  return 6.0;
}

double g3_unheralded_series(EmissionProbability x, double rel_epsilon) {
  const double numerator = geometric_expectation(
      [](int n) { return n * (n - 1.0) * (n - 2.0); }, x, rel_epsilon);
  const double mean = geometric_expectation([](int n) { return 1.0 * n; }, x, rel_epsilon);
  return ratio_or_diverge(numerator, mean, 3, "unheralded g3");
}

DetectorChain EtaSplitPolicy::chain(double eta_idler, double eta_signal) const {
  return DetectorChain{Efficiency(eta_idler), Efficiency(eta_signal * eta2_scale),
                       Efficiency(eta_signal * eta3_scale)};
}

std::string to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::analytic:
      return "analytic";
    case Provenance::monte_carlo:
      return "monte_carlo";
    case Provenance::measured:
      return "measured";
  }
  return "analytic";
}

namespace {

template <typename Fn>
CorrelationValue evaluate_entry(Fn&& fn, Provenance provenance = Provenance::analytic) {
  CorrelationValue entry;
  entry.provenance = provenance;
  try {
    entry.value = fn();
  } catch (const DivergenceError& e) {
    entry.note = std::string("divergent: ") + e.what();
  } catch (const Error& e) {
    entry.note = e.what();
  }
  return entry;
}

CorrelationValue missing(std::string note, Provenance provenance = Provenance::analytic) {
  CorrelationValue entry;
  entry.provenance = provenance;
  entry.note = std::move(note);
  return entry;
}

}  // namespace

std::vector<CorrelationReport> build_table_two(const std::vector<TableOneRow>& rows,
                                               const EtaSplitPolicy& policy,
                                               double rep_rate_hz, double epsilon) {
  std::vector<CorrelationReport> reports;
  reports.reserve(rows.size());
  for (const TableOneRow& row : rows) {
    CorrelationReport report;
    report.power_mw = row.measured.power_mw;

    if (const auto& h = row.measured.heralded) {
      report.g2_exp = evaluate_entry(
          [&] { return g2_from_counts(row.measured.sc1, h->cc12, h->cc13, h->cc123); },
          Provenance::measured);
    } else {
      report.g2_exp = missing("not measured", Provenance::measured);
    }

    if (!row.ok()) {
      const std::string note = "row not inverted: " + to_string(row.status);
      report.g2_exp2 = report.g2_sh = report.g2_s = report.g2_si = report.g3_si =
          report.g3_s = missing(note);
      reports.push_back(std::move(report));
      continue;
    }

    try {
      const EmissionProbability x(row.emission_probability());
      report.g2_exp2 = evaluate_entry([&] {
        return g2_heralded_predicted(x, policy.chain(row.eta1, row.eta2), rep_rate_hz, epsilon);
      });
      report.g2_sh = evaluate_entry([&] { return g2_heralded_ideal(x); });
      report.g2_s = evaluate_entry([&] { return g2_unheralded(x); });
      report.g2_si = evaluate_entry([&] { return g2_signal_idler(x); });
      report.g3_si = evaluate_entry([&] { return g3_signal_idler(x); });
      report.g3_s = evaluate_entry([&] { return g3_unheralded(x); });
    } catch (const Error& e) {
      report.g2_exp2 = report.g2_sh = report.g2_s = report.g2_si = report.g3_si =
          report.g3_s = missing(e.what());
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<G2Comparison> compare_with_measured(const std::vector<CorrelationReport>& reports,
                                                const std::vector<MeasuredG2>& measured) {
  std::vector<G2Comparison> out;
  for (const MeasuredG2& point : measured) {
    G2Comparison cmp;
    cmp.power_mw = point.power_mw;
    cmp.measured = point.g2;
    for (const CorrelationReport& r : reports) {
      if (std::abs(r.power_mw - point.power_mw) <= 1e-9 * std::max(1.0, point.power_mw)) {
        cmp.predicted_exp2 = r.g2_exp2.value;
        cmp.ideal_heralded = r.g2_sh.value;
        break;
      }
    }
    out.push_back(cmp);
  }
  return out;
}

}  // namespace spdc
