#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "spdc/errors.hpp"
#include "spdc/detector_model.hpp"

using namespace spdc;

namespace {

constexpr double f = 76e6;

EmissionProbability x10() { return EmissionProbability::from_pump(10, 0.00135); }
EmissionProbability x400() { return EmissionProbability::from_pump(400, 0.00098); }

DetectorChain chain(double e1, double e2, double e3 = 0.0) {
  return {Efficiency(e1), Efficiency(e2), Efficiency(e3)};
}

}  // namespace

TEST_SUITE("detector_model") {
  TEST_CASE("click probability") {
    CHECK(click_probability(0, Efficiency(0.7)) == 0.0);
    CHECK(click_probability(1, Efficiency(0.215)) == doctest::Approx(0.215).epsilon(1e-15));
    CHECK(click_probability(3, Efficiency(0.5)) == 0.875);
    CHECK(click_probability(5000, Efficiency(0.01)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(Efficiency(1.01), DomainError);
    CHECK_THROWS_AS(Efficiency(-0.01), DomainError);
    CHECK_THROWS_AS(click_probability(-1, Efficiency(0.5)), DomainError);
  }

  TEST_CASE("singles rate examples") {
    CHECK(singles_rate(f, x10(), Efficiency(0.215)) == doctest::Approx(223e3).epsilon(0.02));
    CHECK(singles_rate(f, x10(), Efficiency(0.198)) == doctest::Approx(205e3).epsilon(0.02));
    CHECK(singles_rate(f, x10(), Efficiency(0.0)) == 0.0);
    CHECK(singles_rate(f, EmissionProbability(0.0), Efficiency(0.5)) == 0.0);
  }

  TEST_CASE("coincidence rate examples") {
    CHECK(coincidence_rate(f, x10(), Efficiency(0.215), Efficiency(0.198)) ==
          doctest::Approx(45e3).epsilon(0.03));
    CHECK(coincidence_rate(f, x400(), Efficiency(0.125), Efficiency(0.107)) ==
          doctest::Approx(1.17e6).epsilon(0.03));
    CHECK(coincidence_rate(f, x400(), Efficiency(0.0), Efficiency(0.5)) == 0.0);
    CHECK(coincidence_rate(f, x10(), Efficiency(0.7), Efficiency(0.0)) == 0.0);
  }

  TEST_CASE("closed form, series and oracle agree over the grid") {
    const std::vector<double> xs = {1e-4, 1e-3, 0.0135, 0.05, 0.128, 0.25, 0.392, 0.5};
    const std::vector<double> etas = {0.01, 0.1, 0.215, 0.5, 0.8, 0.99};
    for (double x : xs) {
      const EmissionProbability e(x);
      for (double a : etas) {
        const double s = singles_rate(f, e, Efficiency(a));
        CAPTURE(x);
        CAPTURE(a);
        CHECK(s == doctest::Approx(singles_rate_series(f, e, Efficiency(a)))
                       .epsilon(kSeriesAgreementEpsilon));
        CHECK(s == doctest::Approx(f * static_cast<double>(oracle::singles(x, a))).epsilon(1e-12));
        for (double b : etas) {
          const double c = coincidence_rate(f, e, Efficiency(a), Efficiency(b));
          CAPTURE(b);
          CHECK(c == doctest::Approx(coincidence_rate_series(f, e, Efficiency(a), Efficiency(b)))
                         .epsilon(kSeriesAgreementEpsilon));
          CHECK(c == doctest::Approx(f * static_cast<double>(oracle::coincidence(x, a, b)))
                         .epsilon(1e-12));
          CHECK(c <= std::min(s, singles_rate(f, e, Efficiency(b))) * (1 + 1e-15));
        }
      }
    }
  }

  TEST_CASE("small efficiency is linear in the pair rate") {
    for (double x : {0.0135, 0.392}) {
      const double ratio = singles_rate(f, EmissionProbability(x), Efficiency(1e-5)) / 1e-5;
      CHECK(ratio == doctest::Approx(f * x / (1 - x)).epsilon(1e-3));
    }
  }

  TEST_CASE("two-arm prediction bundles the three rates") {
    const RatePrediction r = predict_two_arm(f, x10(), chain(0.215, 0.198));
    CHECK(r.sc1 == singles_rate(f, x10(), Efficiency(0.215)));
    CHECK(r.sc2 == singles_rate(f, x10(), Efficiency(0.198)));
    CHECK(r.cc == coincidence_rate(f, x10(), Efficiency(0.215), Efficiency(0.198)));
  }

  TEST_CASE("binomial split weights") {
    CHECK(binomial_split_weight(0, 0) == 1.0);
    CHECK(binomial_split_weight(4, 2) == 6.0 / 16);
    CHECK_THROWS_AS(binomial_split_weight(3, 4), DomainError);
    for (int n : {10, 59, 60, 61, 200, 900}) {
      long double total = 0;
      for (int k = 0; k <= n; ++k) total += binomial_split_weight(n, k);
      CAPTURE(n);
      CHECK(static_cast<double>(total) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(binomial_split_weight(n, n / 3) == doctest::Approx(binomial_split_weight(n, n - n / 3)));
    }
    // log-space branch against an exact small-integer value: C(62, 31) / 2^62
    CHECK(binomial_split_weight(62, 31) ==
          doctest::Approx(465428353255261088.0 / std::ldexp(1.0, 62)).epsilon(1e-12));
  }

  TEST_CASE("split coincidences match the enumerated partition") {
    for (double x : {0.0135, 0.128, 0.392}) {
      for (auto [e1, e2, e3] : {std::tuple{0.215, 0.198, 0.163}, std::tuple{0.5, 0.9, 0.3},
                                std::tuple{0.125, 0.107, 0.088}}) {
        const RatePrediction r = split_coincidences(f, EmissionProbability(x), chain(e1, e2, e3));
        const oracle::Split o = oracle::split(x, e1, e2, e3);
        CAPTURE(x);
        CAPTURE(e1);
        // truncation leaves at most eps of probability mass per pulse out
        const auto within_tail = [](double got, oracle::real want) {
          return std::abs(got - f * static_cast<double>(want)) <=
                 f * kDefaultTruncationEpsilon + 1e-13 * std::abs(got);
        };
        CHECK(within_tail(r.sc1h, o.s1));
        CHECK(within_tail(r.cc12, o.cc12));
        CHECK(within_tail(r.cc13, o.cc13));
        CHECK(within_tail(r.cc123, o.cc123));
        CHECK(within_tail(r.cc12, oracle::cc12_closed(x, e1, e2)));
        const RatePrediction fine =
            split_coincidences(f, EmissionProbability(x), chain(e1, e2, e3), 1e-16);
        CHECK(fine.cc123 == doctest::Approx(f * static_cast<double>(o.cc123)).epsilon(1e-9));
        CHECK(fine.cc12 == doctest::Approx(f * static_cast<double>(o.cc12)).epsilon(1e-9));
        CHECK(r.cc123 <= std::min(r.cc12, r.cc13));
        CHECK(std::max(r.cc12, r.cc13) <= r.sc1h);
        CHECK(r.sc1h <= f);
      }
    }
  }

  TEST_CASE("a dead branch kills three-folds") {
    CHECK(split_coincidences(f, x400(), chain(0.5, 0.0, 0.4)).cc123 == 0.0);
    CHECK(split_coincidences(f, x400(), chain(0.5, 0.4, 0.0)).cc123 == 0.0);
  }

  TEST_CASE("split two-folds at the 10 mW point") {
    // branch efficiencies from the two-arm signal efficiency scaled by the
    // detector SDE ratio (detector 2: 0.68, detector 3: 0.56)
    const RatePrediction r =
        split_coincidences(f, x10(), chain(0.215, 0.198, 0.198 * 0.56 / 0.68));
    CHECK(r.cc12 + r.cc13 == doctest::Approx(40e3).epsilon(0.20));
  }

  TEST_CASE("small branch efficiencies give the factorial-moment limit") {
    const double x = 0.0135;
    const double small = 1e-4;
    // cc123 / f -> sum Pr(n) click1(n) (eta/2)^2 n (n - 1) as eta2 = eta3 -> 0
    for (double e1 : {0.215, 1e-4}) {
      const double limit = static_cast<double>(oracle::geometric_sum(x, [&](int n) {
        return oracle::click(n, e1) * small * small * n * (n - 1.0) / 4;
      }));
      const double got = split_coincidences(f, EmissionProbability(x), chain(e1, small, small)).cc123 / f;
      CAPTURE(e1);
      CHECK(got == doctest::Approx(limit).epsilon(0.01));
    }
    // with a small herald efficiency too, the herald factor becomes eta1 n
    const double e1 = 1e-4;
    const double linear = static_cast<double>(oracle::geometric_sum(x, [&](int n) {
      return e1 * n * small * small * n * (n - 1.0) / 4;
    }));
    CHECK(split_coincidences(f, EmissionProbability(x), chain(e1, small, small)).cc123 / f ==
          doctest::Approx(linear).epsilon(0.01));
  }

  TEST_CASE("split truncation cap") {
    CHECK_THROWS_AS(split_coincidences(f, EmissionProbability(0.9999), chain(0.5, 0.5, 0.5), 1e-16),
                    ResourceError);
  }

  TEST_CASE("detected versus incident") {
    for (double eta : {0.0, 0.3, 1.0}) {
      CHECK(detected_vs_incident(SourceKind::thermal, 0.0, Efficiency(eta), ResponseVariant::click) ==
            0.0);
    }
    CHECK(detected_vs_incident(SourceKind::coherent, 2.0, Efficiency(0.8), ResponseVariant::click) ==
          doctest::Approx(1 - std::exp(-1.6)).epsilon(1e-14));
    CHECK(detected_vs_incident(SourceKind::coherent, 2.0, Efficiency(0.8), ResponseVariant::click) ==
          doctest::Approx(0.7981).epsilon(1e-4));
    CHECK(detected_vs_incident(SourceKind::thermal, 2.0, Efficiency(0.8), ResponseVariant::click) ==
          doctest::Approx(1 - 1 / 2.6).epsilon(1e-14));
    CHECK(detected_vs_incident(SourceKind::thermal, 2.0, Efficiency(0.8), ResponseVariant::click) ==
          doctest::Approx(0.6154).epsilon(1e-4));
    CHECK_THROWS_AS(detected_vs_incident(SourceKind::thermal, -1.0, Efficiency(0.5),
                                         ResponseVariant::click),
                    DomainError);

    for (SourceKind s : {SourceKind::thermal, SourceKind::coherent}) {
      for (double mean : {0.01, 0.5, 2.0, 10.0, 50.0}) {
        for (double eta : {0.05, 0.5, 0.8, 1.0}) {
          CAPTURE(mean);
          CAPTURE(eta);
          const double click = detected_vs_incident(s, mean, Efficiency(eta), ResponseVariant::click);
          CHECK(click == doctest::Approx(detected_vs_incident_series(s, mean, Efficiency(eta),
                                                                      ResponseVariant::click))
                             .epsilon(1e-10));
          const double literal =
              detected_vs_incident(s, mean, Efficiency(eta), ResponseVariant::literal);
          const double expected = static_cast<double>(
              s == SourceKind::coherent ? oracle::literal_coherent(mean, eta)
                                        : oracle::literal_thermal(mean, eta));
          CHECK(literal == doctest::Approx(expected).epsilon(1e-9));
          const double miss = s == SourceKind::coherent ? std::exp(-eta * mean) : 1 / (1 + eta * mean);
          if (miss > 0x1p-53) CHECK(click < 1.0);
          CHECK(click <= 1.0);
        }
      }
    }
  }

  TEST_CASE("thermal parameter") {
    CHECK(thermal_parameter(0.0).value() == 0.0);
    CHECK(thermal_parameter(3.0).value() == 0.75);
    CHECK_THROWS_AS(thermal_parameter(-1.0), DomainError);
  }
}
