#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spdc/errors.hpp"
#include "spdc/photon_statistics.hpp"

using namespace spdc;

TEST_SUITE("photon_statistics") {
  TEST_CASE("emission probability domain") {
    CHECK_NOTHROW(EmissionProbability(0.0));
    CHECK_NOTHROW(EmissionProbability(0.999));
    CHECK_THROWS_AS(EmissionProbability(1.0), DomainError);
    CHECK_THROWS_AS(EmissionProbability(-1e-9), DomainError);
    CHECK_THROWS_AS(EmissionProbability(std::nan("")), DomainError);
    CHECK(EmissionProbability::from_pump(10, 0.00135).value() == doctest::Approx(0.0135));
    CHECK(EmissionProbability(0.25).gamma() == doctest::Approx(0.5));
    CHECK_THROWS_AS(EmissionProbability::from_pump(1000, 0.001), DomainError);
  }

  TEST_CASE("pair probability examples") {
    CHECK(pair_probability(0, EmissionProbability(0.0)) == 1.0);
    CHECK(pair_probability(1, EmissionProbability(0.5)) == 0.25);
    const double x = 0.0135;
    CHECK(pair_probability(2, EmissionProbability(x)) ==
          doctest::Approx((1 - x) * x * x).epsilon(1e-14));
    CHECK(pair_probability(2, EmissionProbability(x)) == doctest::Approx(1.798e-4).epsilon(1e-3));
    CHECK(pair_probability(3, EmissionProbability(0.0)) == 0.0);
    CHECK_THROWS_AS(pair_probability(-1, EmissionProbability(0.1)), DomainError);
  }

  TEST_CASE("normalization with exact tail") {
    for (double x = 0.0; x <= 0.99; x += 0.01) {
      const PairDistribution d = PairDistribution::truncated(EmissionProbability(x));
      long double sum = 0;
      for (int n = 0; n <= d.n_max; ++n) sum += d.probability(n);
      CAPTURE(x);
      CHECK(std::abs(static_cast<double>(sum) + d.tail_mass - 1.0) <= 1e-12);
      CHECK(d.tail_mass <= kDefaultTruncationEpsilon);
      CHECK(d.tail_mass == doctest::Approx(std::pow(x, d.n_max + 1)).epsilon(1e-12));
      CHECK(d.n_max >= 1);
    }
  }

  TEST_CASE("mean pairs per pulse") {
    CHECK(mean_pairs_per_pulse(EmissionProbability(0.0)) == 0.0);
    CHECK(std::abs(mean_pairs_per_pulse(EmissionProbability::from_pump(10, 0.00135)) - 0.014) <=
          0.001);
    CHECK(std::abs(mean_pairs_per_pulse(EmissionProbability::from_pump(400, 0.00098)) - 0.640) <=
          0.01);
    double previous = -1.0;
    for (double x = 0.0; x < 0.99; x += 0.0123) {
      const EmissionProbability e(x);
      const double closed = mean_pairs_per_pulse(e);
      const int n_max = truncation_order(e);
      CAPTURE(x);
      CHECK(std::abs(mean_pairs_per_pulse_series(e) - closed) <=
            kDefaultTruncationEpsilon * n_max * 10 * std::max(1.0, closed));
      CHECK(closed == doctest::Approx(static_cast<double>(
                          oracle::geometric_sum(x, [](int n) { return oracle::real(n); })))
                          .epsilon(1e-12));
      CHECK(closed > previous);
      previous = closed;
    }
  }

  TEST_CASE("pair and one-pair rates") {
    const double f = 76e6;
    CHECK(pair_rate(f, EmissionProbability::from_pump(10, 0.00135)) ==
          doctest::Approx(1.04e6).epsilon(0.02));
    CHECK(pair_rate(f, EmissionProbability::from_pump(400, 0.00098)) ==
          doctest::Approx(48.62e6).epsilon(0.02));
    CHECK(pair_rate(f, EmissionProbability(0.0)) == 0.0);
    CHECK(one_pair_rate(f, EmissionProbability::from_pump(10, 0.00135)) ==
          doctest::Approx(1.01e6).epsilon(0.02));
    CHECK(one_pair_rate(f, EmissionProbability::from_pump(400, 0.00098)) ==
          doctest::Approx(18.08e6).epsilon(0.02));
    CHECK(one_pair_rate(f, EmissionProbability(0.0)) == 0.0);
    CHECK_THROWS_AS(pair_rate(0.0, EmissionProbability(0.1)), DomainError);
    CHECK_THROWS_AS(one_pair_rate(-1.0, EmissionProbability(0.1)), DomainError);
  }

  TEST_CASE("truncation order") {
    CHECK(truncation_order(EmissionProbability(0.0), 1e-3) == 1);
    CHECK(truncation_order(EmissionProbability(0.5), 1e-12) == 39);
    CHECK(truncation_order(EmissionProbability(0.392), 1e-12) == 29);
    for (double x : {1e-8, 0.01, 0.1, 0.3, 0.5, 0.9, 0.99}) {
      for (double eps : {1e-3, 1e-12, 1e-16}) {
        const int n = truncation_order(EmissionProbability(x), eps);
        CAPTURE(x);
        CAPTURE(eps);
        CHECK(n >= 1);
        CHECK(std::pow(x, n + 1) <= eps);
        if (n > 1) CHECK(std::pow(x, n) > eps);
      }
    }
    CHECK_THROWS_AS(truncation_order(EmissionProbability(0.5), 0.0), DomainError);
    CHECK_THROWS_AS(truncation_order(EmissionProbability(0.5), 1.0), DomainError);
    CHECK_THROWS_AS(truncation_order(EmissionProbability(0.9999), 1e-16), ResourceError);
  }

  TEST_CASE("poisson distribution") {
    CHECK(poisson_probability(0, 0.0) == 1.0);
    CHECK(poisson_probability(2, 0.0) == 0.0);
    CHECK(poisson_probability(3, 2.0) == doctest::Approx(std::exp(-2.0) * 8 / 6).epsilon(1e-13));
    CHECK_THROWS_AS(CoherentDistribution(-0.1), DomainError);
    for (double nu = 0.0; nu <= 20.0; nu += 0.5) {
      const CoherentDistribution d(nu);
      const int n_max = d.truncation_order();
      long double sum = 0;
      for (int n = 0; n <= n_max; ++n) sum += d.probability(n);
      CAPTURE(nu);
      CHECK(std::abs(1.0L - sum) <= kDefaultTruncationEpsilon);
      if (nu > 0)
        CHECK(d.probability(n_max / 2) ==
            doctest::Approx(static_cast<double>(oracle::poisson(n_max / 2, nu))).epsilon(1e-12));
    }
  }

  TEST_CASE("geometric expectation") {
    CHECK(geometric_expectation([](int) { return 3.0; }, EmissionProbability(0.0)) == 3.0);
    for (double x : {1e-4, 0.0135, 0.392, 0.8}) {
      const double got = geometric_expectation([](int n) { return n * (n - 1.0); },
                                               EmissionProbability(x));
      CHECK(got == doctest::Approx(2 * x * x / ((1 - x) * (1 - x))).epsilon(1e-13));
    }
  }
}
