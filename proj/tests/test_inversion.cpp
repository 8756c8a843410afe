#include <doctest.h>

#include <cmath>
#include <random>

#include "spdc/detector_model.hpp"
#include "spdc/errors.hpp"
#include "spdc/inversion.hpp"

using namespace spdc;

namespace {

constexpr double f = 76e6;

struct Forward {
  double sc1, sc2, cc;
};

Forward forward(double power, double tau, double e1, double e2) {
  const EmissionProbability x = EmissionProbability::from_pump(power, tau);
  return {singles_rate(f, x, Efficiency(e1)), singles_rate(f, x, Efficiency(e2)),
          coincidence_rate(f, x, Efficiency(e1), Efficiency(e2))};
}

}  // namespace

TEST_SUITE("parameter_inversion") {
  TEST_CASE("table rows at 10 and 400 mW") {
    const InversionResult low = invert_counts(f, 10, 223e3, 205e3, 45e3);
    CHECK(low.tau == doctest::Approx(0.00135).epsilon(0.02));
    CHECK(low.eta1 == doctest::Approx(0.215).epsilon(0.02));
    CHECK(low.eta2 == doctest::Approx(0.198).epsilon(0.02));
    const InversionResult high = invert_counts(f, 400, 5.626e6, 4.865e6, 1.170e6);
    CHECK(high.tau == doctest::Approx(0.00098).epsilon(0.02));
    CHECK(high.eta1 == doctest::Approx(0.125).epsilon(0.02));
    CHECK(high.eta2 == doctest::Approx(0.107).epsilon(0.02));
  }

  TEST_CASE("synthetic round trip recovers the generating triple") {
    const Forward r = forward(50, 0.002, 0.3, 0.25);
    const InversionResult inv = invert_counts(f, 50, r.sc1, r.sc2, r.cc);
    CHECK(inv.tau == doctest::Approx(0.002).epsilon(1e-8));
    CHECK(inv.eta1 == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(inv.eta2 == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(inv.residual <= 1e-9);
  }

  TEST_CASE("randomized round trip") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> log_x(std::log(1e-4), std::log(0.6));
    std::uniform_real_distribution<double> eta(0.02, 0.98);
    std::uniform_real_distribution<double> power(1, 500);
    int failures = 0;
    for (int i = 0; i < 300; ++i) {
      const double p = power(rng);
      const double x = std::exp(log_x(rng));
      const double e1 = eta(rng), e2 = eta(rng);
      const Forward r = forward(p, x / p, e1, e2);
      try {
        const InversionResult inv = invert_counts(f, p, r.sc1, r.sc2, r.cc);
        const bool ok = std::abs(inv.tau * p / x - 1) <= 1e-6 &&
                        std::abs(inv.eta1 / e1 - 1) <= 1e-6 && std::abs(inv.eta2 / e2 - 1) <= 1e-6;
        if (!ok) {
          ++failures;
          MESSAGE("mismatch at x=" << x << " eta1=" << e1 << " eta2=" << e2);
        }
      } catch (const Error& e) {
        ++failures;
        MESSAGE("failed at x=" << x << ": " << e.what());
      }
    }
    CHECK(failures == 0);
  }

  TEST_CASE("fallback solver reaches the same root") {
    InversionOptions forced;
    forced.newton_iterations = 0;
    const InversionResult newton = invert_counts(f, 100, 2025e3, 1800e3, 406e3);
    const InversionResult fallback = invert_counts(f, 100, 2025e3, 1800e3, 406e3, forced);
    CHECK(fallback.used_fallback);
    CHECK_FALSE(newton.used_fallback);
    CHECK(fallback.tau == doctest::Approx(newton.tau).epsilon(1e-8));
    CHECK(fallback.eta1 == doctest::Approx(newton.eta1).epsilon(1e-8));
    CHECK(fallback.eta2 == doctest::Approx(newton.eta2).epsilon(1e-8));
  }

  TEST_CASE("reported residual is the actual mismatch") {
    const InversionResult inv = invert_counts(f, 200, 3510e3, 3093e3, 721e3);
    const double actual = equation_residual(f, 200 * inv.tau, inv.eta1, inv.eta2, 3510e3, 3093e3, 721e3);
    CHECK(inv.residual == doctest::Approx(actual).epsilon(1e-6));
    CHECK(inv.residual <= 1e-9);
  }

  TEST_CASE("inconsistent and invalid data") {
    CHECK_THROWS_AS(invert_counts(f, 10, 2, 2, 4), DataInconsistencyError);
    CHECK_THROWS_AS(invert_counts(f, 10, 223e3, 205e3, 0), DataInconsistencyError);
    CHECK_THROWS_AS(invert_counts(f, 10, 223e3, 205e3, 300e3), DataInconsistencyError);
    CHECK_THROWS_AS(invert_counts(f, 10, 80e6, 80e6, 1e6), DataInconsistencyError);
    CHECK_THROWS_AS(invert_counts(f, 0, 223e3, 205e3, 45e3), DomainError);
    CHECK_THROWS_AS(invert_counts(0, 10, 223e3, 205e3, 45e3), DomainError);
  }

  TEST_CASE("no root carries the best residual") {
    // far fewer coincidences than uncorrelated arms would give: no x < 1 fits
    try {
      (void)invert_counts(f, 10, 1e6, 1e6, 100);
      FAIL("expected an inversion failure");
    } catch (const InversionFailure& e) {
      CHECK(e.best_residual() > 1e-9);
    }
  }

  TEST_CASE("naive pair rate") {
    CHECK(naive_pair_rate(223e3, 205e3, 45e3) == doctest::Approx(1.016e6).epsilon(1e-3));
    CHECK(naive_pair_rate(7, 7, 7) == 7.0);
    CHECK_THROWS_AS(naive_pair_rate(1, 1, 0), DomainError);
  }

  TEST_CASE("detection efficiency from an attenuated laser") {
    const double h = 6.62607015e-34, c = 299792458.0;
    const double p = 2e-13, lambda = 1550e-9;
    CHECK(sde_from_attenuated_laser(p * lambda / (h * c), p, lambda) == doctest::Approx(1.0));
    CHECK(sde_from_attenuated_laser(0, p, lambda) == 0.0);
    CHECK(sde_from_attenuated_laser(4.75e5, 1e-13, 1550e-9) == doctest::Approx(0.609).epsilon(1e-3));
    CHECK_THROWS_AS(sde_from_attenuated_laser(1, 0, lambda), DomainError);
    CHECK_THROWS_AS(sde_from_attenuated_laser(1, p, -1), DomainError);
  }

  TEST_CASE("build table isolates failing rows") {
    CHECK(build_table({}, f).empty());
    const std::vector<CountRecord> records = {
        {10, 223e3, 205e3, 45e3, std::nullopt},
        {20, 447e3, 405e3, 500e3, std::nullopt},
        {30, 657e3, 594e3, 136e3, std::nullopt},
        {40, -1, 772e3, 176e3, std::nullopt}};
    const std::vector<TableOneRow> rows = build_table(records, f);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].ok());
    CHECK(rows[1].status == RowStatus::inconsistent);
    CHECK_FALSE(rows[1].diagnostic.empty());
    CHECK(rows[2].ok());
    CHECK_FALSE(rows[3].ok());
    const EmissionProbability x = EmissionProbability::from_pump(10, rows[0].tau);
    CHECK(rows[0].pair_rate == pair_rate(f, x));
    CHECK(rows[0].one_pair_rate == one_pair_rate(f, x));
    CHECK(rows[0].mean_pairs == mean_pairs_per_pulse(x));
  }

  TEST_CASE("poisson parameter bands shrink with counting time") {
    const CountRecord r{100, 2025e3, 1800e3, 406e3, std::nullopt};
    const ParameterBands one = poisson_parameter_bands(f, r, 1.0);
    const ParameterBands hundred = poisson_parameter_bands(f, r, 100.0);
    CHECK(one.tau > 0);
    CHECK(hundred.tau == doctest::Approx(one.tau / 10).epsilon(0.05));
    CHECK(hundred.eta1 == doctest::Approx(one.eta1 / 10).epsilon(0.05));
  }
}
