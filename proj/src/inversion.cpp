#include "spdc/inversion.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numeric>

#include "spdc/detector_model.hpp"
#include "spdc/errors.hpp"

namespace spdc {

namespace {

// Exact SI values (2019 redefinition).
constexpr double kPlanck = 6.62607015e-34;     // J s
constexpr double kSpeedOfLight = 299792458.0;  // m/s

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// Per-pulse measured probabilities s1 = SC1/f, s2 = SC2/f, c = CC/f.
struct Targets {
  double s1;
  double s2;
  double c;
};

struct Model {
  double s1;
  double s2;
  double c;
};

Model evaluate(double x, double eta1, double eta2) {
  const double a = 1.0 - eta1;
  const double b = 1.0 - eta2;
  Model m;
  m.s1 = x * eta1 / (1.0 - a * x);
  m.s2 = x * eta2 / (1.0 - b * x);
  m.c = x * eta1 * eta2 * (1.0 - a * b * x * x) /
        ((1.0 - a * x) * (1.0 - b * x) * (1.0 - a * b * x));
  return m;
}

double relative_residual(const Model& m, const Targets& t) {
  return std::max({std::abs(m.s1 / t.s1 - 1.0), std::abs(m.s2 / t.s2 - 1.0),
                   std::abs(m.c / t.c - 1.0)});
}

// Log residuals and their Jacobian with respect to (logit x, logit eta1,
// logit eta2).
struct Linearization {
  Eigen::Vector3d residual;
  Eigen::Matrix3d jacobian;
  double relative = 0.0;
};

Linearization linearize(const Eigen::Vector3d& u, const Targets& t) {
  const double x = logistic(u[0]);
  const double eta1 = logistic(u[1]);
  const double eta2 = logistic(u[2]);
  const double a = 1.0 - eta1;
  const double b = 1.0 - eta2;
  const Model m = evaluate(x, eta1, eta2);

  Linearization lin;
  lin.residual << std::log(m.s1 / t.s1), std::log(m.s2 / t.s2), std::log(m.c / t.c);
  lin.relative = relative_residual(m, t);

  const double ax = 1.0 - a * x;
  const double bx = 1.0 - b * x;
  const double abx = 1.0 - a * b * x;
  const double abx2 = 1.0 - a * b * x * x;

  // d ln(model) / d(x, eta1, eta2)
  Eigen::Matrix3d d;
  d(0, 0) = 1.0 / x + a / ax;
  d(0, 1) = 1.0 / eta1 - x / ax;
  d(0, 2) = 0.0;
  d(1, 0) = 1.0 / x + b / bx;
  d(1, 1) = 0.0;
  d(1, 2) = 1.0 / eta2 - x / bx;
  d(2, 0) = 1.0 / x - 2.0 * a * b * x / abx2 + a / ax + b / bx + a * b / abx;
  // eta1 enters through a = 1 - eta1
  d(2, 1) = 1.0 / eta1 - (-b * x * x / abx2 + x / ax + b * x / abx);
  d(2, 2) = 1.0 / eta2 - (-a * x * x / abx2 + x / bx + a * x / abx);

  const Eigen::Vector3d chain(x * (1.0 - x), eta1 * (1.0 - eta1), eta2 * (1.0 - eta2));
  lin.jacobian = d * chain.asDiagonal();
  return lin;
}

struct Solution {
  double x = 0.0;
  double eta1 = 0.0;
  double eta2 = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

Solution newton(const Targets& t, double x0, double eta1_0, double eta2_0,
                const InversionOptions& options) {
  const auto clamp_open = [](double p) { return std::clamp(p, 1e-12, 1.0 - 1e-9); };
  Eigen::Vector3d u(logit(clamp_open(x0)), logit(clamp_open(eta1_0)),
                    logit(clamp_open(eta2_0)));

  Solution best;
  Linearization lin = linearize(u, t);
  int polish = 0;
  const int limit = std::min(options.newton_iterations, options.max_iterations);
  for (int it = 0; it < limit; ++it) {
    if (lin.relative < best.residual) {
      best = {logistic(u[0]), logistic(u[1]), logistic(u[2]), lin.relative, it, false};
    }
    if (lin.relative <= options.tolerance) {
      best.converged = true;
      // a few extra steps take the residual down to rounding level
      if (++polish > 3) break;
    }

    Eigen::Vector3d step = lin.jacobian.fullPivLu().solve(-lin.residual);
    if (!step.allFinite()) break;
    const double largest = step.cwiseAbs().maxCoeff();
    if (largest > 4.0) step *= 4.0 / largest;

    const double norm = lin.residual.norm();
    double scale = 1.0;
    Linearization trial = linearize(u + step, t);
    while (!(trial.residual.allFinite() && trial.residual.norm() < norm) && scale > 1e-4) {
      scale *= 0.5;
      trial = linearize(u + scale * step, t);
    }
    if (!(trial.residual.allFinite() && trial.residual.norm() < norm)) break;  // stalled
    u += scale * step;
    lin = trial;
  }
  if (lin.relative < best.residual) {
    best = {logistic(u[0]), logistic(u[1]), logistic(u[2]), lin.relative, limit,
            lin.relative <= options.tolerance};
  }
  return best;
}

// Efficiency that reproduces singles probability s at emission probability x.
double efficiency_for_singles(double s, double x) { return s * (1.0 - x) / (x * (1.0 - s)); }

Solution bracketed(const Targets& t, const InversionOptions& options) {
  const auto mismatch = [&](double x) {
    const double eta1 = std::min(1.0, efficiency_for_singles(t.s1, x));
    const double eta2 = std::min(1.0, efficiency_for_singles(t.s2, x));
    return std::log(evaluate(x, eta1, eta2).c / t.c);
  };

  double lo = std::max(t.s1, t.s2);
  double hi = 1.0 - 1e-12;
  double f_lo = mismatch(lo);
  const double f_hi = mismatch(hi);
  Solution out;
  if (!(f_lo * f_hi <= 0.0)) return out;

  int it = 0;
  for (; it < options.max_iterations && hi - lo > 1e-17 * hi; ++it) {
    const double mid = std::midpoint(lo, hi);
    const double f_mid = mismatch(mid);
    if ((f_mid <= 0.0) == (f_lo <= 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  out.x = std::midpoint(lo, hi);
  out.eta1 = std::min(1.0, efficiency_for_singles(t.s1, out.x));
  out.eta2 = std::min(1.0, efficiency_for_singles(t.s2, out.x));
  out.residual = relative_residual(evaluate(out.x, out.eta1, out.eta2), t);
  out.iterations = it;
  out.converged = out.residual <= options.tolerance;
  return out;
}

void require_finite_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(fmt::format("{} = {} must be positive and finite", what, value));
  }
}

}  // namespace

double equation_residual(double rep_rate_hz, double x, double eta1, double eta2, double sc1,
                         double sc2, double cc) {
  const Targets t{sc1 / rep_rate_hz, sc2 / rep_rate_hz, cc / rep_rate_hz};
  return relative_residual(evaluate(x, eta1, eta2), t);
}

InversionResult invert_counts(double rep_rate_hz, double power_mw, double sc1, double sc2,
                              double cc, const InversionOptions& options) {
  require_finite_positive(rep_rate_hz, "repetition rate");
  require_finite_positive(power_mw, "pump power");
  if (!(sc1 > 0.0) || !(sc2 > 0.0)) {
    throw DataInconsistencyError(fmt::format("singles sc1 = {}, sc2 = {} must be positive",
                                             sc1, sc2));
  }
  if (!(cc > 0.0)) {
    throw DataInconsistencyError(fmt::format("coincidences cc = {} must be positive", cc));
  }
  if (cc > std::min(sc1, sc2)) {
    throw DataInconsistencyError(fmt::format(
        "coincidences cc = {} exceed min(sc1, sc2) = {}", cc, std::min(sc1, sc2)));
  }
  if (std::max(sc1, sc2) >= rep_rate_hz) {
    throw DataInconsistencyError(fmt::format(
        "singles rate {} reaches the repetition rate {}", std::max(sc1, sc2), rep_rate_hz));
  }

  const Targets t{sc1 / rep_rate_hz, sc2 / rep_rate_hz, cc / rep_rate_hz};
  const double x0 = std::min(sc1 * sc2 / (cc * rep_rate_hz), 0.5);
  Solution s = newton(t, x0, cc / sc2, cc / sc1, options);
  bool fallback = false;
  if (!s.converged) {
    Solution b = bracketed(t, options);
    fallback = true;
    b.iterations += s.iterations;
    if (b.residual < s.residual || b.converged) s = b;
  }
  if (!s.converged) {
    throw InversionFailure(
        fmt::format("no (tau, eta1, eta2) reproduces sc1 = {}, sc2 = {}, cc = {} at {} mW; "
                    "best relative residual {:.3g}",
                    sc1, sc2, cc, power_mw, s.residual),
        s.residual);
  }

  InversionResult result;
  result.tau = s.x / power_mw;
  result.eta1 = s.eta1;
  result.eta2 = s.eta2;
  result.residual = s.residual;
  result.iterations = s.iterations;
  result.used_fallback = fallback;
  return result;
}

double naive_pair_rate(double sc1, double sc2, double cc) {
  if (cc == 0.0) throw DomainError("naive pair rate needs a non-zero coincidence rate");
  return sc1 * sc2 / cc;
}

double sde_from_attenuated_laser(double sc, double power_w, double wavelength_m) {
  require_finite_positive(power_w, "optical power");
  require_finite_positive(wavelength_m, "wavelength");
  if (!(sc >= 0.0)) throw DomainError(fmt::format("count rate {} is negative", sc));
  const double photon_flux = power_w * wavelength_m / (kPlanck * kSpeedOfLight);
  return sc / photon_flux;
}

std::string to_string(RowStatus status) {
  switch (status) {
    case RowStatus::ok:
      return "ok";
    case RowStatus::inconsistent:
      return "inconsistent";
    case RowStatus::inversion_failed:
      return "inversion_failed";
    case RowStatus::invalid:
      return "invalid";
  }
  return "invalid";
}

std::vector<TableOneRow> build_table(const std::vector<CountRecord>& records,
                                     double rep_rate_hz, const InversionOptions& options) {
  std::vector<TableOneRow> table;
  table.reserve(records.size());
  for (const CountRecord& record : records) {
    TableOneRow row;
    row.measured = record;
    try {
      const InversionResult inv =
          invert_counts(rep_rate_hz, record.power_mw, record.sc1, record.sc2, record.cc, options);
      const EmissionProbability x = EmissionProbability::from_pump(record.power_mw, inv.tau);
      row.tau = inv.tau;
      row.eta1 = inv.eta1;
      row.eta2 = inv.eta2;
      row.residual = inv.residual;
      row.iterations = inv.iterations;
      row.pair_rate = pair_rate(rep_rate_hz, x);
      row.one_pair_rate = one_pair_rate(rep_rate_hz, x);
      row.mean_pairs = mean_pairs_per_pulse(x);
    } catch (const DataInconsistencyError& e) {
      row.status = RowStatus::inconsistent;
      row.diagnostic = e.what();
    } catch (const InversionFailure& e) {
      row.status = RowStatus::inversion_failed;
      row.diagnostic = e.what();
      row.residual = e.best_residual();
    } catch (const Error& e) {
      row.status = RowStatus::invalid;
      row.diagnostic = e.what();
    }
    table.push_back(std::move(row));
  }
  return table;
}

ParameterBands poisson_parameter_bands(double rep_rate_hz, const CountRecord& record,
                                       double counting_time_s, const InversionOptions& options) {
  require_finite_positive(counting_time_s, "counting time");
  const auto solve = [&](double sc1, double sc2, double cc) {
    return invert_counts(rep_rate_hz, record.power_mw, sc1, sc2, cc, options);
  };
  const auto sigma = [&](double rate) { return std::sqrt(rate * counting_time_s) / counting_time_s; };

  ParameterBands bands;
  const auto accumulate = [&](const InversionResult& up, const InversionResult& down) {
    bands.tau += std::pow(0.5 * (up.tau - down.tau), 2);
    bands.eta1 += std::pow(0.5 * (up.eta1 - down.eta1), 2);
    bands.eta2 += std::pow(0.5 * (up.eta2 - down.eta2), 2);
  };
  const double d1 = sigma(record.sc1);
  const double d2 = sigma(record.sc2);
  const double dc = sigma(record.cc);
  accumulate(solve(record.sc1 + d1, record.sc2, record.cc),
             solve(record.sc1 - d1, record.sc2, record.cc));
  accumulate(solve(record.sc1, record.sc2 + d2, record.cc),
             solve(record.sc1, record.sc2 - d2, record.cc));
  accumulate(solve(record.sc1, record.sc2, record.cc + dc),
             solve(record.sc1, record.sc2, record.cc - dc));
  bands.tau = std::sqrt(bands.tau);
  bands.eta1 = std::sqrt(bands.eta1);
  bands.eta2 = std::sqrt(bands.eta2);
  return bands;
}

}  // namespace spdc
