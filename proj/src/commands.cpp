#include "spdc/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <json.hpp>
#include <limits>
#include <ostream>

#include "spdc/csv.hpp"
#include "spdc/errors.hpp"
#include "spdc/tables.hpp"

namespace spdc {

namespace {

using nlohmann::json;

std::string output_path(const RunConfig& config, const std::string& name) {
  std::filesystem::create_directories(config.out_dir);
  return (std::filesystem::path(config.out_dir) / name).string();
}

// Runs a command body, mapping library errors to exit code 1.
template <typename Fn>
int guarded(std::ostream& log, Fn&& body) {
  try {
    return body();
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
  }
  return kExitInputError;
}

double ratio_sigma(double simulated, double predicted, double std_error) {
  if (std_error > 0.0) return (simulated - predicted) / std_error;
  return simulated == predicted ? 0.0 : std::numeric_limits<double>::infinity();
}

const char* mode_name(SimMode mode) {
  switch (mode) {
    case SimMode::two_arm:
      return "two_arm";
    case SimMode::heralded_split:
      return "heralded_split";
    case SimMode::saturation:
      return "saturation";
  }
  return "two_arm";
}

}  // namespace

void RunConfig::validate() const {
  if (!(rep_rate_hz > 0.0) || !std::isfinite(rep_rate_hz)) {
    throw InputError(fmt::format("--rep-rate {} must be positive", rep_rate_hz));
  }
  if (!(eps_trunc > 0.0 && eps_trunc < 1.0)) {
    throw InputError(fmt::format("--eps-trunc {} must lie in (0, 1)", eps_trunc));
  }
  if (!(tol_inv > 0.0 && tol_inv < 1.0)) {
    throw InputError(fmt::format("--tol-inv {} must lie in (0, 1)", tol_inv));
  }
  if (!(split.eta2_scale >= 0.0) || !(split.eta3_scale >= 0.0) ||
      !std::isfinite(split.eta2_scale) || !std::isfinite(split.eta3_scale)) {
    throw InputError("eta split scales must be finite and non-negative");
  }
}

int cmd_invert(const std::string& sweep_path, const RunConfig& config, std::ostream& log) {
  return guarded(log, [&] {
    config.validate();
    const std::vector<CountRecord> records = read_sweep(csv::read_file(sweep_path));
    InversionOptions options;
    options.tolerance = config.tol_inv;
    const std::vector<TableOneRow> rows = build_table(records, config.rep_rate_hz, options);
    csv::write_file(output_path(config, "table1.csv"), write_table_one_csv(rows));
    csv::write_file(output_path(config, "table1.json"),
                    write_table_one_json(rows, config.rep_rate_hz));
    int failed = 0;
    for (const TableOneRow& row : rows) {
      if (row.ok()) continue;
      ++failed;
      log << fmt::format("row {} mW: {}: {}\n", row.measured.power_mw, to_string(row.status),
                         row.diagnostic);
    }
    return failed ? kExitPartialFailure : kExitOk;
  });
}

int cmd_correlations(const std::string& table1_json_path, const RunConfig& config,
                     std::ostream& log, const std::optional<std::string>& reference_g2_path) {
  return guarded(log, [&] {
    config.validate();
    const std::vector<TableOneRow> rows = read_table_one_json(csv::read_file(table1_json_path));
    const std::vector<CorrelationReport> reports =
        build_table_two(rows, config.split, config.rep_rate_hz, config.eps_trunc);
    csv::write_file(output_path(config, "table2.csv"), write_table_two_csv(reports));
    csv::write_file(output_path(config, "table2.json"), write_table_two_json(reports));
    if (reference_g2_path) {
      const auto measured = read_measured_g2(csv::read_file(*reference_g2_path));
      csv::write_file(output_path(config, "g2_comparison.csv"),
                      write_g2_comparison_csv(compare_with_measured(reports, measured)));
    }
    int failed = 0;
    for (const TableOneRow& row : rows) {
      if (row.ok()) continue;
      ++failed;
      log << fmt::format("row {} mW skipped: {}\n", row.measured.power_mw, to_string(row.status));
    }
    return failed ? kExitPartialFailure : kExitOk;
  });
}

int cmd_saturation(const RunConfig& config, std::ostream& log, const SaturationRequest& request) {
  return guarded(log, [&] {
    config.validate();
    std::vector<SaturationCurve> curves;
    for (SourceKind source : {SourceKind::thermal, SourceKind::coherent}) {
      for (double eta : request.etas) {
        curves.push_back(
            curve(source, Efficiency(eta), config.variant, request.mean_grid, config.eps_trunc));
      }
    }
    csv::write_file(output_path(config, "curves.csv"), write_curves_csv(curves));
    return kExitOk;
  });
}

std::vector<SimComparison> compare_simulation(const SimConfig& sim, const SimCounts& counts,
                                              double rep_rate_hz, double epsilon) {
  std::vector<SimComparison> out;
  const double f = rep_rate_hz;
  const auto add_rate = [&](std::string name, std::uint64_t count, double predicted_rate) {
    const Estimate r = rate(count, counts.pulses, f);
    out.push_back({std::move(name), "counts/s", r.value, r.std_error, predicted_rate,
                   sigma_distance(count, counts.pulses, predicted_rate / f)});
  };

  switch (sim.mode) {
    case SimMode::two_arm: {
      const RatePrediction p = predict_two_arm(f, sim.x, sim.chain);
      add_rate("sc1", counts.clicks1, p.sc1);
      add_rate("sc2", counts.clicks2, p.sc2);
      add_rate("cc", counts.pair12, p.cc);
      break;
    }
    case SimMode::heralded_split: {
      const RatePrediction p = split_coincidences(f, sim.x, sim.chain, epsilon);
      add_rate("sc1", counts.clicks1, p.sc1h);
      add_rate("cc12", counts.pair12, p.cc12);
      add_rate("cc13", counts.pair13, p.cc13);
      add_rate("cc123", counts.triple123, p.cc123);
      if (const auto g2 = g2_estimate(counts); g2 && p.cc12 + p.cc13 > 0.0) {
        const double predicted = g2_heralded_predicted(sim.x, sim.chain, f, epsilon);
        out.push_back({"g2", "", g2->value, g2->std_error, predicted,
                       ratio_sigma(g2->value, predicted, g2->std_error)});
      }
      break;
    }
    case SimMode::saturation: {
      const double mean = sim.saturation.mean;
      const Efficiency eta = sim.chain.eta1;
      const Estimate click = frequency(counts.clicks1, counts.pulses);
      const double click_predicted = detected_vs_incident(sim.saturation.kind, mean, eta,
                                                          ResponseVariant::click, epsilon);
      out.push_back({"click_probability", "per pulse", click.value, click.std_error,
                     click_predicted, sigma_distance(counts.clicks1, counts.pulses,
                                                     click_predicted)});
      const Estimate weighted = photon_weighted_detection(counts);
      const double weighted_predicted = detected_vs_incident(sim.saturation.kind, mean, eta,
                                                             ResponseVariant::literal, epsilon);
      out.push_back({"photon_weighted_detection", "photons per pulse", weighted.value,
                     weighted.std_error, weighted_predicted,
                     ratio_sigma(weighted.value, weighted_predicted, weighted.std_error)});
      break;
    }
  }
  return out;
}

int cmd_simulate(const RunConfig& config, const SimulateRequest& request, std::ostream& log) {
  return guarded(log, [&] {
    config.validate();
    if (config.pulses == 0) throw InputError("--pulses must be at least 1");

    SimConfig sim;
    sim.pulses = config.pulses;
    sim.seed = config.seed;
    sim.mode = request.mode;
    sim.workers = config.threads;
    if (request.mode == SimMode::saturation) {
      sim.chain.eta1 = Efficiency(request.eta1);
      sim.saturation = {request.source, request.mean};
    } else {
      sim.x = EmissionProbability(request.x);
      if (request.mode == SimMode::heralded_split) {
        sim.chain = config.split.chain(request.eta1, request.eta2);
        if (request.eta3) sim.chain.eta3 = Efficiency(*request.eta3);
      } else {
        sim.chain = {Efficiency(request.eta1), Efficiency(request.eta2), Efficiency()};
      }
    }

    const SimCounts counts = simulate(sim);
    const std::vector<SimComparison> comparisons =
        compare_simulation(sim, counts, config.rep_rate_hz, config.eps_trunc);

    json out;
    out["config"] = {{"mode", mode_name(sim.mode)},
                     {"pulses", sim.pulses},
                     {"seed", sim.seed},
                     {"rep_rate_hz", config.rep_rate_hz},
                     {"x", sim.x.value()},
                     {"eta1", sim.chain.eta1.value()},
                     {"eta2", sim.chain.eta2.value()},
                     {"eta3", sim.chain.eta3.value()}};
    if (sim.mode == SimMode::saturation) {
      out["config"]["source_kind"] = to_string(sim.saturation.kind);
      out["config"]["mean"] = sim.saturation.mean;
    }
    out["tallies"] = {{"pulses", counts.pulses},
                      {"clicks1", counts.clicks1},
                      {"clicks2", counts.clicks2},
                      {"clicks3", counts.clicks3},
                      {"pair12", counts.pair12},
                      {"pair13", counts.pair13},
                      {"triple123", counts.triple123},
                      {"photons_on_click1", counts.photons_on_click1},
                      {"photons_on_click1_sq", counts.photons_on_click1_sq}};
    out["comparisons"] = json::array();
    bool agree = true;
    for (const SimComparison& c : comparisons) {
      const bool within = std::isfinite(c.sigma) && std::abs(c.sigma) <= kSigmaBand;
      agree = agree && within;
      out["comparisons"].push_back({{"name", c.name},
                                    {"unit", c.unit},
                                    {"simulated", c.simulated},
                                    {"std_error", c.std_error},
                                    {"predicted", c.predicted},
                                    {"sigma", std::isfinite(c.sigma) ? json(c.sigma) : json(nullptr)},
                                    {"within_band", within}});
      if (!within) {
        log << fmt::format("{}: simulated {} vs predicted {} ({} sigma)\n", c.name, c.simulated,
                           c.predicted, c.sigma);
      }
    }
    out["sigma_band"] = kSigmaBand;
    out["all_within_band"] = agree;
    csv::write_file(output_path(config, "simcounts.json"), out.dump(2) + "\n");
    return agree ? kExitOk : kExitMonteCarloDisagreement;
  });
}

}  // namespace spdc
