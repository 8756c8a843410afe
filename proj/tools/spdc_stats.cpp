// spdc_stats: pair-source count-rate inversion, correlation tables,
// detector saturation curves and Monte Carlo cross-checks.

#include <CLI11.hpp>
#include <iostream>
#include <map>

#include "spdc/commands.hpp"
#include "spdc/errors.hpp"

int main(int argc, char** argv) {
  spdc::RunConfig config;
  CLI::App app{"Photon-pair statistics through bucket detectors"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", "spdc_stats 0.1.0");

  app.add_option("--rep-rate", config.rep_rate_hz, "Pump repetition rate f in Hz")
      ->capture_default_str();
  app.add_option("--eps-trunc,--epsilon", config.eps_trunc,
                 "Tail mass bound for truncated photon-number series")
      ->capture_default_str();
  app.add_option("--tol-inv,--tolerance", config.tol_inv,
                 "Relative residual tolerance of the rate inversion")
      ->capture_default_str();
  app.add_option("--eta3-scale", config.split.eta3_scale,
                 "Detector-3 efficiency / two-arm signal efficiency")
      ->capture_default_str();
  app.add_option("--eta2-scale", config.split.eta2_scale,
                 "Detector-2 efficiency / two-arm signal efficiency")
      ->capture_default_str();
  const std::map<std::string, spdc::ResponseVariant> variants = {
      {"click", spdc::ResponseVariant::click}, {"literal", spdc::ResponseVariant::literal}};
  app.add_option("--variant", config.variant, "Saturation response: click or literal")
      ->transform(CLI::CheckedTransformer(variants, CLI::ignore_case))
      ->default_str("click");
  app.add_option("--seed", config.seed, "Monte Carlo seed")->capture_default_str();
  app.add_option("--pulses", config.pulses, "Monte Carlo pulse count")->capture_default_str();
  app.add_option("--threads", config.threads,
                 "Monte Carlo worker threads (0: SPDC_STATS_THREADS or all cores)")
      ->capture_default_str();
  app.add_option("--out", config.out_dir, "Output directory")->capture_default_str();

  std::string sweep_path;
  auto* invert = app.add_subcommand("invert", "sweep.csv -> table1.csv, table1.json");
  invert->add_option("sweep", sweep_path, "Measured sweep CSV")->required();

  std::string table1_path;
  std::string reference_path;
  auto* correlations =
      app.add_subcommand("correlations", "table1.json -> table2.csv, table2.json");
  correlations->add_option("table1", table1_path, "Inversion output JSON")->required();
  correlations->add_option("--reference", reference_path,
                           "Measured g2 points (power_mw, g2) for g2_comparison.csv");

  spdc::SaturationRequest saturation_request;
  int grid_points = 60;
  double grid_min = 1e-2;
  double grid_max = 1e2;
  auto* saturation = app.add_subcommand("saturation", "curves.csv for thermal and coherent input");
  saturation->add_option("--eta", saturation_request.etas, "Detection efficiencies")
      ->capture_default_str();
  saturation->add_option("--grid-points", grid_points, "Mean photon grid size")
      ->capture_default_str();
  saturation->add_option("--grid-min", grid_min, "Smallest mean photon number")
      ->capture_default_str();
  saturation->add_option("--grid-max", grid_max, "Largest mean photon number")
      ->capture_default_str();

  spdc::SimulateRequest sim;
  double eta3 = -1.0;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo tallies -> simcounts.json");
  const std::map<std::string, spdc::SimMode> modes = {
      {"two_arm", spdc::SimMode::two_arm},
      {"heralded_split", spdc::SimMode::heralded_split},
      {"saturation", spdc::SimMode::saturation}};
  const std::map<std::string, spdc::SourceKind> sources = {
      {"thermal", spdc::SourceKind::thermal}, {"coherent", spdc::SourceKind::coherent}};
  simulate->add_option("--mode", sim.mode, "two_arm, heralded_split or saturation")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case))
      ->default_str("two_arm");
  simulate->add_option("--x", sim.x, "Emission probability per pulse")->capture_default_str();
  simulate->add_option("--eta1", sim.eta1, "Idler efficiency")->capture_default_str();
  simulate->add_option("--eta2", sim.eta2, "Signal efficiency")->capture_default_str();
  simulate->add_option("--eta3", eta3, "Detector-3 efficiency (heralded_split)");
  simulate->add_option("--source", sim.source, "Saturation input: thermal or coherent")
      ->transform(CLI::CheckedTransformer(sources, CLI::ignore_case))
      ->default_str("thermal");
  simulate->add_option("--mean", sim.mean, "Saturation input mean photon number")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return spdc::kExitInputError;
  }

  if (*invert) return spdc::cmd_invert(sweep_path, config, std::cerr);
  if (*correlations) {
    std::optional<std::string> reference;
    if (!reference_path.empty()) reference = reference_path;
    return spdc::cmd_correlations(table1_path, config, std::cerr, reference);
  }
  if (*saturation) {
    try {
      saturation_request.mean_grid = spdc::log_grid(grid_min, grid_max, grid_points);
    } catch (const spdc::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return spdc::kExitInputError;
    }
    return spdc::cmd_saturation(config, std::cerr, saturation_request);
  }
  if (eta3 >= 0.0) sim.eta3 = eta3;
  return spdc::cmd_simulate(config, sim, std::cerr);
}
