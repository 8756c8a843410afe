#pragma once

// File schemas. Powers in mW, rates in counts/s, f in Hz. Every writer has
// a reader that restores the same in-memory table.

#include <string>
#include <string_view>
#include <vector>

#include "spdc/correlation.hpp"
#include "spdc/inversion.hpp"
#include "spdc/saturation.hpp"

namespace spdc {

/// Measured sweep: columns power_mw, sc1, sc2, cc, optionally cc12, cc13,
/// cc123 (all three or none). Powers strictly increasing, counts
/// non-negative, and per row the heralded columns are all filled or all
/// empty. Violations throw InputError with the line number.
[[nodiscard]] std::vector<CountRecord> read_sweep(std::string_view text);
[[nodiscard]] std::string write_sweep(const std::vector<CountRecord>& records);

/// Reconstructed table1: measured columns, status, recovered parameters
/// and derived pair rates, one row per power.
[[nodiscard]] std::string write_table_one_csv(const std::vector<TableOneRow>& rows);
[[nodiscard]] std::vector<TableOneRow> read_table_one_csv(std::string_view text);

[[nodiscard]] std::string write_table_one_json(const std::vector<TableOneRow>& rows,
                                               double rep_rate_hz);
/// Throws InputError on a schema violation.
[[nodiscard]] std::vector<TableOneRow> read_table_one_json(std::string_view text);

/// Seven correlation columns per power; "-" marks an empty entry.
inline constexpr std::string_view kMissingEntry = "-";

[[nodiscard]] std::string write_table_two_csv(const std::vector<CorrelationReport>& reports);
/// Values only; provenance and notes live in the JSON form.
[[nodiscard]] std::vector<CorrelationReport> read_table_two_csv(std::string_view text);

[[nodiscard]] std::string write_table_two_json(const std::vector<CorrelationReport>& reports);
[[nodiscard]] std::vector<CorrelationReport> read_table_two_json(std::string_view text);

/// Long format: source_kind, eta, variant, mean, detected.
[[nodiscard]] std::string write_curves_csv(const std::vector<SaturationCurve>& curves);
[[nodiscard]] std::vector<SaturationCurve> read_curves_csv(std::string_view text);

/// Reference g2 points: columns power_mw, g2, and optionally cc123.
[[nodiscard]] std::vector<MeasuredG2> read_measured_g2(std::string_view text);
[[nodiscard]] std::string write_g2_comparison_csv(const std::vector<G2Comparison>& rows);

}  // namespace spdc
