#include "spdc/tables.hpp"

#include <algorithm>
#include <array>
#include <fmt/format.h>
#include <json.hpp>

#include "spdc/csv.hpp"
#include "spdc/errors.hpp"

namespace spdc {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 4> kSweepRequired = {"power_mw", "sc1", "sc2", "cc"};
constexpr std::array<std::string_view, 3> kSweepHeralded = {"cc12", "cc13", "cc123"};

const std::vector<std::string> kTableOneHeader = {
    "power_mw", "sc1",       "sc2",           "cc",         "cc12",     "cc13",
    "cc123",    "status",    "tau",           "eta1",       "eta2",     "pair_rate",
    "one_pair_rate", "mean_pairs", "residual", "iterations", "diagnostic"};

const std::vector<std::string> kTableTwoHeader = {"power_mw", "g2_exp", "g2_exp2", "g2_sh",
                                                  "g2_s",     "g2_si",  "g3_si",   "g3_s"};

const std::vector<std::string> kCurveHeader = {"source_kind", "eta", "variant", "mean",
                                               "detected"};

std::string num(double value) { return csv::format_double(value); }

int require_column(const csv::Table& table, std::string_view name) {
  const int index = table.column(name);
  if (index < 0) throw InputError(fmt::format("line 1: missing column '{}'", name));
  return index;
}

RowStatus parse_status(std::string_view text, int line) {
  for (RowStatus s : {RowStatus::ok, RowStatus::inconsistent, RowStatus::inversion_failed,
                      RowStatus::invalid}) {
    if (to_string(s) == text) return s;
  }
  throw InputError(fmt::format("line {}: unknown row status '{}'", line, text));
}

SourceKind parse_source(std::string_view text, int line) {
  if (text == "thermal") return SourceKind::thermal;
  if (text == "coherent") return SourceKind::coherent;
  throw InputError(fmt::format("line {}: unknown source kind '{}'", line, text));
}

ResponseVariant parse_variant(std::string_view text, int line) {
  if (text == "click") return ResponseVariant::click;
  if (text == "literal") return ResponseVariant::literal;
  throw InputError(fmt::format("line {}: unknown variant '{}'", line, text));
}

Provenance parse_provenance(std::string_view text) {
  for (Provenance p : {Provenance::analytic, Provenance::monte_carlo, Provenance::measured}) {
    if (to_string(p) == text) return p;
  }
  throw InputError(fmt::format("unknown provenance '{}'", text));
}

std::string entry_text(const CorrelationValue& entry) {
  return entry.value ? num(*entry.value) : std::string(kMissingEntry);
}

CorrelationValue entry_from_text(const std::string& text, Provenance provenance, int line,
                                 std::string_view column) {
  CorrelationValue entry;
  entry.provenance = provenance;
  if (text != kMissingEntry) entry.value = csv::parse_double(text, line, column);
  return entry;
}

// table2 columns in header order.
std::array<CorrelationValue*, 7> entries(CorrelationReport& r) {
  return {&r.g2_exp, &r.g2_exp2, &r.g2_sh, &r.g2_s, &r.g2_si, &r.g3_si, &r.g3_s};
}

std::array<const CorrelationValue*, 7> entries(const CorrelationReport& r) {
  return {&r.g2_exp, &r.g2_exp2, &r.g2_sh, &r.g2_s, &r.g2_si, &r.g3_si, &r.g3_s};
}

template <typename Fn>
auto with_json_errors(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw InputError(fmt::format("malformed JSON: {}", e.what()));
  }
}

}  // namespace

std::vector<CountRecord> read_sweep(std::string_view text) {
  const csv::Table table = csv::parse(text);
  for (const std::string& name : table.header) {
    const bool known =
        std::find(kSweepRequired.begin(), kSweepRequired.end(), name) != kSweepRequired.end() ||
        std::find(kSweepHeralded.begin(), kSweepHeralded.end(), name) != kSweepHeralded.end();
    if (!known) throw InputError(fmt::format("line 1: unknown column '{}'", name));
    if (std::count(table.header.begin(), table.header.end(), name) > 1) {
      throw InputError(fmt::format("line 1: duplicate column '{}'", name));
    }
  }
  std::array<int, 4> required{};
  for (std::size_t i = 0; i < required.size(); ++i) {
    required[i] = require_column(table, kSweepRequired[i]);
  }
  std::array<int, 3> heralded{};
  int heralded_present = 0;
  for (std::size_t i = 0; i < heralded.size(); ++i) {
    heralded[i] = table.column(kSweepHeralded[i]);
    heralded_present += heralded[i] >= 0;
  }
  if (heralded_present != 0 && heralded_present != 3) {
    throw InputError("line 1: columns cc12, cc13, cc123 must appear together");
  }

  std::vector<CountRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const int line = table.lines[r];
    std::array<double, 4> v{};
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = csv::parse_double(row[required[i]], line, kSweepRequired[i]);
    }
    CountRecord record{v[0], v[1], v[2], v[3], std::nullopt};
    if (heralded_present) {
      int filled = 0;
      for (int index : heralded) filled += !row[index].empty();
      if (filled != 0 && filled != 3) {
        throw InputError(fmt::format("line {}: cc12, cc13, cc123 must be all filled or all empty",
                                     line));
      }
      if (filled == 3) {
        record.heralded = HeraldedCounts{
            csv::parse_double(row[heralded[0]], line, "cc12"),
            csv::parse_double(row[heralded[1]], line, "cc13"),
            csv::parse_double(row[heralded[2]], line, "cc123")};
      }
    }
    const bool negative = record.sc1 < 0 || record.sc2 < 0 || record.cc < 0 ||
                          (record.heralded && (record.heralded->cc12 < 0 ||
                                               record.heralded->cc13 < 0 ||
                                               record.heralded->cc123 < 0));
    if (negative) throw InputError(fmt::format("line {}: counts must be non-negative", line));
    if (!records.empty() && !(record.power_mw > records.back().power_mw)) {
      throw InputError(fmt::format("line {}: power_mw {} does not increase on {}", line,
                                   record.power_mw, records.back().power_mw));
    }
    records.push_back(record);
  }
  return records;
}

std::string write_sweep(const std::vector<CountRecord>& records) {
  std::vector<std::string> header(kSweepRequired.begin(), kSweepRequired.end());
  const bool any_heralded = std::any_of(records.begin(), records.end(),
                                        [](const CountRecord& r) { return r.heralded.has_value(); });
  if (any_heralded) header.insert(header.end(), kSweepHeralded.begin(), kSweepHeralded.end());
  std::vector<std::vector<std::string>> rows;
  for (const CountRecord& r : records) {
    std::vector<std::string> row = {num(r.power_mw), num(r.sc1), num(r.sc2), num(r.cc)};
    if (any_heralded) {
      if (r.heralded) {
        row.insert(row.end(), {num(r.heralded->cc12), num(r.heralded->cc13),
                               num(r.heralded->cc123)});
      } else {
        row.insert(row.end(), {"", "", ""});
      }
    }
    rows.push_back(std::move(row));
  }
  return csv::write(header, rows);
}

std::string write_table_one_csv(const std::vector<TableOneRow>& rows) {
  std::vector<std::vector<std::string>> out;
  for (const TableOneRow& r : rows) {
    const auto& m = r.measured;
    const auto h = [&](double HeraldedCounts::*field) {
      return m.heralded ? num((*m.heralded).*field) : std::string();
    };
    out.push_back({num(m.power_mw), num(m.sc1), num(m.sc2), num(m.cc), h(&HeraldedCounts::cc12),
                   h(&HeraldedCounts::cc13), h(&HeraldedCounts::cc123), to_string(r.status),
                   num(r.tau), num(r.eta1), num(r.eta2), num(r.pair_rate), num(r.one_pair_rate),
                   num(r.mean_pairs), num(r.residual), std::to_string(r.iterations),
                   r.diagnostic});
  }
  return csv::write(kTableOneHeader, out);
}

std::vector<TableOneRow> read_table_one_csv(std::string_view text) {
  const csv::Table table = csv::parse(text);
  if (table.header != kTableOneHeader) {
    throw InputError("line 1: header does not match the table1 schema");
  }
  std::vector<TableOneRow> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const int line = table.lines[r];
    const auto d = [&](int i) { return csv::parse_double(f[i], line, kTableOneHeader[i]); };
    TableOneRow row;
    row.measured = {d(0), d(1), d(2), d(3), std::nullopt};
    const int filled = !f[4].empty() + !f[5].empty() + !f[6].empty();
    if (filled == 3) {
      row.measured.heralded = HeraldedCounts{d(4), d(5), d(6)};
    } else if (filled != 0) {
      throw InputError(fmt::format("line {}: cc12, cc13, cc123 must be all filled or all empty",
                                   line));
    }
    row.status = parse_status(f[7], line);
    row.tau = d(8);
    row.eta1 = d(9);
    row.eta2 = d(10);
    row.pair_rate = d(11);
    row.one_pair_rate = d(12);
    row.mean_pairs = d(13);
    row.residual = d(14);
    row.iterations = static_cast<int>(d(15));
    row.diagnostic = f[16];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string write_table_one_json(const std::vector<TableOneRow>& rows, double rep_rate_hz) {
  json out;
  out["rep_rate_hz"] = rep_rate_hz;
  out["rows"] = json::array();
  for (const TableOneRow& r : rows) {
    json row;
    row["power_mw"] = r.measured.power_mw;
    row["sc1"] = r.measured.sc1;
    row["sc2"] = r.measured.sc2;
    row["cc"] = r.measured.cc;
    if (r.measured.heralded) {
      row["heralded"] = {{"cc12", r.measured.heralded->cc12},
                         {"cc13", r.measured.heralded->cc13},
                         {"cc123", r.measured.heralded->cc123}};
    } else {
      row["heralded"] = nullptr;
    }
    row["status"] = to_string(r.status);
    row["diagnostic"] = r.diagnostic;
    row["tau"] = r.tau;
    row["eta1"] = r.eta1;
    row["eta2"] = r.eta2;
    row["pair_rate"] = r.pair_rate;
    row["one_pair_rate"] = r.one_pair_rate;
    row["mean_pairs"] = r.mean_pairs;
    row["residual"] = r.residual;
    row["iterations"] = r.iterations;
    out["rows"].push_back(std::move(row));
  }
  return out.dump(2) + "\n";
}

std::vector<TableOneRow> read_table_one_json(std::string_view text) {
  return with_json_errors([&] {
    const json in = json::parse(text);
    std::vector<TableOneRow> rows;
    for (const json& j : in.at("rows")) {
      TableOneRow r;
      r.measured.power_mw = j.at("power_mw").get<double>();
      r.measured.sc1 = j.at("sc1").get<double>();
      r.measured.sc2 = j.at("sc2").get<double>();
      r.measured.cc = j.at("cc").get<double>();
      if (const json& h = j.at("heralded"); !h.is_null()) {
        r.measured.heralded = HeraldedCounts{h.at("cc12").get<double>(),
                                             h.at("cc13").get<double>(),
                                             h.at("cc123").get<double>()};
      }
      r.status = parse_status(j.at("status").get<std::string>(), 0);
      r.diagnostic = j.at("diagnostic").get<std::string>();
      r.tau = j.at("tau").get<double>();
      r.eta1 = j.at("eta1").get<double>();
      r.eta2 = j.at("eta2").get<double>();
      r.pair_rate = j.at("pair_rate").get<double>();
      r.one_pair_rate = j.at("one_pair_rate").get<double>();
      r.mean_pairs = j.at("mean_pairs").get<double>();
      r.residual = j.at("residual").get<double>();
      r.iterations = j.at("iterations").get<int>();
      rows.push_back(std::move(r));
    }
    return rows;
  });
}

std::string write_table_two_csv(const std::vector<CorrelationReport>& reports) {
  std::vector<std::vector<std::string>> out;
  for (const CorrelationReport& r : reports) {
    std::vector<std::string> row = {num(r.power_mw)};
    for (const CorrelationValue* e : entries(r)) row.push_back(entry_text(*e));
    out.push_back(std::move(row));
  }
  return csv::write(kTableTwoHeader, out);
}

std::vector<CorrelationReport> read_table_two_csv(std::string_view text) {
  const csv::Table table = csv::parse(text);
  if (table.header != kTableTwoHeader) {
    throw InputError("line 1: header does not match the table2 schema");
  }
  std::vector<CorrelationReport> reports;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const int line = table.lines[r];
    CorrelationReport report;
    report.power_mw = csv::parse_double(f[0], line, "power_mw");
    const auto slots = entries(report);
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const Provenance p = i == 0 ? Provenance::measured : Provenance::analytic;
      *slots[i] = entry_from_text(f[i + 1], p, line, kTableTwoHeader[i + 1]);
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

std::string write_table_two_json(const std::vector<CorrelationReport>& reports) {
  json out;
  out["rows"] = json::array();
  for (const CorrelationReport& r : reports) {
    json row;
    row["power_mw"] = r.power_mw;
    const auto slots = entries(r);
    for (std::size_t i = 0; i < slots.size(); ++i) {
      json e;
      e["value"] = slots[i]->value ? json(*slots[i]->value) : json(nullptr);
      e["provenance"] = to_string(slots[i]->provenance);
      e["note"] = slots[i]->note;
      row[kTableTwoHeader[i + 1]] = std::move(e);
    }
    out["rows"].push_back(std::move(row));
  }
  return out.dump(2) + "\n";
}

std::vector<CorrelationReport> read_table_two_json(std::string_view text) {
  return with_json_errors([&] {
    const json in = json::parse(text);
    std::vector<CorrelationReport> reports;
    for (const json& j : in.at("rows")) {
      CorrelationReport r;
      r.power_mw = j.at("power_mw").get<double>();
      const auto slots = entries(r);
      for (std::size_t i = 0; i < slots.size(); ++i) {
        const json& e = j.at(kTableTwoHeader[i + 1]);
        if (!e.at("value").is_null()) slots[i]->value = e.at("value").get<double>();
        slots[i]->provenance = parse_provenance(e.at("provenance").get<std::string>());
        slots[i]->note = e.at("note").get<std::string>();
      }
      reports.push_back(std::move(r));
    }
    return reports;
  });
}

std::string write_curves_csv(const std::vector<SaturationCurve>& curves) {
  std::vector<std::vector<std::string>> out;
  for (const SaturationCurve& c : curves) {
    for (const SaturationPoint& p : c.points) {
      out.push_back({to_string(c.source), num(c.eta), to_string(c.variant), num(p.mean_in),
                     num(p.detected)});
    }
  }
  return csv::write(kCurveHeader, out);
}

std::vector<SaturationCurve> read_curves_csv(std::string_view text) {
  const csv::Table table = csv::parse(text);
  if (table.header != kCurveHeader) {
    throw InputError("line 1: header does not match the curve schema");
  }
  std::vector<SaturationCurve> curves;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const int line = table.lines[r];
    const SourceKind source = parse_source(f[0], line);
    const double eta = csv::parse_double(f[1], line, "eta");
    const ResponseVariant variant = parse_variant(f[2], line);
    if (curves.empty() || curves.back().source != source || curves.back().eta != eta ||
        curves.back().variant != variant) {
      curves.push_back({source, eta, variant, {}});
    }
    curves.back().points.push_back(
        {csv::parse_double(f[3], line, "mean"), csv::parse_double(f[4], line, "detected")});
  }
  return curves;
}

std::vector<MeasuredG2> read_measured_g2(std::string_view text) {
  const csv::Table table = csv::parse(text);
  const int power = require_column(table, "power_mw");
  const int g2 = require_column(table, "g2");
  const int cc123 = table.column("cc123");
  std::vector<MeasuredG2> points;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const int line = table.lines[r];
    MeasuredG2 point{csv::parse_double(f[power], line, "power_mw"),
                     csv::parse_double(f[g2], line, "g2"), std::nullopt};
    if (cc123 >= 0 && !f[cc123].empty()) {
      point.cc123 = csv::parse_double(f[cc123], line, "cc123");
    }
    points.push_back(point);
  }
  return points;
}

std::string write_g2_comparison_csv(const std::vector<G2Comparison>& rows) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? num(*v) : std::string(kMissingEntry);
  };
  std::vector<std::vector<std::string>> out;
  for (const G2Comparison& c : rows) {
    std::string ratio(kMissingEntry);
    if (c.predicted_exp2 && *c.predicted_exp2 != 0.0) ratio = num(c.measured / *c.predicted_exp2);
    out.push_back({num(c.power_mw), num(c.measured), opt(c.predicted_exp2),
                   opt(c.ideal_heralded), ratio});
  }
  return csv::write({"power_mw", "g2_measured", "g2_exp2_predicted", "g2_sh_ideal",
                     "measured_over_predicted"},
                    out);
}

}  // namespace spdc
