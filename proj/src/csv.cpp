#include "spdc/csv.hpp"

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "spdc/errors.hpp"

namespace spdc::csv {

int Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Table parse(std::string_view text) {
  Table table;
  std::vector<std::string> record;
  std::string field;
  int line = 1;
  int record_line = 1;
  bool quoted = false;        // inside a quoted field
  bool after_quote = false;   // a quoted field just closed
  bool field_started = false;

  const auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    const bool blank = record.size() == 1 && record[0].empty() && !after_quote;
    if (!blank) {
      if (table.header.empty()) {
        table.header = std::move(record);
      } else {
        if (record.size() != table.header.size()) {
          throw InputError(fmt::format("line {}: expected {} fields, found {}", record_line,
                                       table.header.size(), record.size()));
        }
        table.rows.push_back(std::move(record));
        table.lines.push_back(record_line);
      }
    }
    record.clear();
    after_quote = false;
    field_started = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      after_quote = false;
      field_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      end_record();
      ++line;
      record_line = line;
    } else if (c == '"') {
      if (after_quote || !field.empty()) {
        throw InputError(fmt::format("line {}: stray quote inside a field", line));
      }
      quoted = true;
      field_started = true;
    } else {
      if (after_quote) {
        throw InputError(fmt::format("line {}: text after a closing quote", line));
      }
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw InputError(fmt::format("line {}: unterminated quoted field", record_line));
  if (field_started || !field.empty() || !record.empty()) end_record();
  if (table.header.empty()) throw InputError("line 1: missing header row");
  return table;
}

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string write(const std::vector<std::string>& header,
                  const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  const auto emit = [&out](const std::vector<std::string>& record) {
    for (std::size_t i = 0; i < record.size(); ++i) {
      if (i) out += ',';
      out += quote(record[i]);
    }
    out += '\n';
  };
  emit(header);
  for (const auto& row : rows) emit(row);
  return out;
}

std::string format_double(double value) { return fmt::format("{}", value); }

double parse_double(std::string_view field, int line, std::string_view column) {
  std::string_view trimmed = field;
  while (!trimmed.empty() && trimmed.front() == ' ') trimmed.remove_prefix(1);
  while (!trimmed.empty() && trimmed.back() == ' ') trimmed.remove_suffix(1);
  if (!trimmed.empty() && trimmed.front() == '+') trimmed.remove_prefix(1);
  double value = 0.0;
  const char* first = trimmed.data();
  const char* last = first + trimmed.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (trimmed.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw InputError(
        fmt::format("line {}: column {}: '{}' is not a finite number", line, column, field));
  }
  return value;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError(fmt::format("write to '{}' failed", path));
}

}  // namespace spdc::csv
