#pragma once

// RFC-4180 CSV: comma separator, double-quote quoting with "" escapes,
// CRLF or LF line ends, mandatory header row, dot decimal separator.

#include <string>
#include <string_view>
#include <vector>

namespace spdc::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based line of the file where each row starts.
  std::vector<int> lines;

  /// Index of a header column, or -1.
  [[nodiscard]] int column(std::string_view name) const;
};

/// Throws InputError ("line N: ...") for a missing header, an unterminated
/// quote, text after a closing quote, or a row whose field count differs
/// from the header. Blank lines are skipped.
[[nodiscard]] Table parse(std::string_view text);

/// Header plus rows, LF line ends, fields quoted only when needed.
[[nodiscard]] std::string write(const std::vector<std::string>& header,
                                const std::vector<std::vector<std::string>>& rows);

[[nodiscard]] std::string quote(std::string_view field);

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

/// Strict full-field parse of a finite decimal number. Throws InputError
/// naming the line and column.
[[nodiscard]] double parse_double(std::string_view field, int line, std::string_view column);

[[nodiscard]] std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace spdc::csv
