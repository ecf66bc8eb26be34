#pragma once

// Minimal CSV I/O for sweep output: comma separated, LF line endings, no
// quoting (cells never contain commas), '#' lines are comments.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qtherm {

inline constexpr std::string_view kNotApplicable = "NA";

/// Shortest text with 17 significant digits, '.' decimal, locale independent.
std::string format_double(double value);
/// NA for an empty or non-finite value.
std::string format_cell(const std::optional<double>& value);

/// Inverse of format_cell; NA -> nullopt. Throws UsageError on junk.
std::optional<double> parse_cell(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws UsageError if missing.
  std::size_t column(std::string_view name) const;
};

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);
void write_csv(std::ostream& out, const CsvTable& table);

CsvTable read_csv(std::istream& in);
CsvTable parse_csv(std::string_view text);

}  // namespace qtherm
