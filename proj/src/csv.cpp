#include "qtherm/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "qtherm/errors.hpp"

namespace qtherm {

std::string format_double(double value) {
  if (!std::isfinite(value)) return std::string(kNotApplicable);
  if (value == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_cell(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string(kNotApplicable);
}

std::optional<double> parse_cell(std::string_view text) {
  if (text == kNotApplicable) return std::nullopt;
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw UsageError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  throw UsageError("missing CSV column '" + std::string(name) + "'");
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out << ',';
    out << cells[k];
  }
  out << '\n';
}

void write_csv(std::ostream& out, const CsvTable& table) {
  write_csv_row(out, table.header);
  for (const auto& row : table.rows) write_csv_row(out, row);
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!have_header) {
      table.header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != table.header.size()) throw UsageError("CSV row width does not match header");
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

CsvTable parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_csv(in);
}

}  // namespace qtherm
