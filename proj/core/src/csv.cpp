#include "featdyn/csv.hpp"

#include "featdyn/types.hpp"

#include <cstdlib>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

namespace featdyn {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::optional<std::size_t> CsvTable::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  return std::nullopt;
}

std::vector<double> CsvTable::column(const std::string& name) const {
  const auto idx = index_of(name);
  if (!idx) throw FormatError("CSV has no column '" + name + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(*idx < row.size() ? row[*idx] : std::numeric_limits<double>::quiet_NaN());
  return out;
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw FormatError("CSV is empty");
  for (const auto& c : split(trim(line), ',')) table.columns.push_back(trim(c));
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& cell : split(trim(line), ',')) {
      const std::string t = trim(cell);
      char* end = nullptr;
      const double v = std::strtod(t.c_str(), &end);
      row.push_back((end && *end == '\0' && !t.empty()) ? v : std::numeric_limits<double>::quiet_NaN());
    }
    if (row.size() > table.columns.size())
      throw FormatError("CSV row " + std::to_string(table.rows.size() + 2) + " has more cells than the header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace featdyn
