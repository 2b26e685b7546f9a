#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace featdyn {

/// Numeric CSV with a header row. Non-numeric cells parse as NaN.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> index_of(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

std::vector<std::string> split(const std::string& text, char sep);
std::string trim(const std::string& text);

}  // namespace featdyn
