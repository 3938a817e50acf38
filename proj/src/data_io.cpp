#include "gcgm/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "gcgm/errors.hpp"

namespace gcgm {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_double(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const char* first = text.data();
  if (*first == '+') ++first;
  double value = 0.0;
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

DataMatrix read_data_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> names;
  std::size_t width = 0;
  std::size_t line_no = 0;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    if (first) {
      first = false;
      width = cells.size();
      bool numeric = true;
      for (const auto& c : cells) numeric = numeric && parse_double(c).has_value();
      if (!numeric) {
        for (const auto& c : cells) names.push_back(unquote(c));
        continue;
      }
    }
    if (cells.size() != width) {
      throw ParseError(line_no, std::min(cells.size(), width) + 1,
                       "expected " + std::to_string(width) + " cells, found " +
                           std::to_string(cells.size()));
    }
    std::vector<double> row(width);
    for (std::size_t j = 0; j < width; ++j) {
      const auto v = parse_double(cells[j]);
      if (!v) throw ParseError(line_no, j + 1, "'" + cells[j] + "' is not a number");
      row[j] = *v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(line_no + 1, 1, "no data rows");

  DataMatrix out;
  out.names = std::move(names);
  out.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      out.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
    }
  }
  return out;
}

DataMatrix read_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open data file '" + path + "'");
  return read_data_csv(in);
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  return buffer;
}

std::string matrix_csv(const Eigen::MatrixXd& m, const DataMatrix& labels) {
  std::string out = "variable";
  for (Index j = 0; j < m.cols(); ++j) out += "," + labels.column_name(j);
  out += "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    out += labels.column_name(i);
    for (Index j = 0; j < m.cols(); ++j) out += "," + format_number(m(i, j));
    out += "\n";
  }
  return out;
}

}  // namespace gcgm
