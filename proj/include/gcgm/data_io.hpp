#pragma once

#include <istream>
#include <string>

#include "gcgm/copula.hpp"
#include "gcgm/numerics.hpp"

namespace gcgm {

/// Reads observations from CSV: optional header row (detected when any cell
/// of the first row is not a number), one observation per row, decimal
/// point, comma separated. Throws ParseError with 1-based row and column.
DataMatrix read_data_csv(std::istream& in);
DataMatrix read_data_csv(const std::string& path);

/// printf("%.6g").
std::string format_number(double value);

/// Square matrix with a header row of names; rows are prefixed by name.
std::string matrix_csv(const Eigen::MatrixXd& m, const DataMatrix& labels);

}  // namespace gcgm
