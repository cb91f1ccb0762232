#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sca/errors.hpp"

namespace sca {

// All numeric serialization goes through this: 17 significant digits,
// enough to round-trip every double bit-exactly.
std::string format_double(double value);

// Headerless numeric CSV. Rows end with '\n'; no trailing separator.
void write_csv(const std::string& path, const Eigen::MatrixXd& matrix);

// Same, with an integer label appended as the last column of each row.
void write_csv(const std::string& path, const Eigen::MatrixXd& matrix,
               const std::vector<int>& labels);

// Strict reader: every row must have the same number of fields, every field
// must parse fully as a double ("inf"/"nan" included). Anything else is a
// ParseError naming the offending line.
Eigen::MatrixXd read_csv(const std::string& path);

// Parses one CSV line of doubles (shared with the reader; exposed for
// argument parsing of inline lists like "0.02,0.05,0.1").
std::vector<double> parse_double_list(const std::string& text);

}  // namespace sca
