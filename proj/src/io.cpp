#include "sca/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace sca {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  return out;
}

double parse_field(const std::string& field, const std::string& where) {
  std::size_t lo = 0;
  std::size_t hi = field.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(field[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(field[hi - 1]))) {
    --hi;
  }
  double value = 0.0;
  const char* begin = field.data() + lo;
  const char* end = field.data() + hi;
  // std::from_chars rejects a leading '+', which %.17g never emits but a
  // hand-written input file reasonably might.
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end) {
    throw ParseError("cannot parse '" + field + "' as a number " + where);
  }
  return value;
}

}  // namespace

void write_csv(const std::string& path, const Eigen::MatrixXd& matrix) {
  std::ofstream out = open_for_write(path);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(matrix(i, j));
    }
    out << '\n';
  }
  if (!out) throw ParseError("write to '" + path + "' failed");
}

void write_csv(const std::string& path, const Eigen::MatrixXd& matrix,
               const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != matrix.rows()) {
    throw ParameterError("label count does not match row count");
  }
  std::ofstream out = open_for_write(path);
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(matrix(i, j));
    }
    if (matrix.cols() > 0) out << ',';
    out << labels[static_cast<std::size_t>(i)] << '\n';
  }
  if (!out) throw ParseError("write to '" + path + "' failed");
}

std::vector<double> parse_double_list(const std::string& text) {
  if (text.empty()) throw ParseError("empty list");
  std::vector<double> values;
  std::string field;
  std::stringstream line(text);
  while (std::getline(line, field, ',')) {
    values.push_back(parse_field(field, "in '" + text + "'"));
  }
  if (!text.empty() && text.back() == ',') {
    throw ParseError("trailing separator in '" + text + "'");
  }
  return values;
}

Eigen::MatrixXd read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "' for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::string field;
    std::stringstream fields(line);
    while (std::getline(fields, field, ',')) {
      row.push_back(
          parse_field(field, "at line " + std::to_string(line_number)));
    }
    if (line.back() == ',') {
      throw ParseError("trailing separator at line " +
                       std::to_string(line_number));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged row at line " + std::to_string(line_number) +
                       ": expected " + std::to_string(rows.front().size()) +
                       " fields, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("'" + path + "' holds no data rows");
  Eigen::MatrixXd matrix(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      matrix(i, j) = rows[static_cast<std::size_t>(i)]
                         [static_cast<std::size_t>(j)];
    }
  }
  return matrix;
}

}  // namespace sca
