#include "netdag/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace netdag {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::vector<std::vector<std::string>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw std::invalid_argument("empty csv file: " + path);
  return rows;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed number '" + s + "' in " + path);
  }
}

}  // namespace

void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& headers) {
  if (static_cast<Index>(headers.size()) != values.cols())
    throw std::invalid_argument("header count does not match matrix width");
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  for (std::size_t j = 0; j < headers.size(); ++j)
    out << (j ? "," : "") << headers[j];
  out << '\n';
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j)
      out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
}

NamedMatrix read_csv(const std::string& path) {
  auto rows = read_table(path);
  NamedMatrix out;
  out.headers = rows.front();
  const auto width = out.headers.size();
  const auto height = rows.size() - 1;
  out.values.resize(static_cast<Index>(height), static_cast<Index>(width));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != width) throw std::invalid_argument("ragged csv row in " + path);
    for (std::size_t j = 0; j < width; ++j)
      out.values(static_cast<Index>(i - 1), static_cast<Index>(j)) =
          parse_double(rows[i][j], path);
  }
  return out;
}

void write_mask_csv(const std::string& path, const BoolMatrix& mask) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  for (Index j = 0; j < mask.cols(); ++j)
    out << (j ? "," : "") << "n" << (j + 1);
  out << '\n';
  for (Index i = 0; i < mask.rows(); ++i) {
    for (Index j = 0; j < mask.cols(); ++j)
      out << (j ? "," : "") << (mask(i, j) ? 1 : 0);
    out << '\n';
  }
}

BoolMatrix read_mask_csv(const std::string& path) {
  NamedMatrix m = read_csv(path);
  BoolMatrix out(m.values.rows(), m.values.cols());
  for (Index j = 0; j < m.values.cols(); ++j)
    for (Index i = 0; i < m.values.rows(); ++i) out(i, j) = m.values(i, j) != 0.0;
  return out;
}

void write_vector_csv(const std::string& path, const Vector& values,
                      const std::vector<std::string>& headers) {
  write_csv(path, values.transpose(), headers);
}

Vector read_vector_csv(const std::string& path) {
  NamedMatrix m = read_csv(path);
  if (m.values.rows() != 1) throw std::invalid_argument("expected a single data row in " + path);
  return m.values.row(0).transpose();
}

}  // namespace netdag
