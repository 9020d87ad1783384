#pragma once

#include "netdag/types.hpp"

#include <string>
#include <vector>

namespace netdag {

struct NamedMatrix {
  Matrix values;
  std::vector<std::string> headers;
};

// Headered CSV of reals; doubles are written with 17 significant digits so a
// read-back round trip is bit exact.
void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& headers);
NamedMatrix read_csv(const std::string& path);

// 0/1 CSV with headers.
void write_mask_csv(const std::string& path, const BoolMatrix& mask);
BoolMatrix read_mask_csv(const std::string& path);

void write_vector_csv(const std::string& path, const Vector& values,
                      const std::vector<std::string>& headers);
Vector read_vector_csv(const std::string& path);

std::string format_double(double v);

}  // namespace netdag
