#pragma once

#include <iosfwd>
#include <string>

#include "glfm/observed.hpp"

namespace glfm {

// Dense matrices as CSV, one row per line, full round-trip precision.
void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv_file(const std::string& path);

}  // namespace glfm
