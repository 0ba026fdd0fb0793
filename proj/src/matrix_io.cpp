#include "glfm/matrix_io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace glfm {

void write_matrix_csv(std::ostream& out, const Matrix& m) {
    char buf[32];
    std::string line;
    for (Index i = 0; i < m.rows(); ++i) {
        line.clear();
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) line += ',';
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m(i, j));
            line.append(buf, ptr);
        }
        line += '\n';
        out << line;
    }
}

Matrix read_matrix_csv(std::istream& in) {
    std::vector<double> values;
    Index rows = 0, cols = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Index count = 0;
        const char* p = line.data();
        const char* end = p + line.size();
        while (true) {
            while (p < end && *p == ' ') ++p;
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(p, end, v);
            if (ec != std::errc())
                throw std::invalid_argument("row " + std::to_string(rows + 1) + ": bad number");
            values.push_back(v);
            ++count;
            p = ptr;
            while (p < end && *p == ' ') ++p;
            if (p == end) break;
            if (*p != ',') throw std::invalid_argument("row " + std::to_string(rows + 1) + ": expected ','");
            ++p;
        }
        if (cols >= 0 && count != cols) throw std::invalid_argument("ragged CSV matrix");
        cols = count;
        ++rows;
    }
    if (rows == 0) return Matrix(0, 0);
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = values[static_cast<std::size_t>(i * cols + j)];
    return m;
}

Matrix read_matrix_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    return read_matrix_csv(in);
}

}  // namespace glfm
