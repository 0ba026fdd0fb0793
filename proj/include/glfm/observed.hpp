#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glfm/models.hpp"

namespace glfm {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Entry {
    Index i = 0;
    Index j = 0;
    double y = 0.0;

    friend bool operator==(const Entry&, const Entry&) = default;
};

// Sparse observed entries of an n x p data matrix together with one
// observation family per column. Entries are kept in row-major order with a
// column-major copy so that row solves and column solves both stream
// contiguously. Immutable once constructed.
class ObservedMatrix {
public:
    ObservedMatrix() = default;

    // Validates indices, duplicates and support; throws std::invalid_argument
    // or std::domain_error.
    ObservedMatrix(Index n, Index p, std::vector<Family> col_specs, std::vector<Entry> entries);

    // Same family for every column.
    static ObservedMatrix uniform(Index n, Index p, Family family, std::vector<Entry> entries);

    Index rows() const { return n_; }
    Index cols() const { return p_; }
    std::size_t size() const { return by_row_.size(); }
    bool empty() const { return by_row_.empty(); }

    const Family& family(Index j) const { return specs_[static_cast<std::size_t>(j)]; }
    std::span<const Family> families() const { return specs_; }

    // Row-major entries.
    std::span<const Entry> entries() const { return by_row_; }
    std::span<const Entry> row(Index i) const;
    std::span<const Entry> col(Index j) const;
    std::size_t row_count(Index i) const { return row(i).size(); }
    std::size_t col_count(Index j) const { return col(j).size(); }

    // Rows `rows` (ascending) re-indexed as 0..rows.size()-1, all columns kept.
    ObservedMatrix row_block(std::span<const Index> rows) const;

    // FNV-1a digest of shape, families and entries.
    std::uint64_t checksum() const;

private:
    Index n_ = 0;
    Index p_ = 0;
    std::vector<Family> specs_;
    std::vector<Entry> by_row_;
    std::vector<Entry> by_col_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_ptr_;
};

// Text format: header `n p`, one `col <j> <family>` line per column, then
// `i j y` triplets (0-based, whitespace separated).
ObservedMatrix read_observed(std::istream& in);
ObservedMatrix read_observed_file(const std::string& path);
void write_observed(std::ostream& out, const ObservedMatrix& data);

}  // namespace glfm
