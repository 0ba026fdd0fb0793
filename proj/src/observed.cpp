#include "glfm/observed.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace glfm {

ObservedMatrix::ObservedMatrix(Index n, Index p, std::vector<Family> col_specs,
                               std::vector<Entry> entries)
    : n_(n), p_(p), specs_(std::move(col_specs)), by_row_(std::move(entries)) {
    if (n < 0 || p < 0) throw std::invalid_argument("negative matrix dimension");
    if (static_cast<Index>(specs_.size()) != p)
        throw std::invalid_argument("need one family per column");

    for (const auto& e : by_row_) {
        if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= p)
            throw std::invalid_argument("entry (" + std::to_string(e.i) + ", " +
                                        std::to_string(e.j) + ") outside " + std::to_string(n) +
                                        " x " + std::to_string(p));
        check_support(family(e.j), e.y);
    }

    std::sort(by_row_.begin(), by_row_.end(),
              [](const Entry& a, const Entry& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    for (std::size_t k = 1; k < by_row_.size(); ++k) {
        if (by_row_[k].i == by_row_[k - 1].i && by_row_[k].j == by_row_[k - 1].j)
            throw std::invalid_argument("duplicate entry (" + std::to_string(by_row_[k].i) + ", " +
                                        std::to_string(by_row_[k].j) + ")");
    }

    by_col_ = by_row_;
    std::stable_sort(by_col_.begin(), by_col_.end(),
                     [](const Entry& a, const Entry& b) { return a.j < b.j; });

    row_ptr_.assign(static_cast<std::size_t>(n) + 1, 0);
    col_ptr_.assign(static_cast<std::size_t>(p) + 1, 0);
    for (const auto& e : by_row_) {
        ++row_ptr_[static_cast<std::size_t>(e.i) + 1];
        ++col_ptr_[static_cast<std::size_t>(e.j) + 1];
    }
    for (std::size_t k = 1; k < row_ptr_.size(); ++k) row_ptr_[k] += row_ptr_[k - 1];
    for (std::size_t k = 1; k < col_ptr_.size(); ++k) col_ptr_[k] += col_ptr_[k - 1];
}

ObservedMatrix ObservedMatrix::uniform(Index n, Index p, Family family, std::vector<Entry> entries) {
    return ObservedMatrix(n, p, std::vector<Family>(static_cast<std::size_t>(p), family),
                          std::move(entries));
}

std::span<const Entry> ObservedMatrix::row(Index i) const {
    const auto b = row_ptr_[static_cast<std::size_t>(i)];
    const auto e = row_ptr_[static_cast<std::size_t>(i) + 1];
    return std::span<const Entry>(by_row_).subspan(b, e - b);
}

std::span<const Entry> ObservedMatrix::col(Index j) const {
    const auto b = col_ptr_[static_cast<std::size_t>(j)];
    const auto e = col_ptr_[static_cast<std::size_t>(j) + 1];
    return std::span<const Entry>(by_col_).subspan(b, e - b);
}

ObservedMatrix ObservedMatrix::row_block(std::span<const Index> rows) const {
    std::vector<Entry> sub;
    Index prev = -1;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const Index i = rows[k];
        if (i < 0 || i >= n_) throw std::out_of_range("row block index out of range");
        if (i <= prev) throw std::invalid_argument("row block indices must be strictly ascending");
        prev = i;
        for (const auto& e : row(i)) sub.push_back({static_cast<Index>(k), e.j, e.y});
    }
    return ObservedMatrix(static_cast<Index>(rows.size()), p_, specs_, std::move(sub));
}

std::uint64_t ObservedMatrix::checksum() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < len; ++k) {
            h ^= bytes[k];
            h *= 0x100000001b3ULL;
        }
    };
    mix(&n_, sizeof n_);
    mix(&p_, sizeof p_);
    for (const auto& f : specs_) {
        const int kind = static_cast<int>(f.kind);
        mix(&kind, sizeof kind);
        mix(&f.trials, sizeof f.trials);
    }
    for (const auto& e : by_row_) {
        mix(&e.i, sizeof e.i);
        mix(&e.j, sizeof e.j);
        mix(&e.y, sizeof e.y);
    }
    return h;
}

ObservedMatrix read_observed(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    auto fail = [&](const std::string& what) {
        throw std::invalid_argument("line " + std::to_string(lineno) + ": " + what);
    };

    if (!next_line()) throw std::invalid_argument("empty data file");
    Index n = 0, p = 0;
    {
        std::istringstream ss(line);
        std::string extra;
        if (!(ss >> n >> p) || (ss >> extra) || n < 0 || p < 0) fail("expected header 'n p'");
    }

    std::vector<Family> specs(static_cast<std::size_t>(p));
    std::vector<bool> seen(static_cast<std::size_t>(p), false);
    for (Index c = 0; c < p; ++c) {
        if (!next_line()) fail("missing column specification");
        std::istringstream ss(line);
        std::string tag, fam, extra;
        Index j = -1;
        if (!(ss >> tag >> j >> fam) || tag != "col" || (ss >> extra)) fail("expected 'col <j> <family>'");
        if (j < 0 || j >= p || seen[static_cast<std::size_t>(j)]) fail("bad column index in spec line");
        seen[static_cast<std::size_t>(j)] = true;
        try {
            specs[static_cast<std::size_t>(j)] = Family::parse(fam);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }

    std::vector<Entry> entries;
    while (next_line()) {
        std::istringstream ss(line);
        Entry e;
        std::string extra;
        if (!(ss >> e.i >> e.j >> e.y) || (ss >> extra)) fail("expected triplet 'i j y'");
        entries.push_back(e);
    }
    return ObservedMatrix(n, p, std::move(specs), std::move(entries));
}

ObservedMatrix read_observed_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open " + path);
    return read_observed(in);
}

void write_observed(std::ostream& out, const ObservedMatrix& data) {
    out << data.rows() << ' ' << data.cols() << '\n';
    for (Index j = 0; j < data.cols(); ++j) out << "col " << j << ' ' << data.family(j).to_string() << '\n';
    const auto old = out.precision(17);
    for (const auto& e : data.entries()) out << e.i << ' ' << e.j << ' ' << e.y << '\n';
    out.precision(old);
}

}  // namespace glfm
