#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gup/error.hpp"

namespace gup {

// Row-compressed sparse matrix. Column indices are strictly increasing within
// each row; immutable once built.
class SparseOperator {
public:
    SparseOperator() = default;

    struct Triplet {
        int row;
        int col;
        double value;
    };

    static SparseOperator from_triplets(int rows, int cols, std::vector<Triplet> entries) {
        require(rows > 0 && cols > 0, Errc::invalid_argument, "operator dimensions must be positive");
        std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        SparseOperator op;
        op.rows_ = rows;
        op.cols_ = cols;
        op.row_ptr_.assign(static_cast<std::size_t>(rows) + 1, 0);
        op.col_idx_.reserve(entries.size());
        op.values_.reserve(entries.size());
        int prev_row = -1, prev_col = -1;
        for (const Triplet& t : entries) {
            require(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols,
                    Errc::invalid_argument, "triplet index out of range");
            require(std::isfinite(t.value), Errc::non_finite, "non-finite weight");
            require(!(t.row == prev_row && t.col == prev_col), Errc::invalid_argument,
                    "duplicate entry in row");
            op.col_idx_.push_back(t.col);
            op.values_.push_back(t.value);
            op.row_ptr_[static_cast<std::size_t>(t.row) + 1]++;
            prev_row = t.row;
            prev_col = t.col;
        }
        for (int r = 0; r < rows; ++r) op.row_ptr_[r + 1] += op.row_ptr_[r];
        return op;
    }

    static SparseOperator identity(int n) {
        std::vector<Triplet> t;
        t.reserve(n);
        for (int i = 0; i < n; ++i) t.push_back({i, i, 1.0});
        return from_triplets(n, n, std::move(t));
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    std::vector<double> apply(const std::vector<double>& v) const {
        require(static_cast<int>(v.size()) == cols_, Errc::dimension_mismatch,
                "apply: vector length != cols");
        std::vector<double> out(static_cast<std::size_t>(rows_), 0.0);
        for (int r = 0; r < rows_; ++r) {
            double acc = 0.0;
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                acc += values_[k] * v[col_idx_[k]];
            out[r] = acc;
        }
        return out;
    }

    std::vector<double> apply_transpose(const std::vector<double>& v) const {
        require(static_cast<int>(v.size()) == rows_, Errc::dimension_mismatch,
                "apply_transpose: vector length != rows");
        std::vector<double> out(static_cast<std::size_t>(cols_), 0.0);
        for (int r = 0; r < rows_; ++r) {
            const double vr = v[r];
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                out[col_idx_[k]] += values_[k] * vr;
        }
        return out;
    }

    double row_sum(int r) const {
        require(r >= 0 && r < rows_, Errc::invalid_argument, "row out of range");
        double acc = 0.0;
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += values_[k];
        return acc;
    }

    // zero when absent
    double coeff(int r, int c) const {
        require(r >= 0 && r < rows_ && c >= 0 && c < cols_, Errc::invalid_argument,
                "index out of range");
        const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
        const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
        const auto it = std::lower_bound(begin, end, c);
        if (it == end || *it != c) return 0.0;
        return values_[static_cast<std::size_t>(it - col_idx_.begin())];
    }

    bool is_symmetric() const {
        if (rows_ != cols_) return false;
        for (int r = 0; r < rows_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                if (coeff(col_idx_[k], r) != values_[k]) return false;
        return true;
    }

    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (int r = 0; r < rows_; ++r)
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
                fn(r, col_idx_[k], values_[k]);
    }

    template <typename Fn>
    void for_each_in_row(int r, Fn&& fn) const {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k)
            fn(col_idx_[k], values_[k]);
    }

    bool operator==(const SparseOperator& other) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::size_t> row_ptr_;
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

} // namespace gup
