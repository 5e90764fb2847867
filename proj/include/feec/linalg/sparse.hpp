// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace feec::linalg {

/// Compressed-row sparse matrix with sorted, unique column indices per row.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), row_ptr_(static_cast<std::size_t>(rows) + 1, 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nnz() const { return col_idx_.size(); }

    std::span<const int> row_columns(int i) const {
        return {col_idx_.data() + row_ptr_[i], col_idx_.data() + row_ptr_[i + 1]};
    }
    std::span<const double> row_values(int i) const {
        return {vals_.data() + row_ptr_[i], vals_.data() + row_ptr_[i + 1]};
    }

    Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
    SparseMatrix transpose() const;
    Eigen::MatrixXd dense() const;
    double max_abs() const;

    /// coefficient access by search; zero when the entry is not stored
    double coeff(int i, int j) const;

    static SparseMatrix identity(int n);

    friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);
    friend SparseMatrix add(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b);
    friend SparseMatrix scale(double alpha, const SparseMatrix& a);
    friend class CooBuilder;

private:
    int rows_ = 0, cols_ = 0;
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> vals_;
};

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix add(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b);

inline SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) { return add(1.0, a, 1.0, b); }
inline SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) { return add(1.0, a, -1.0, b); }
SparseMatrix scale(double alpha, const SparseMatrix& a);

/// Exact symmetrization (a + a^T)/2; cleans up roundoff asymmetry of triple products.
SparseMatrix symmetrize(const SparseMatrix& a);

/// Coordinate-format staging area; duplicate entries accumulate on compression.
class CooBuilder {
public:
    CooBuilder(int rows, int cols) : rows_(rows), cols_(cols) {}

    void add(int i, int j, double v) {
        if (v != 0.0) entries_.push_back({i, j, v});
    }
    SparseMatrix compress() const;

private:
    struct Entry {
        int i, j;
        double v;
    };
    int rows_, cols_;
    std::vector<Entry> entries_;
};

/// Kronecker product a (x) b with row-major index flattening i1*n2 + i2.
SparseMatrix kronecker(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix from_dense(const Eigen::MatrixXd& a, double drop_below = 0.0);

} // namespace feec::linalg
