// SPDX-License-Identifier: Apache-2.0
#include "feec/linalg/sparse.hpp"

#include <algorithm>
#include <climits>
#include <stdexcept>
#include <cmath>
#include <cstdlib>

namespace feec::linalg {

Eigen::VectorXd SparseMatrix::operator*(const Eigen::VectorXd& x) const {
    if (x.size() != cols_) throw std::invalid_argument("SparseMatrix: vector size mismatch");
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows_);
    for (int i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += vals_[k] * x[col_idx_[k]];
        y[i] = s;
    }
    return y;
}

SparseMatrix SparseMatrix::transpose() const {
    SparseMatrix t(cols_, rows_);
    t.col_idx_.resize(nnz());
    t.vals_.resize(nnz());
    std::vector<int> count(cols_, 0);
    for (int c : col_idx_) ++count[c];
    for (int j = 0; j < cols_; ++j) t.row_ptr_[j + 1] = t.row_ptr_[j] + count[j];
    std::vector<int> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
    for (int i = 0; i < rows_; ++i) {
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            int pos = next[col_idx_[k]]++;
            t.col_idx_[pos] = i;
            t.vals_[pos] = vals_[k];
        }
    }
    return t;
}

Eigen::MatrixXd SparseMatrix::dense() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d(i, col_idx_[k]) = vals_[k];
    return d;
}

double SparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : vals_) m = std::max(m, std::abs(v));
    return m;
}

double SparseMatrix::coeff(int i, int j) const {
    auto cols = row_columns(i);
    auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
}

SparseMatrix SparseMatrix::identity(int n) {
    SparseMatrix m(n, n);
    m.col_idx_.resize(n);
    m.vals_.assign(n, 1.0);
    for (int i = 0; i < n; ++i) {
        m.col_idx_[i] = i;
        m.row_ptr_[i + 1] = i + 1;
    }
    return m;
}

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("SparseMatrix: product dimension mismatch");
    SparseMatrix c(a.rows_, b.cols_);
    std::vector<double> accum(b.cols_, 0.0);
    std::vector<int> marker(b.cols_, -1);
    std::vector<int> touched;
    for (int i = 0; i < a.rows_; ++i) {
        touched.clear();
        for (int ka = a.row_ptr_[i]; ka < a.row_ptr_[i + 1]; ++ka) {
            int j = a.col_idx_[ka];
            double va = a.vals_[ka];
            for (int kb = b.row_ptr_[j]; kb < b.row_ptr_[j + 1]; ++kb) {
                int cc = b.col_idx_[kb];
                if (marker[cc] != i) {
                    marker[cc] = i;
                    accum[cc] = 0.0;
                    touched.push_back(cc);
                }
                accum[cc] += va * b.vals_[kb];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (int cc : touched) {
            if (accum[cc] != 0.0) {
                c.col_idx_.push_back(cc);
                c.vals_.push_back(accum[cc]);
            }
        }
        c.row_ptr_[i + 1] = static_cast<int>(c.col_idx_.size());
    }
    return c;
}

SparseMatrix add(double alpha, const SparseMatrix& a, double beta, const SparseMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw std::invalid_argument("SparseMatrix: sum dimension mismatch");
    SparseMatrix c(a.rows_, a.cols_);
    for (int i = 0; i < a.rows_; ++i) {
        int ka = a.row_ptr_[i], ea = a.row_ptr_[i + 1];
        int kb = b.row_ptr_[i], eb = b.row_ptr_[i + 1];
        while (ka < ea || kb < eb) {
            int ja = ka < ea ? a.col_idx_[ka] : INT_MAX;
            int jb = kb < eb ? b.col_idx_[kb] : INT_MAX;
            int j = std::min(ja, jb);
            double v = 0.0;
            if (ja == j) v += alpha * a.vals_[ka++];
            if (jb == j) v += beta * b.vals_[kb++];
            if (v != 0.0) {
                c.col_idx_.push_back(j);
                c.vals_.push_back(v);
            }
        }
        c.row_ptr_[i + 1] = static_cast<int>(c.col_idx_.size());
    }
    return c;
}

SparseMatrix scale(double alpha, const SparseMatrix& a) {
    SparseMatrix c = a;
    for (double& x : c.vals_) x *= alpha;
    return c;
}

SparseMatrix symmetrize(const SparseMatrix& a) { return add(0.5, a, 0.5, a.transpose()); }

SparseMatrix CooBuilder::compress() const {
    std::vector<Entry> sorted = entries_;
    std::sort(sorted.begin(), sorted.end(), [](const Entry& a, const Entry& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    SparseMatrix m(rows_, cols_);
    std::vector<int> counts(rows_, 0);
    for (std::size_t k = 0; k < sorted.size();) {
        std::size_t e = k;
        double v = 0.0;
        while (e < sorted.size() && sorted[e].i == sorted[k].i && sorted[e].j == sorted[k].j) v += sorted[e++].v;
        if (v != 0.0) {
            m.col_idx_.push_back(sorted[k].j);
            m.vals_.push_back(v);
            ++counts[sorted[k].i];
        }
        k = e;
    }
    for (int i = 0; i < rows_; ++i) m.row_ptr_[i + 1] = m.row_ptr_[i] + counts[i];
    return m;
}

SparseMatrix kronecker(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    CooBuilder coo(c.rows(), c.cols());
    for (int ia = 0; ia < a.rows(); ++ia) {
        auto ca = a.row_columns(ia);
        auto va = a.row_values(ia);
        for (int ib = 0; ib < b.rows(); ++ib) {
            auto cb = b.row_columns(ib);
            auto vb = b.row_values(ib);
            for (std::size_t ka = 0; ka < ca.size(); ++ka)
                for (std::size_t kb = 0; kb < cb.size(); ++kb)
                    coo.add(ia * b.rows() + ib, ca[ka] * b.cols() + cb[kb], va[ka] * vb[kb]);
        }
    }
    return coo.compress();
}

SparseMatrix from_dense(const Eigen::MatrixXd& a, double drop_below) {
    CooBuilder coo(static_cast<int>(a.rows()), static_cast<int>(a.cols()));
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            if (std::abs(a(i, j)) > drop_below) coo.add(i, j, a(i, j));
    return coo.compress();
}

} // namespace feec::linalg
