// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "feec/linalg/sparse.hpp"

#include <Eigen/Dense>
#include <functional>
#include <string>

namespace feec::linalg {

using LinearOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LinearSolveReport {
    int iterations = 0;
    double residual = 0.0; // recomputed ||Ax-b||/||b||, never the internal recursion
    bool converged = false;
};

/// Conjugate gradients for SPD operators. The reported residual is recomputed
/// from the operator after the iteration stops.
std::pair<Eigen::VectorXd, LinearSolveReport>
cg_solve(const LinearOperator& a, const Eigen::VectorXd& b, double tol = 1e-12, int max_iter = -1);

std::pair<Eigen::VectorXd, LinearSolveReport>
cg_solve(const SparseMatrix& a, const Eigen::VectorXd& b, double tol = 1e-12, int max_iter = -1);

struct EigenPairs {
    Eigen::VectorXd values;  // ascending
    Eigen::MatrixXd vectors; // columns, B-orthonormal
};

/// Generalized symmetric-definite eigenproblem A v = lambda B v with B SPD.
/// Residuals ||Av - lambda Bv|| <= 1e-9 ||A|| are verified per pair.
EigenPairs dense_generalized_symmetric_eig(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct PowerMethodResult {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Largest eigenvalue of a diagonalizable operator with nonnegative real
/// spectrum, via power iteration on a fixed deterministic start vector.
PowerMethodResult power_method_spectral_radius(const LinearOperator& m, int dim,
                                               double tol = 1e-10, int max_iter = 200000);

/// Symmetric indefinite solve (dense, pivoted). Throws NumericalError with the
/// pivot ratio when the matrix is numerically singular.
Eigen::VectorXd symmetric_indefinite_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                           double pivot_tol = 1e-12);
Eigen::VectorXd symmetric_indefinite_solve(const SparseMatrix& a, const Eigen::VectorXd& b,
                                           double pivot_tol = 1e-12);

} // namespace feec::linalg
