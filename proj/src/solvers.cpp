// SPDX-License-Identifier: Apache-2.0
#include "feec/linalg/solvers.hpp"

#include "feec/core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace feec::linalg {

std::pair<Eigen::VectorXd, LinearSolveReport>
cg_solve(const LinearOperator& a, const Eigen::VectorXd& b, double tol, int max_iter) {
    const int n = static_cast<int>(b.size());
    if (max_iter < 0) max_iter = 10 * n;
    const double bnorm = b.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    LinearSolveReport rep;
    if (bnorm == 0.0) {
        rep.converged = true;
        return {x, rep};
    }
    Eigen::VectorXd r = b;
    Eigen::VectorXd p = r;
    double rho = r.squaredNorm();
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd ap = a(p);
        const double denom = p.dot(ap);
        if (!std::isfinite(denom)) throw NumericalError("cg_solve: non-finite values encountered");
        if (denom <= 0.0) break; // operator not SPD on this direction
        const double alpha = rho / denom;
        x += alpha * p;
        r -= alpha * ap;
        rep.iterations = it + 1;
        const double rho_new = r.squaredNorm();
        if (std::sqrt(rho_new) <= tol * bnorm) break;
        p = r + (rho_new / rho) * p;
        rho = rho_new;
    }
    rep.residual = (a(x) - b).norm() / bnorm;
    rep.converged = rep.residual <= 10.0 * tol;
    if (!std::isfinite(rep.residual)) throw NumericalError("cg_solve: non-finite residual");
    return {x, rep};
}

std::pair<Eigen::VectorXd, LinearSolveReport>
cg_solve(const SparseMatrix& a, const Eigen::VectorXd& b, double tol, int max_iter) {
    return cg_solve([&a](const Eigen::VectorXd& x) { return a * x; }, b, tol, max_iter);
}

EigenPairs dense_generalized_symmetric_eig(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success)
        throw NumericalError("dense_generalized_symmetric_eig: factorization failed (B not SPD?)");
    EigenPairs out{es.eigenvalues(), es.eigenvectors()};
    const double anorm = a.cwiseAbs().maxCoeff() * a.rows();
    for (int j = 0; j < out.values.size(); ++j) {
        const double res = (a * out.vectors.col(j) - out.values[j] * (b * out.vectors.col(j))).norm();
        if (res > 1e-9 * std::max(anorm, 1.0))
            throw NumericalError("dense_generalized_symmetric_eig: residual check failed");
    }
    return out;
}

PowerMethodResult power_method_spectral_radius(const LinearOperator& m, int dim, double tol, int max_iter) {
    Eigen::VectorXd x(dim);
    // deterministic pseudo-random start vector, nonzero in every component
    for (int i = 0; i < dim; ++i) x[i] = std::sin(1.0 + 0.7 * i) + 1e-3;
    x.normalize();
    PowerMethodResult res;
    double prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd y = m(x);
        const double ynorm = y.norm();
        res.iterations = it + 1;
        if (ynorm == 0.0) { // operator annihilates the iterate: spectral radius 0
            res.value = 0.0;
            res.converged = true;
            return res;
        }
        const double rayleigh = x.dot(y);
        x = y / ynorm;
        if (it > 0 && std::abs(rayleigh - prev) <= tol * std::max(std::abs(rayleigh), 1e-300)) {
            res.value = rayleigh;
            res.converged = true;
            return res;
        }
        prev = rayleigh;
        res.value = rayleigh;
    }
    return res;
}

Eigen::VectorXd symmetric_indefinite_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double pivot_tol) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::VectorXd diag = lu.matrixLU().diagonal().cwiseAbs();
    const double dmax = diag.maxCoeff();
    const double dmin = diag.minCoeff();
    if (dmax == 0.0 || dmin / dmax < pivot_tol)
        throw NumericalError("symmetric_indefinite_solve: singular matrix, pivot ratio " +
                             std::to_string(dmax == 0.0 ? 0.0 : dmin / dmax));
    Eigen::VectorXd x = lu.solve(b);
    const double bnorm = b.norm();
    if (bnorm > 0.0) {
        const double rel = (a * x - b).norm() / bnorm;
        if (rel > 1e-10)
            // one step of iterative refinement before giving up
            x += lu.solve(b - a * x);
        if ((a * x - b).norm() / bnorm > 1e-8)
            throw NumericalError("symmetric_indefinite_solve: residual too large");
    }
    return x;
}

Eigen::VectorXd symmetric_indefinite_solve(const SparseMatrix& a, const Eigen::VectorXd& b, double pivot_tol) {
    return symmetric_indefinite_solve(a.dense(), b, pivot_tol);
}

} // namespace feec::linalg
