// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "feec/linalg/sparse.hpp"

#include <Eigen/Dense>
#include <vector>

namespace feec::bspline {

/// Gauss-Legendre nodes and weights on [-1,1], exact for degree <= 2q-1.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int q);

/// Open symmetric knot sequence on [0,1] for splines of degree p.
/// n = N + p basis functions, where N is the number of cells.
class KnotVector {
public:
    KnotVector(int degree, std::vector<double> knots);
    static KnotVector uniform(int degree, int cells);

    int degree() const { return p_; }
    int n_basis() const { return n_; }
    int cells() const { return n_ - p_; }
    const std::vector<double>& knots() const { return knots_; }

    /// strictly increasing cell boundaries (0 = b_0 < ... < b_N = 1)
    const std::vector<double>& breakpoints() const { return breaks_; }

private:
    int p_, n_;
    std::vector<double> knots_;
    std::vector<double> breaks_;
};

enum class Flavor {
    n_spline, ///< normalized B-splines of degree p (partition of unity)
    m_spline  ///< Curry-Schoenberg splines of degree p-1 (unit integrals)
};

struct BasisValues {
    int first = 0;                ///< index of the first nonzero basis function
    std::vector<double> values;   ///< the (degree+1) nonzero values at x
};

/// One univariate factor of the tensor-product spline complex.
class UnivariateSplineSpace {
public:
    UnivariateSplineSpace(KnotVector kv, Flavor flavor);

    const KnotVector& knot_vector() const { return kv_; }
    Flavor flavor() const { return flavor_; }
    int dimension() const { return flavor_ == Flavor::n_spline ? kv_.n_basis() : kv_.n_basis() - 1; }
    int local_size() const { return flavor_ == Flavor::n_spline ? kv_.degree() + 1 : kv_.degree(); }

    /// Basis values at x in [0,1]; endpoints use one-sided limits.
    BasisValues eval_basis(double x) const;

    /// Single basis function value (convenience for tests and sampling).
    double eval_one(int i, double x) const;

private:
    KnotVector kv_;
    Flavor flavor_;
    std::vector<double> m_scale_;       // p / (xi_{i+p+1} - xi_{i+1})
    std::vector<double> reduced_knots_; // knots for the degree p-1 evaluation
};

struct InterpolationGrid {
    std::vector<double> points; ///< symmetric, strictly increasing, endpoints 0 and 1
};

/// Greville abscissae zeta_i = (xi_{i+1} + ... + xi_{i+p}) / p.
InterpolationGrid greville_points(const KnotVector& kv);

/// Collocation matrix V(i,j) = N_j(zeta_i); banded, nonsingular for Greville grids.
Eigen::MatrixXd interpolation_matrix(const UnivariateSplineSpace& space, const InterpolationGrid& grid);

/// Histopolation matrix H(i,j) = integral of the M-spline D_j over [zeta_i, zeta_{i+1}],
/// computed with Gauss quadrature split at the knots (exact).
Eigen::MatrixXd histopolation_matrix(const UnivariateSplineSpace& space, const InterpolationGrid& grid);

/// Bidiagonal (n-1) x n matrix D with D(i,i) = -1, D(i,i+1) = +1: coefficients
/// of d/dx in the M-spline basis from N-spline coefficients.
linalg::SparseMatrix univariate_incidence(const KnotVector& kv);

} // namespace feec::bspline
