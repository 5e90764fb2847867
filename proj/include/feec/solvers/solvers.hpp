// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "feec/assembly/assembly.hpp"
#include "feec/linalg/solvers.hpp"

#include <cmath>
#include <optional>

namespace feec::solvers {

using assembly::AssembledSystem;
using assembly::Discretization;
using derham::BoundaryCondition;
using derham::FemField;
using derham::ScalarField;
using derham::VectorField;

/// Solves the stabilized Poisson system (conjugate gradients; SPD for alpha>0)
/// and verifies that the solution is conforming. Returns the full broken
/// solution including the boundary lifting.
FemField solve_poisson(const Discretization& d, const AssembledSystem& sys, const FemField& lifting);

/// Solves the stabilized time-harmonic Maxwell system (dense symmetric
/// indefinite factorization at desk scale).
FemField solve_maxwell_harmonic(const Discretization& d, const AssembledSystem& sys, const FemField& lifting);

enum class CurlCurlMode {
    conga_generalized,   ///< (C P1)^T M2 C P1 u = lambda [P^T M P + (I-P)^T M (I-P)] u
    hodge_penalized      ///< stabilized Hodge-Laplace pencil vs the mass matrix
};

struct EigenResult {
    Eigen::VectorXd eigenvalues;    // ascending
    Eigen::MatrixXd eigenvectors;   // columns, B-orthonormal
    double zero_threshold = 1e-8;
    int n_zero = 0;                 // eigenvalues classified as zero modes
    Eigen::VectorXd nonzero() const { return eigenvalues.tail(eigenvalues.size() - n_zero); }
};

EigenResult eig_curlcurl(const Discretization& d, CurlCurlMode mode, BoundaryCondition bc = BoundaryCondition::homogeneous,
                         double alpha = 10.0, double zero_tol = 1e-8);

struct HarmonicBasis {
    Eigen::MatrixXd coeffs; ///< one M1-orthonormal column per harmonic field
    int dimension() const { return static_cast<int>(coeffs.cols()); }
};

/// Kernel basis of the stabilized Hodge-Laplace pencil for 1-forms; the count
/// equals a Betti number of the domain at sufficient resolution. Requires a
/// factor-100 spectral gap around zero_tol.
HarmonicBasis harmonic_basis(const Discretization& d, BoundaryCondition bc, double alpha = 10.0,
                             double zero_tol = 1e-8);

enum class MagnetostaticBc {
    pseudo_vacuum, ///< n x B = 0, homogeneous sequence
    metallic       ///< n . B = 0 weakly, inhomogeneous sequence with M0 regularization
};

struct MagnetostaticSolution {
    FemField b;             // magnetic field in V1
    Eigen::VectorXd p;      // scalar multiplier coefficients (V0)
    Eigen::VectorXd z;      // harmonic multiplier coordinates
    double p_norm = 0, z_norm = 0, b_norm = 0;
};

/// 3x3 block saddle system with divergence and harmonic constraints; the
/// scalar current J drives the curl part of the field.
MagnetostaticSolution solve_magnetostatic(const Discretization& d, MagnetostaticBc bc, double alpha0, double alpha1,
                                          const ScalarField& j, const HarmonicBasis& harmonics);

/// ||curl_h||^2 as the spectral radius of Htilde1 (C P1)^T M2 C P1, estimated
/// with the power method (used by the CFL condition).
linalg::PowerMethodResult curl_operator_norm_squared(const Discretization& d, BoundaryCondition bc,
                                                     double tol = 1e-10);

/// Relative L2 errors against an analytic solution, by quadrature of order
/// p+2 on the pushed-forward field values.
double l2_error(const Discretization& d, const FemField& f, const ScalarField& exact);
double l2_error(const Discretization& d, const FemField& f, const VectorField& exact);

/// relative eigenvalue error |a - b| / max(a, b)
inline double relative_eigenvalue_error(double a, double b) { return std::abs(a - b) / std::max(a, b); }

} // namespace feec::solvers
