// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "feec/derham/derham.hpp"
#include "feec/linalg/sparse.hpp"

#include <Eigen/Cholesky>
#include <map>
#include <optional>
#include <string>

namespace feec::assembly {

using derham::BoundaryCondition;
using derham::BrokenFemSpace;
using derham::ScalarField;
using derham::VectorField;

/// Patch-diagonal mass (Hodge) matrix with cached per-patch Cholesky factors.
class MassMatrix {
public:
    const linalg::SparseMatrix& matrix() const { return matrix_; }
    int patch_dim() const { return patch_dim_; }

    /// patch-wise solve; the relative residual is verified below 1e-12
    Eigen::VectorXd apply_inverse(const Eigen::VectorXd& b) const;

    double inner(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const { return a.dot(matrix_ * b); }
    double norm(const Eigen::VectorXd& a) const;

    friend MassMatrix assemble_mass(const BrokenFemSpace& space, int quad_order);

private:
    linalg::SparseMatrix matrix_;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> block_llt_;
    int patch_dim_ = 0;
};

/// Mapped mass matrix of one broken space; weights J_F, (DF^T DF)^{-1} J_F or
/// 1/J_F depending on the form degree. Default quadrature: p+1 Gauss points
/// per direction per knot span.
MassMatrix assemble_mass(const BrokenFemSpace& space, int quad_order = -1);

/// L2 moments <f, B_i> against the primal basis, same quadrature as the mass.
Eigen::VectorXd moments(const BrokenFemSpace& space, const ScalarField& f, int quad_order = -1);
Eigen::VectorXd moments(const BrokenFemSpace& space, const VectorField& f, int quad_order = -1);

/// Jump penalty (I-P)^T M (I-P); symmetric positive semidefinite, vanishing
/// on conforming coefficient vectors.
linalg::SparseMatrix assemble_stabilization(const linalg::SparseMatrix& projection_b, const MassMatrix& mass);

struct AssembledSystem {
    linalg::SparseMatrix matrix;
    Eigen::VectorXd rhs;
    std::string equation;
    std::map<std::string, double> params;
};

/// One fully discretized complex: spaces, operators, mass matrices.
struct Discretization {
    std::shared_ptr<const geometry::MultipatchTopology> topo;
    derham::FemSpaces spaces;
    derham::DeRhamOperatorSet ops;
    MassMatrix m0, m1, m2;
    int p = 0, cells = 0;
};

Discretization discretize(std::shared_ptr<const geometry::MultipatchTopology> topo, int p, int cells,
                          int quad_order = -1);

/// Stabilized scalar Laplace system (grad P0)^T M1 (grad P0) + alpha S0; the
/// right-hand side carries the boundary lifting correction when `boundary_phi`
/// is given. Outputs the lifting field so the full solution can be recovered.
AssembledSystem assemble_poisson_system(const Discretization& d, double alpha, BoundaryCondition bc,
                                        const ScalarField& f, const ScalarField* boundary_phi = nullptr,
                                        derham::FemField* lifting_out = nullptr);

/// Stabilized time-harmonic curl-curl system with filtered zeroth-order term.
AssembledSystem assemble_maxwell_system(const Discretization& d, double omega, double alpha, BoundaryCondition bc,
                                        const VectorField& j, const VectorField* boundary_u = nullptr,
                                        derham::FemField* lifting_out = nullptr);

/// Symmetric pencil matrix of the stabilized Hodge-Laplace operator for form
/// degree 0 or 1 (the right-hand matrix of the pencil is the mass matrix).
/// Materialized densely; intended for desk-scale eigencomputations.
Eigen::MatrixXd assemble_hodge_laplace_pencil(const Discretization& d, int ell, BoundaryCondition bc, double alpha);

/// Same operator in matrix-free form, for iterative methods. The returned
/// callable references `d` and must not outlive it.
std::function<Eigen::VectorXd(const Eigen::VectorXd&)>
hodge_laplace_operator(const Discretization& d, int ell, BoundaryCondition bc, double alpha);

/// Rectangular harmonic mass matrix M1 * H, one column per harmonic field.
Eigen::MatrixXd assemble_harmonic_mass(const MassMatrix& m1, const Eigen::MatrixXd& harmonic_coeffs);

/// "row col value" text dump, one entry per line.
void write_coordinate_format(const linalg::SparseMatrix& m, const std::string& path);

} // namespace feec::assembly
