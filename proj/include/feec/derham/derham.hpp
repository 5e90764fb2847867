// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "feec/bspline/bspline.hpp"
#include "feec/geometry/geometry.hpp"
#include "feec/linalg/sparse.hpp"

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

namespace feec::derham {

using geometry::Vec2;
using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

enum class BoundaryCondition { homogeneous, inhomogeneous };

/// Broken tensor-product spline space of one form degree over a multipatch
/// topology. Flattened indexing is patch-contiguous: patch, then component,
/// then row-major (i1, i2).
class BrokenFemSpace {
public:
    BrokenFemSpace(std::shared_ptr<const geometry::MultipatchTopology> topo, int form_degree, int p, int cells);

    int form_degree() const { return form_degree_; }
    int degree() const { return p_; }
    int cells() const { return cells_; }
    int n_patches() const { return topo_->n_patches(); }
    int n_components() const { return form_degree_ == 1 ? 2 : 1; }
    int n_univariate() const { return n_; } ///< n = N + p

    /// basis counts of component c along direction d (0 or 1)
    int comp_size(int c, int d) const;
    int comp_dim(int c) const { return comp_size(c, 0) * comp_size(c, 1); }
    int comp_offset(int c) const { return c == 0 ? 0 : comp_dim(0); }
    int patch_dim() const;
    int dim() const { return n_patches() * patch_dim(); }

    int index(int patch, int comp, int i1, int i2) const {
        return patch * patch_dim() + comp_offset(comp) + i1 * comp_size(comp, 1) + i2;
    }
    int patch_of(int i) const { return i / patch_dim(); }

    bspline::Flavor flavor(int comp, int dir) const;
    const bspline::UnivariateSplineSpace& univariate(bspline::Flavor f) const {
        return f == bspline::Flavor::n_spline ? basis_n_ : basis_m_;
    }

    const geometry::MultipatchTopology& topology() const { return *topo_; }
    std::shared_ptr<const geometry::MultipatchTopology> topology_ptr() const { return topo_; }
    const bspline::KnotVector& knots() const { return knots_; }
    const bspline::InterpolationGrid& greville() const { return greville_; }

private:
    std::shared_ptr<const geometry::MultipatchTopology> topo_;
    int form_degree_, p_, cells_, n_;
    bspline::KnotVector knots_;
    bspline::UnivariateSplineSpace basis_n_, basis_m_;
    bspline::InterpolationGrid greville_;
};

struct FemSpaces {
    std::shared_ptr<BrokenFemSpace> v0, v1, v2;
};

/// The broken grad-curl complex: V0 (p,p) -> V1 ((p-1,p),(p,p-1)) -> V2 (p-1,p-1).
FemSpaces build_spaces(std::shared_ptr<const geometry::MultipatchTopology> topo, int p, int cells);

/// Coefficient vector in the primal B-spline basis of one broken space.
struct FemField {
    const BrokenFemSpace* space = nullptr;
    Eigen::VectorXd coeffs;
};

/// point evaluation in reference coordinates (no push-forward)
double eval_reference_scalar(const FemField& f, int patch, const Vec2& xhat);
Vec2 eval_reference_vector(const FemField& f, int patch, const Vec2& xhat);
/// physical values: identity for 0-forms, DF^{-T} for 1-forms, 1/J_F for 2-forms
double eval_physical_scalar(const FemField& f, int patch, const Vec2& xhat);
Vec2 eval_physical_vector(const FemField& f, int patch, const Vec2& xhat);

/// Conforming projection in both bases. The geometric matrix averages matched
/// interface degrees of freedom; the B-spline matrix is its collocation
/// conjugate K^{-1} P K.
struct ConformingProjection {
    linalg::SparseMatrix geometric;
    linalg::SparseMatrix bspline;
};

/// Sparse operator matrices of the broken complex in the B-spline bases.
/// Mass matrices live in the assembly module.
struct DeRhamOperatorSet {
    linalg::SparseMatrix grad; ///< patch-diagonal incidence, entries in {-1,0,1}
    linalg::SparseMatrix curl;
    ConformingProjection p0_hom, p0_inhom, p1_hom, p1_inhom;
    linalg::SparseMatrix p2; ///< identity: V2 has no interface constraints

    // univariate collocation factors, shared by all patches
    Eigen::MatrixXd interp;                       ///< V(i,j) = N_j(zeta_i)
    Eigen::MatrixXd histo;                        ///< H(i,j) = cell integrals of D_j
    Eigen::PartialPivLU<Eigen::MatrixXd> interp_lu;
    Eigen::PartialPivLU<Eigen::MatrixXd> histo_lu;

    const linalg::SparseMatrix& projection(int ell, BoundaryCondition bc) const;
    /// patch-diagonal K^l assembled as a sparse matrix (structural checks, tests)
    linalg::SparseMatrix collocation_matrix(const BrokenFemSpace& space) const;
    /// beta = (K^l)^{-1} sigma via per-patch Kronecker solves
    Eigen::VectorXd collocation_solve(const BrokenFemSpace& space, const Eigen::VectorXd& sigma) const;
    Eigen::VectorXd collocation_apply(const BrokenFemSpace& space, const Eigen::VectorXd& beta) const;
};

DeRhamOperatorSet build_operators(const FemSpaces& spaces);

/// geometric degrees of freedom: point values, tangential edge integrals, or
/// cell integrals of an analytic field (quadrature order p+2 per knot span)
Eigen::VectorXd geometric_dofs(const BrokenFemSpace& space, const ScalarField& f);
Eigen::VectorXd geometric_dofs(const BrokenFemSpace& space, const VectorField& f);

FemField primal_projection(const BrokenFemSpace& space, const DeRhamOperatorSet& ops, const ScalarField& f);
FemField primal_projection(const BrokenFemSpace& space, const DeRhamOperatorSet& ops, const VectorField& f);

/// dual-basis coefficients of the dual commuting projection: (P_B)^T m,
/// where m holds the L2 moments of the field against the primal basis
Eigen::VectorXd dual_projection_coeffs(const linalg::SparseMatrix& projection_b, const Eigen::VectorXd& moments);

/// flags the degrees of freedom carried by domain-boundary edges
/// (nodes for 0-forms, tangential edge dofs for 1-forms)
std::vector<char> boundary_dof_mask(const BrokenFemSpace& space);

/// lifting field for inhomogeneous boundary data: geometric dofs of `f`
/// restricted to the boundary, all interior dofs zero
FemField boundary_lifting(const BrokenFemSpace& space, const DeRhamOperatorSet& ops, const ScalarField& f);
FemField boundary_lifting(const BrokenFemSpace& space, const DeRhamOperatorSet& ops, const VectorField& f);

} // namespace feec::derham
