// SPDX-License-Identifier: Apache-2.0
#include "feec/solvers/solvers.hpp"

#include "feec/core.hpp"

#include <cmath>

namespace feec::solvers {

using linalg::SparseMatrix;

namespace {

void check_conforming(const SparseMatrix& projection, const assembly::MassMatrix& mass,
                      const Eigen::VectorXd& x, double tol, const char* what) {
    const double nx = mass.norm(x);
    if (nx == 0.0) return;
    const double jump = mass.norm(x - projection * x);
    if (jump > tol * nx)
        throw NumericalError(std::string(what) + ": solution failed the conformity check, relative jump " +
                             std::to_string(jump / nx));
}

} // namespace

FemField solve_poisson(const Discretization& d, const AssembledSystem& sys, const FemField& lifting) {
    if (sys.params.at("alpha") == 0.0)
        throw ConfigError("solve_poisson: alpha = 0 leaves the jump space unconstrained");
    auto [x, report] = linalg::cg_solve(sys.matrix, sys.rhs, 1e-13);
    if (!report.converged) throw NumericalError("solve_poisson: conjugate gradients did not converge");
    check_conforming(d.ops.p0_hom.bspline, d.m0, x, 1e-9, "solve_poisson");
    FemField out{d.spaces.v0.get(), x};
    if (lifting.coeffs.size() == out.coeffs.size()) out.coeffs += lifting.coeffs;
    return out;
}

FemField solve_maxwell_harmonic(const Discretization& d, const AssembledSystem& sys, const FemField& lifting) {
    if (sys.params.at("alpha") == 0.0)
        throw ConfigError("solve_maxwell_harmonic: alpha = 0 leaves the jump space unconstrained");
    if (sys.rhs.norm() == 0.0) {
        // zero data: the zero field solves the system even when omega^2 sits
        // in the kernel of the curl-curl part (omega = 0)
        FemField out{d.spaces.v1.get(), Eigen::VectorXd::Zero(d.spaces.v1->dim())};
        if (lifting.coeffs.size() == out.coeffs.size()) out.coeffs += lifting.coeffs;
        return out;
    }
    Eigen::VectorXd x;
    try {
        x = linalg::symmetric_indefinite_solve(sys.matrix, sys.rhs);
    } catch (const NumericalError&) {
        throw NumericalError("solve_maxwell_harmonic: system is near-singular; omega^2 matches a conforming "
                             "curl-curl eigenvalue");
    }
    check_conforming(d.ops.p1_hom.bspline, d.m1, x, 1e-8, "solve_maxwell_harmonic");
    FemField out{d.spaces.v1.get(), x};
    if (lifting.coeffs.size() == out.coeffs.size()) out.coeffs += lifting.coeffs;
    return out;
}

EigenResult eig_curlcurl(const Discretization& d, CurlCurlMode mode, BoundaryCondition bc, double alpha,
                         double zero_tol) {
    constexpr int kDenseLimit = 6000;
    if (d.spaces.v1->dim() > kDenseLimit)
        throw ConfigError("eig_curlcurl: pencil dimension exceeds the dense eigensolver limit");
    const SparseMatrix& p1 = d.ops.projection(1, bc);
    Eigen::MatrixXd a, b;
    if (mode == CurlCurlMode::conga_generalized) {
        const SparseMatrix cp = d.ops.curl * p1;
        a = linalg::symmetrize(cp.transpose() * (d.m2.matrix() * cp)).dense();
        const SparseMatrix jump = linalg::add(1.0, SparseMatrix::identity(p1.rows()), -1.0, p1);
        const SparseMatrix bmat =
            linalg::add(1.0, linalg::symmetrize(p1.transpose() * (d.m1.matrix() * p1)), 1.0,
                        linalg::symmetrize(jump.transpose() * (d.m1.matrix() * jump)));
        b = bmat.dense();
    } else {
        a = assembly::assemble_hodge_laplace_pencil(d, 1, bc, alpha);
        b = d.m1.matrix().dense();
    }
    auto pairs = linalg::dense_generalized_symmetric_eig(a, b);
    EigenResult res;
    res.eigenvalues = pairs.values;
    res.eigenvectors = pairs.vectors;
    res.zero_threshold = zero_tol;
    while (res.n_zero < res.eigenvalues.size() && res.eigenvalues[res.n_zero] < zero_tol) ++res.n_zero;
    return res;
}

HarmonicBasis harmonic_basis(const Discretization& d, BoundaryCondition bc, double alpha, double zero_tol) {
    if (alpha <= 0.0) throw ConfigError("harmonic_basis: alpha must be positive");
    const Eigen::MatrixXd a = assembly::assemble_hodge_laplace_pencil(d, 1, bc, alpha);
    auto pairs = linalg::dense_generalized_symmetric_eig(a, d.m1.matrix().dense());
    int nzero = 0;
    while (nzero < pairs.values.size() && pairs.values[nzero] < zero_tol) ++nzero;
    // demand an unambiguous factor-100 spectral gap around the threshold
    if (nzero > 0 && pairs.values[nzero - 1] > zero_tol / 100.0)
        throw NumericalError("harmonic_basis: no clear spectral gap below the zero threshold");
    if (nzero < pairs.values.size() && pairs.values[nzero] < zero_tol * 100.0)
        throw NumericalError("harmonic_basis: no clear spectral gap above the zero threshold");
    HarmonicBasis basis;
    basis.coeffs = pairs.vectors.leftCols(nzero); // already M1-orthonormal
    return basis;
}

MagnetostaticSolution solve_magnetostatic(const Discretization& d, MagnetostaticBc bc, double alpha0, double alpha1,
                                          const ScalarField& j, const HarmonicBasis& harmonics) {
    if (alpha0 == 0.0 || alpha1 == 0.0)
        throw ConfigError("solve_magnetostatic: stabilization parameters must be nonzero");
    const BoundaryCondition seq =
        bc == MagnetostaticBc::pseudo_vacuum ? BoundaryCondition::homogeneous : BoundaryCondition::inhomogeneous;
    const SparseMatrix& p0 = d.ops.projection(0, seq);
    const SparseMatrix& p1 = d.ops.projection(1, seq);

    const int n0 = d.spaces.v0->dim();
    const int n1 = d.spaces.v1->dim();
    const int nh = harmonics.dimension();

    const SparseMatrix gp = d.ops.grad * p0;
    const SparseMatrix cp = d.ops.curl * p1;
    const Eigen::MatrixXd div_block = (gp.transpose() * d.m1.matrix()).dense(); // n0 x n1
    Eigen::MatrixXd top_left = linalg::scale(alpha0, assembly::assemble_stabilization(p0, d.m0)).dense();
    if (bc == MagnetostaticBc::metallic) top_left += d.m0.matrix().dense(); // regularization fixing the mean of p
    Eigen::MatrixXd curl_block =
        linalg::add(1.0, linalg::symmetrize(cp.transpose() * (d.m2.matrix() * cp)), alpha1,
                    assembly::assemble_stabilization(p1, d.m1))
            .dense();
    const Eigen::MatrixXd mh = assembly::assemble_harmonic_mass(d.m1, harmonics.coeffs); // n1 x nh

    const int n = n0 + n1 + nh;
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n, n);
    sys.topLeftCorner(n0, n0) = top_left;
    sys.block(0, n0, n0, n1) = div_block;
    sys.block(n0, 0, n1, n0) = div_block.transpose();
    sys.block(n0, n0, n1, n1) = curl_block;
    if (nh > 0) {
        sys.block(n0, n0 + n1, n1, nh) = mh;
        sys.block(n0 + n1, n0, nh, n1) = mh.transpose();
    }

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs.segment(n0, n1) = cp.transpose() * assembly::moments(*d.spaces.v2, j);

    Eigen::VectorXd sol;
    try {
        sol = linalg::symmetric_indefinite_solve(sys, rhs);
    } catch (const NumericalError&) {
        throw NumericalError("solve_magnetostatic: singular saddle system (missing harmonic constraint?)");
    }

    MagnetostaticSolution out;
    out.p = sol.head(n0);
    out.b = FemField{d.spaces.v1.get(), sol.segment(n0, n1)};
    out.z = sol.tail(nh);
    out.p_norm = d.m0.norm(out.p);
    out.b_norm = d.m1.norm(out.b.coeffs);
    out.z_norm = out.z.norm();
    const double scale = std::max(out.b_norm, 1e-300);
    if (out.p_norm > 1e-8 * scale || out.z_norm > 1e-8 * scale)
        throw NumericalError("solve_magnetostatic: auxiliary unknowns did not vanish");
    check_conforming(p1, d.m1, out.b.coeffs, 1e-8, "solve_magnetostatic");
    if (nh > 0) {
        const Eigen::VectorXd orth = harmonics.coeffs.transpose() * (d.m1.matrix() * out.b.coeffs);
        if (orth.cwiseAbs().maxCoeff() > 1e-8 * scale)
            throw NumericalError("solve_magnetostatic: field is not orthogonal to the harmonic space");
    }
    return out;
}

linalg::PowerMethodResult curl_operator_norm_squared(const Discretization& d, BoundaryCondition bc, double tol) {
    const SparseMatrix& p1 = d.ops.projection(1, bc);
    const SparseMatrix cp = d.ops.curl * p1;
    const SparseMatrix cpt_m2 = cp.transpose() * d.m2.matrix();
    auto op = [&](const Eigen::VectorXd& x) { return d.m1.apply_inverse(cpt_m2 * (cp * x)); };
    return linalg::power_method_spectral_radius(op, d.spaces.v1->dim(), tol);
}

namespace {

template <class Exact, class Eval>
double l2_error_impl(const Discretization& d, const Exact& exact, const Eval& eval) {
    const auto& rule = bspline::gauss_legendre(d.p + 2);
    const auto& breaks = d.spaces.v0->knots().breakpoints();
    double err = 0.0, ref = 0.0;
    for (int k = 0; k < d.topo->n_patches(); ++k) {
        const auto& map = d.topo->patches[k];
        for (std::size_t cx = 0; cx + 1 < breaks.size(); ++cx)
            for (std::size_t cy = 0; cy + 1 < breaks.size(); ++cy)
                for (std::size_t gx = 0; gx < rule.nodes.size(); ++gx)
                    for (std::size_t gy = 0; gy < rule.nodes.size(); ++gy) {
                        const double hx = 0.5 * (breaks[cx + 1] - breaks[cx]);
                        const double hy = 0.5 * (breaks[cy + 1] - breaks[cy]);
                        const derham::Vec2 xh(0.5 * (breaks[cx] + breaks[cx + 1]) + hx * rule.nodes[gx],
                                              0.5 * (breaks[cy] + breaks[cy + 1]) + hy * rule.nodes[gy]);
                        const double w =
                            hx * hy * rule.weights[gx] * rule.weights[gy] * map.metric(xh).jacobian_det;
                        const auto u = exact(map(xh));
                        const auto diff = u - eval(k, xh);
                        if constexpr (std::is_same_v<std::decay_t<decltype(u)>, double>) {
                            err += w * diff * diff;
                            ref += w * u * u;
                        } else {
                            err += w * diff.squaredNorm();
                            ref += w * u.squaredNorm();
                        }
                    }
    }
    return std::sqrt(err / std::max(ref, 1e-300));
}

} // namespace

double l2_error(const Discretization& d, const FemField& f, const ScalarField& exact) {
    return l2_error_impl(d, exact,
                         [&](int k, const derham::Vec2& xh) { return derham::eval_physical_scalar(f, k, xh); });
}

double l2_error(const Discretization& d, const FemField& f, const VectorField& exact) {
    return l2_error_impl(d, exact,
                         [&](int k, const derham::Vec2& xh) { return derham::eval_physical_vector(f, k, xh); });
}

} // namespace feec::solvers
