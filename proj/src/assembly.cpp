// SPDX-License-Identifier: Apache-2.0
#include "feec/assembly/assembly.hpp"

#include "feec/core.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace feec::assembly {

using bspline::Flavor;
using derham::Vec2;
using linalg::CooBuilder;
using linalg::SparseMatrix;

namespace {

// basis values of one univariate space at the Gauss points of every knot cell
struct BasisTable {
    std::vector<int> first;                // first nonzero index, per cell
    std::vector<Eigen::MatrixXd> values;   // per cell: q x n_local
};

BasisTable tabulate(const bspline::UnivariateSplineSpace& sp, const std::vector<double>& breaks,
                    const bspline::GaussRule& rule) {
    BasisTable t;
    const int ncells = static_cast<int>(breaks.size()) - 1;
    const int q = static_cast<int>(rule.nodes.size());
    t.first.resize(ncells);
    t.values.reserve(ncells);
    for (int c = 0; c < ncells; ++c) {
        Eigen::MatrixXd vals(q, sp.local_size());
        for (int g = 0; g < q; ++g) {
            const double x = 0.5 * (breaks[c] + breaks[c + 1]) + 0.5 * (breaks[c + 1] - breaks[c]) * rule.nodes[g];
            const auto bv = sp.eval_basis(x);
            if (g == 0) t.first[c] = bv.first;
            for (int a = 0; a < sp.local_size(); ++a)
                vals(g, a) = a < static_cast<int>(bv.values.size()) ? bv.values[a] : 0.0;
            // local numbering is anchored at the cell's first index
            if (bv.first != t.first[c]) {
                vals.row(g).setZero();
                for (std::size_t a = 0; a < bv.values.size(); ++a) {
                    const int shift = bv.first - t.first[c] + static_cast<int>(a);
                    if (shift >= 0 && shift < sp.local_size()) vals(g, shift) = bv.values[a];
                }
            }
        }
        t.values.push_back(std::move(vals));
    }
    return t;
}

struct QuadGrid {
    bspline::GaussRule rule;
    std::vector<double> breaks;
    // cell -> per-Gauss abscissa and scaled weight
    std::vector<std::vector<double>> x, w;
};

QuadGrid make_quad_grid(const bspline::KnotVector& kv, int q) {
    QuadGrid g;
    g.rule = bspline::gauss_legendre(q);
    g.breaks = kv.breakpoints();
    const int ncells = static_cast<int>(g.breaks.size()) - 1;
    g.x.resize(ncells);
    g.w.resize(ncells);
    for (int c = 0; c < ncells; ++c) {
        const double mid = 0.5 * (g.breaks[c] + g.breaks[c + 1]);
        const double half = 0.5 * (g.breaks[c + 1] - g.breaks[c]);
        for (std::size_t k = 0; k < g.rule.nodes.size(); ++k) {
            g.x[c].push_back(mid + half * g.rule.nodes[k]);
            g.w[c].push_back(half * g.rule.weights[k]);
        }
    }
    return g;
}

int default_quad_order(const BrokenFemSpace& sp, int requested) {
    return requested > 0 ? requested : sp.degree() + 1;
}

} // namespace

Eigen::VectorXd MassMatrix::apply_inverse(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x(b.size());
    const int kp = static_cast<int>(block_llt_.size());
    for (int k = 0; k < kp; ++k)
        x.segment(k * patch_dim_, patch_dim_) = block_llt_[k].solve(b.segment(k * patch_dim_, patch_dim_));
    const double bn = b.norm();
    if (bn > 0.0 && (matrix_ * x - b).norm() / bn > 1e-12)
        throw AssemblyError("apply_mass_inverse: residual above 1e-12");
    return x;
}

double MassMatrix::norm(const Eigen::VectorXd& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

MassMatrix assemble_mass(const BrokenFemSpace& sp, int quad_order) {
    const int q = default_quad_order(sp, quad_order);
    const QuadGrid grid = make_quad_grid(sp.knots(), q);
    const int ncells = static_cast<int>(grid.breaks.size()) - 1;
    const int ell = sp.form_degree();

    const BasisTable tab_n = tabulate(sp.univariate(Flavor::n_spline), grid.breaks, grid.rule);
    const BasisTable tab_m = tabulate(sp.univariate(Flavor::m_spline), grid.breaks, grid.rule);
    auto table = [&](Flavor f) -> const BasisTable& { return f == Flavor::n_spline ? tab_n : tab_m; };

    CooBuilder coo(sp.dim(), sp.dim());
    const int nq = static_cast<int>(grid.rule.nodes.size());
    for (int k = 0; k < sp.n_patches(); ++k) {
        const auto& map = sp.topology().patches[k];
        for (int cx = 0; cx < ncells; ++cx) {
            for (int cy = 0; cy < ncells; ++cy) {
                for (int gx = 0; gx < nq; ++gx) {
                    for (int gy = 0; gy < nq; ++gy) {
                        const Vec2 xh(grid.x[cx][gx], grid.x[cy][gy]);
                        const double wq = grid.w[cx][gx] * grid.w[cy][gy];
                        const auto mt = map.metric(xh);
                        if (ell == 0 || ell == 2) {
                            const double weight = wq * (ell == 0 ? mt.jacobian_det : 1.0 / mt.jacobian_det);
                            const Flavor f = ell == 0 ? Flavor::n_spline : Flavor::m_spline;
                            const BasisTable& tx = table(f);
                            const BasisTable& ty = table(f);
                            const int loc = sp.univariate(f).local_size();
                            for (int a = 0; a < loc; ++a)
                                for (int b = 0; b < loc; ++b) {
                                    const double vab = tx.values[cx](gx, a) * ty.values[cy](gy, b);
                                    if (vab == 0.0) continue;
                                    const int i = sp.index(k, 0, tx.first[cx] + a, ty.first[cy] + b);
                                    for (int a2 = 0; a2 < loc; ++a2)
                                        for (int b2 = 0; b2 < loc; ++b2) {
                                            const double v2 = tx.values[cx](gx, a2) * ty.values[cy](gy, b2);
                                            if (v2 == 0.0) continue;
                                            coo.add(i, sp.index(k, 0, tx.first[cx] + a2, ty.first[cy] + b2),
                                                    weight * vab * v2);
                                        }
                                }
                        } else {
                            // vector mass with weight Ginv * J
                            const Eigen::Matrix2d w2 = wq * mt.jacobian_det * mt.metric_inverse;
                            for (int ca = 0; ca < 2; ++ca) {
                                const BasisTable& ax = table(sp.flavor(ca, 0));
                                const BasisTable& ay = table(sp.flavor(ca, 1));
                                const int la_x = sp.univariate(sp.flavor(ca, 0)).local_size();
                                const int la_y = sp.univariate(sp.flavor(ca, 1)).local_size();
                                for (int cb = 0; cb < 2; ++cb) {
                                    if (w2(ca, cb) == 0.0) continue;
                                    const BasisTable& bx = table(sp.flavor(cb, 0));
                                    const BasisTable& by = table(sp.flavor(cb, 1));
                                    const int lb_x = sp.univariate(sp.flavor(cb, 0)).local_size();
                                    const int lb_y = sp.univariate(sp.flavor(cb, 1)).local_size();
                                    for (int a1 = 0; a1 < la_x; ++a1)
                                        for (int a2 = 0; a2 < la_y; ++a2) {
                                            const double va = ax.values[cx](gx, a1) * ay.values[cy](gy, a2);
                                            if (va == 0.0) continue;
                                            const int i = sp.index(k, ca, ax.first[cx] + a1, ay.first[cy] + a2);
                                            for (int b1 = 0; b1 < lb_x; ++b1)
                                                for (int b2 = 0; b2 < lb_y; ++b2) {
                                                    const double vb =
                                                        bx.values[cx](gx, b1) * by.values[cy](gy, b2);
                                                    if (vb == 0.0) continue;
                                                    coo.add(i,
                                                            sp.index(k, cb, bx.first[cx] + b1, by.first[cy] + b2),
                                                            w2(ca, cb) * va * vb);
                                                }
                                        }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    MassMatrix mm;
    mm.matrix_ = linalg::symmetrize(coo.compress());
    mm.patch_dim_ = sp.patch_dim();
    const Eigen::MatrixXd dense = mm.matrix_.dense();
    for (int k = 0; k < sp.n_patches(); ++k) {
        Eigen::LLT<Eigen::MatrixXd> llt(
            dense.block(k * mm.patch_dim_, k * mm.patch_dim_, mm.patch_dim_, mm.patch_dim_));
        if (llt.info() != Eigen::Success)
            throw AssemblyError("assemble_mass: patch block is not positive definite");
        mm.block_llt_.push_back(std::move(llt));
    }
    return mm;
}

namespace {

template <class F>
Eigen::VectorXd moments_impl(const BrokenFemSpace& sp, const F& weight_fn, int quad_order) {
    const int q = default_quad_order(sp, quad_order);
    const QuadGrid grid = make_quad_grid(sp.knots(), q);
    const int ncells = static_cast<int>(grid.breaks.size()) - 1;
    const BasisTable tab_n = tabulate(sp.univariate(Flavor::n_spline), grid.breaks, grid.rule);
    const BasisTable tab_m = tabulate(sp.univariate(Flavor::m_spline), grid.breaks, grid.rule);
    auto table = [&](Flavor f) -> const BasisTable& { return f == Flavor::n_spline ? tab_n : tab_m; };

    Eigen::VectorXd out = Eigen::VectorXd::Zero(sp.dim());
    const int nq = static_cast<int>(grid.rule.nodes.size());
    for (int k = 0; k < sp.n_patches(); ++k) {
        for (int cx = 0; cx < ncells; ++cx)
            for (int cy = 0; cy < ncells; ++cy)
                for (int gx = 0; gx < nq; ++gx)
                    for (int gy = 0; gy < nq; ++gy) {
                        const Vec2 xh(grid.x[cx][gx], grid.x[cy][gy]);
                        const double wq = grid.w[cx][gx] * grid.w[cy][gy];
                        // weight_fn returns the per-component factor multiplying B-hat
                        const Eigen::Vector2d wvec = weight_fn(k, xh) * wq;
                        for (int c = 0; c < sp.n_components(); ++c) {
                            if (wvec[c] == 0.0) continue;
                            const BasisTable& tx = table(sp.flavor(c, 0));
                            const BasisTable& ty = table(sp.flavor(c, 1));
                            const int lx = sp.univariate(sp.flavor(c, 0)).local_size();
                            const int ly = sp.univariate(sp.flavor(c, 1)).local_size();
                            for (int a = 0; a < lx; ++a)
                                for (int b = 0; b < ly; ++b) {
                                    const double v = tx.values[cx](gx, a) * ty.values[cy](gy, b);
                                    if (v != 0.0)
                                        out[sp.index(k, c, tx.first[cx] + a, ty.first[cy] + b)] += wvec[c] * v;
                                }
                        }
                    }
    }
    return out;
}

} // namespace

Eigen::VectorXd moments(const BrokenFemSpace& sp, const ScalarField& f, int quad_order) {
    if (sp.form_degree() == 1) throw ConfigError("moments: scalar field needs a 0- or 2-form space");
    const bool zero_form = sp.form_degree() == 0;
    const auto& patches = sp.topology().patches;
    return moments_impl(
        sp,
        [&](int k, const Vec2& xh) {
            const double jac = zero_form ? patches[k].metric(xh).jacobian_det : 1.0;
            return Eigen::Vector2d(f(patches[k](xh)) * jac, 0.0);
        },
        quad_order);
}

Eigen::VectorXd moments(const BrokenFemSpace& sp, const VectorField& f, int quad_order) {
    if (sp.form_degree() != 1) throw ConfigError("moments: vector field needs a 1-form space");
    const auto& patches = sp.topology().patches;
    return moments_impl(
        sp,
        [&](int k, const Vec2& xh) {
            const geometry::Mat2 df = patches[k].jacobian(xh);
            const double jac = df.determinant();
            const Eigen::Vector2d pull = df.inverse() * f(patches[k](xh));
            return Eigen::Vector2d(jac * pull);
        },
        quad_order);
}

SparseMatrix assemble_stabilization(const SparseMatrix& projection_b, const MassMatrix& mass) {
    const SparseMatrix jump = linalg::add(1.0, SparseMatrix::identity(projection_b.rows()), -1.0, projection_b);
    return linalg::symmetrize(jump.transpose() * (mass.matrix() * jump));
}

Discretization discretize(std::shared_ptr<const geometry::MultipatchTopology> topo, int p, int cells,
                          int quad_order) {
    if (p < 2) throw ConfigError("discretize: the solver stack requires degree p >= 2");
    Discretization d;
    d.topo = topo;
    d.spaces = derham::build_spaces(topo, p, cells);
    d.ops = derham::build_operators(d.spaces);
    d.m0 = assemble_mass(*d.spaces.v0, quad_order);
    d.m1 = assemble_mass(*d.spaces.v1, quad_order);
    d.m2 = assemble_mass(*d.spaces.v2, quad_order);
    d.p = p;
    d.cells = cells;
    return d;
}

AssembledSystem assemble_poisson_system(const Discretization& d, double alpha, BoundaryCondition bc,
                                        const ScalarField& f, const ScalarField* boundary_phi,
                                        derham::FemField* lifting_out) {
    const SparseMatrix& p0 = d.ops.p0_hom.bspline;
    const SparseMatrix gp = d.ops.grad * p0;
    SparseMatrix a = linalg::symmetrize(gp.transpose() * (d.m1.matrix() * gp));
    if (alpha != 0.0)
        a = linalg::add(1.0, a, alpha, assemble_stabilization(p0, d.m0));

    Eigen::VectorXd rhs_moments = moments(*d.spaces.v0, f);
    if (bc == BoundaryCondition::inhomogeneous) {
        if (boundary_phi == nullptr)
            throw ConfigError("assemble_poisson_system: inhomogeneous bc requires boundary data");
        derham::FemField lift = derham::boundary_lifting(*d.spaces.v0, d.ops, *boundary_phi);
        const Eigen::VectorXd glift = d.ops.grad * (d.ops.p0_inhom.bspline * lift.coeffs);
        rhs_moments -= d.ops.grad.transpose() * (d.m1.matrix() * glift);
        if (lifting_out != nullptr) *lifting_out = std::move(lift);
    } else if (lifting_out != nullptr) {
        *lifting_out = derham::FemField{d.spaces.v0.get(), Eigen::VectorXd::Zero(d.spaces.v0->dim())};
    }

    AssembledSystem sys;
    sys.matrix = std::move(a);
    sys.rhs = p0.transpose() * rhs_moments;
    sys.equation = "poisson";
    sys.params = {{"alpha", alpha}, {"inhomogeneous", bc == BoundaryCondition::inhomogeneous ? 1.0 : 0.0}};
    return sys;
}

AssembledSystem assemble_maxwell_system(const Discretization& d, double omega, double alpha, BoundaryCondition bc,
                                        const VectorField& j, const VectorField* boundary_u,
                                        derham::FemField* lifting_out) {
    const SparseMatrix& p1 = d.ops.p1_hom.bspline;
    const SparseMatrix curl_stiff = d.ops.curl.transpose() * (d.m2.matrix() * d.ops.curl);
    const SparseMatrix core = linalg::add(-omega * omega, d.m1.matrix(), 1.0, curl_stiff);
    SparseMatrix a = linalg::symmetrize(p1.transpose() * (core * p1));
    if (alpha != 0.0)
        a = linalg::add(1.0, a, alpha, assemble_stabilization(p1, d.m1));

    Eigen::VectorXd rhs_moments = moments(*d.spaces.v1, j);
    if (bc == BoundaryCondition::inhomogeneous) {
        if (boundary_u == nullptr)
            throw ConfigError("assemble_maxwell_system: inhomogeneous bc requires boundary data");
        derham::FemField lift = derham::boundary_lifting(*d.spaces.v1, d.ops, *boundary_u);
        const Eigen::VectorXd plift = d.ops.p1_inhom.bspline * lift.coeffs;
        rhs_moments += omega * omega * (d.m1.matrix() * plift) - curl_stiff * plift;
        if (lifting_out != nullptr) *lifting_out = std::move(lift);
    } else if (lifting_out != nullptr) {
        *lifting_out = derham::FemField{d.spaces.v1.get(), Eigen::VectorXd::Zero(d.spaces.v1->dim())};
    }

    AssembledSystem sys;
    sys.matrix = std::move(a);
    sys.rhs = p1.transpose() * rhs_moments;
    sys.equation = "maxwell_harmonic";
    sys.params = {{"omega", omega},
                  {"alpha", alpha},
                  {"inhomogeneous", bc == BoundaryCondition::inhomogeneous ? 1.0 : 0.0}};
    return sys;
}

Eigen::MatrixXd assemble_hodge_laplace_pencil(const Discretization& d, int ell, BoundaryCondition bc, double alpha) {
    if (ell == 0) {
        const SparseMatrix& p0 = d.ops.projection(0, bc);
        const SparseMatrix gp = d.ops.grad * p0;
        SparseMatrix a = linalg::symmetrize(gp.transpose() * (d.m1.matrix() * gp));
        if (alpha != 0.0) a = linalg::add(1.0, a, alpha, assemble_stabilization(p0, d.m0));
        return a.dense();
    }
    if (ell != 1) throw ConfigError("assemble_hodge_laplace_pencil: form degree must be 0 or 1");
    const SparseMatrix& p0 = d.ops.projection(0, bc);
    const SparseMatrix& p1 = d.ops.projection(1, bc);
    const SparseMatrix cp = d.ops.curl * p1;
    SparseMatrix a = linalg::symmetrize(cp.transpose() * (d.m2.matrix() * cp));
    if (alpha != 0.0) a = linalg::add(1.0, a, alpha, assemble_stabilization(p1, d.m1));
    Eigen::MatrixXd pencil = a.dense();
    // grad-div block M1 G P0 (M0)^{-1} (M1 G P0)^T, materialized densely
    const SparseMatrix w = d.m1.matrix() * (d.ops.grad * p0);
    const Eigen::MatrixXd wd = w.dense();
    Eigen::MatrixXd z(wd.cols(), wd.rows());
    for (int i = 0; i < wd.rows(); ++i) z.col(i) = d.m0.apply_inverse(wd.row(i).transpose());
    pencil += wd * z;
    return 0.5 * (pencil + pencil.transpose());
}

std::function<Eigen::VectorXd(const Eigen::VectorXd&)>
hodge_laplace_operator(const Discretization& d, int ell, BoundaryCondition bc, double alpha) {
    if (ell == 0) {
        const SparseMatrix p0 = d.ops.projection(0, bc);
        const SparseMatrix grad = d.ops.grad;
        const SparseMatrix m1 = d.m1.matrix();
        const SparseMatrix s0 = assemble_stabilization(p0, d.m0);
        return [p0, grad, m1, s0, alpha](const Eigen::VectorXd& x) {
            const Eigen::VectorXd gx = grad * (p0 * x);
            return Eigen::VectorXd(p0.transpose() * (grad.transpose() * (m1 * gx)) + alpha * (s0 * x));
        };
    }
    if (ell != 1) throw ConfigError("hodge_laplace_operator: form degree must be 0 or 1");
    const SparseMatrix p0 = d.ops.projection(0, bc);
    const SparseMatrix p1 = d.ops.projection(1, bc);
    const SparseMatrix curl = d.ops.curl;
    const SparseMatrix m2 = d.m2.matrix();
    const SparseMatrix w = d.m1.matrix() * (d.ops.grad * p0);
    const SparseMatrix s1 = assemble_stabilization(p1, d.m1);
    const MassMatrix* m0 = &d.m0;
    return [p0, p1, curl, m2, w, s1, m0, alpha](const Eigen::VectorXd& x) {
        const Eigen::VectorXd cx = curl * (p1 * x);
        Eigen::VectorXd y = p1.transpose() * (curl.transpose() * (m2 * cx));
        y += w * m0->apply_inverse(w.transpose() * x);
        y += alpha * (s1 * x);
        return y;
    };
}

Eigen::MatrixXd assemble_harmonic_mass(const MassMatrix& m1, const Eigen::MatrixXd& harmonic_coeffs) {
    Eigen::MatrixXd out(harmonic_coeffs.rows(), harmonic_coeffs.cols());
    for (int j = 0; j < harmonic_coeffs.cols(); ++j) out.col(j) = m1.matrix() * harmonic_coeffs.col(j);
    return out;
}

void write_coordinate_format(const SparseMatrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("write_coordinate_format: cannot open '" + path + "'");
    char buf[64];
    for (int i = 0; i < m.rows(); ++i) {
        auto cols = m.row_columns(i);
        auto vals = m.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            std::snprintf(buf, sizeof(buf), "%.17g", vals[k]);
            out << i << ' ' << cols[k] << ' ' << buf << '\n';
        }
    }
}

} // namespace feec::assembly
