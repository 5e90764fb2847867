// SPDX-License-Identifier: Apache-2.0
#include "feec/derham/derham.hpp"

#include "feec/core.hpp"

#include <algorithm>
#include <map>

namespace feec::derham {

using bspline::Flavor;
using geometry::Edge;
using linalg::CooBuilder;
using linalg::SparseMatrix;

BrokenFemSpace::BrokenFemSpace(std::shared_ptr<const geometry::MultipatchTopology> topo, int form_degree, int p,
                               int cells)
    : topo_(std::move(topo)),
      form_degree_(form_degree),
      p_(p),
      cells_(cells),
      n_(cells + p),
      knots_(bspline::KnotVector::uniform(p, cells)),
      basis_n_(knots_, Flavor::n_spline),
      basis_m_(knots_, Flavor::m_spline),
      greville_(bspline::greville_points(knots_)) {
    if (form_degree_ < 0 || form_degree_ > 2) throw ConfigError("BrokenFemSpace: form degree must be 0, 1 or 2");
}

Flavor BrokenFemSpace::flavor(int comp, int dir) const {
    switch (form_degree_) {
        case 0: return Flavor::n_spline;
        case 1: return (comp == 0) == (dir == 0) ? Flavor::m_spline : Flavor::n_spline;
        default: return Flavor::m_spline;
    }
}

int BrokenFemSpace::comp_size(int c, int d) const { return flavor(c, d) == Flavor::n_spline ? n_ : n_ - 1; }

int BrokenFemSpace::patch_dim() const {
    int s = 0;
    for (int c = 0; c < n_components(); ++c) s += comp_dim(c);
    return s;
}

FemSpaces build_spaces(std::shared_ptr<const geometry::MultipatchTopology> topo, int p, int cells) {
    if (p < 1 || cells < 1) throw ConfigError("build_spaces: need p >= 1 and N >= 1");
    FemSpaces s;
    s.v0 = std::make_shared<BrokenFemSpace>(topo, 0, p, cells);
    s.v1 = std::make_shared<BrokenFemSpace>(topo, 1, p, cells);
    s.v2 = std::make_shared<BrokenFemSpace>(topo, 2, p, cells);
    return s;
}

namespace {

double eval_component(const BrokenFemSpace& sp, const Eigen::VectorXd& coeffs, int patch, int comp, const Vec2& xhat) {
    if (coeffs.size() != sp.dim()) throw ConfigError("FemField: coefficient length does not match the space");
    const auto bx = sp.univariate(sp.flavor(comp, 0)).eval_basis(xhat[0]);
    const auto by = sp.univariate(sp.flavor(comp, 1)).eval_basis(xhat[1]);
    double s = 0.0;
    for (std::size_t a = 0; a < bx.values.size(); ++a)
        for (std::size_t b = 0; b < by.values.size(); ++b)
            s += coeffs[sp.index(patch, comp, bx.first + static_cast<int>(a), by.first + static_cast<int>(b))] *
                 bx.values[a] * by.values[b];
    return s;
}

} // namespace

double eval_reference_scalar(const FemField& f, int patch, const Vec2& xhat) {
    return eval_component(*f.space, f.coeffs, patch, 0, xhat);
}

Vec2 eval_reference_vector(const FemField& f, int patch, const Vec2& xhat) {
    return {eval_component(*f.space, f.coeffs, patch, 0, xhat), eval_component(*f.space, f.coeffs, patch, 1, xhat)};
}

double eval_physical_scalar(const FemField& f, int patch, const Vec2& xhat) {
    const double v = eval_reference_scalar(f, patch, xhat);
    if (f.space->form_degree() == 0) return v;
    return v / f.space->topology().patches[patch].metric(xhat).jacobian_det;
}

Vec2 eval_physical_vector(const FemField& f, int patch, const Vec2& xhat) {
    const Vec2 vhat = eval_reference_vector(f, patch, xhat);
    const geometry::Mat2 df = f.space->topology().patches[patch].jacobian(xhat);
    return df.transpose().inverse() * vhat;
}

namespace {

// ---- degree-of-freedom enumeration along reference edges -----------------

// node (i1, i2) at position i = 0..n-1 along the canonical edge parametrization
std::pair<int, int> edge_node(Edge e, int i, int n) {
    switch (e) {
        case Edge::south: return {i, 0};
        case Edge::east: return {n - 1, i};
        case Edge::north: return {i, n - 1};
        case Edge::west: return {0, i};
    }
    throw GeometryError("edge_node: invalid edge");
}

// tangential edge dof (comp, i1, i2) at subedge i = 0..n-2 along an edge
std::tuple<int, int, int> edge_tangential_dof(Edge e, int i, int n) {
    switch (e) {
        case Edge::south: return {0, i, 0};
        case Edge::east: return {1, n - 1, i};
        case Edge::north: return {0, i, n - 1};
        case Edge::west: return {1, 0, i};
    }
    throw GeometryError("edge_tangential_dof: invalid edge");
}

std::array<std::pair<int, int>, 4> corner_nodes(int n) {
    return {{{0, 0}, {n - 1, 0}, {n - 1, n - 1}, {0, n - 1}}};
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

struct DofClass {
    std::vector<std::pair<int, double>> members; // (dof, relative sign)
};

// equivalence classes of broken dofs sharing a geometric element
std::vector<DofClass> build_dof_classes(const BrokenFemSpace& sp) {
    const auto& topo = sp.topology();
    const int n = sp.n_univariate();
    std::vector<DofClass> classes;
    if (sp.form_degree() == 0) {
        UnionFind uf(sp.dim());
        for (const auto& rec : topo.interfaces) {
            for (int i = 0; i < n; ++i) {
                const int j = rec.reversed ? n - 1 - i : i;
                const auto [a1, a2] = edge_node(rec.a.edge, i, n);
                const auto [b1, b2] = edge_node(rec.b.edge, j, n);
                uf.unite(sp.index(rec.a.patch, 0, a1, a2), sp.index(rec.b.patch, 0, b1, b2));
            }
        }
        for (const auto& vc : topo.vertex_classes) {
            const auto corners = corner_nodes(n);
            const auto& [p0, c0] = vc.front();
            const int root = sp.index(p0, 0, corners[c0].first, corners[c0].second);
            for (const auto& [pk, ck] : vc) uf.unite(root, sp.index(pk, 0, corners[ck].first, corners[ck].second));
        }
        std::map<int, std::vector<int>> groups;
        for (int i = 0; i < sp.dim(); ++i) groups[uf.find(i)].push_back(i);
        for (auto& [root, members] : groups) {
            if (members.size() < 2) continue;
            DofClass dc;
            for (int m : members) dc.members.push_back({m, 1.0});
            classes.push_back(std::move(dc));
        }
    } else if (sp.form_degree() == 1) {
        for (const auto& rec : topo.interfaces) {
            for (int i = 0; i < n - 1; ++i) {
                const int j = rec.reversed ? n - 2 - i : i;
                const auto [ca, a1, a2] = edge_tangential_dof(rec.a.edge, i, n);
                const auto [cb, b1, b2] = edge_tangential_dof(rec.b.edge, j, n);
                DofClass dc;
                dc.members.push_back({sp.index(rec.a.patch, ca, a1, a2), 1.0});
                dc.members.push_back({sp.index(rec.b.patch, cb, b1, b2), static_cast<double>(rec.sign)});
                classes.push_back(std::move(dc));
            }
        }
    }
    return classes;
}

SparseMatrix geometric_projection(const BrokenFemSpace& sp, BoundaryCondition bc) {
    const std::vector<DofClass> classes = build_dof_classes(sp);
    std::vector<char> in_class(sp.dim(), 0);
    for (const auto& dc : classes)
        for (const auto& [i, s] : dc.members) in_class[i] = 1;

    std::vector<char> bdry = boundary_dof_mask(sp);
    // an element whose class touches the domain boundary lies on the boundary
    for (const auto& dc : classes) {
        bool any = false;
        for (const auto& [i, s] : dc.members) any = any || bdry[i];
        if (any)
            for (const auto& [i, s] : dc.members) bdry[i] = 1;
    }
    const bool hom = bc == BoundaryCondition::homogeneous;

    CooBuilder coo(sp.dim(), sp.dim());
    for (int i = 0; i < sp.dim(); ++i)
        if (!in_class[i] && !(hom && bdry[i])) coo.add(i, i, 1.0);
    for (const auto& dc : classes) {
        const double w = 1.0 / static_cast<double>(dc.members.size());
        for (const auto& [i, si] : dc.members) {
            if (hom && bdry[i]) continue;
            for (const auto& [j, sj] : dc.members) coo.add(i, j, si * sj * w);
        }
    }
    return coo.compress();
}

} // namespace

std::vector<char> boundary_dof_mask(const BrokenFemSpace& sp) {
    std::vector<char> mask(sp.dim(), 0);
    const int n = sp.n_univariate();
    if (sp.form_degree() == 2) return mask;
    for (const auto& [patch, edge] : sp.topology().boundary_edges) {
        if (sp.form_degree() == 0) {
            for (int i = 0; i < n; ++i) {
                const auto [i1, i2] = edge_node(edge, i, n);
                mask[sp.index(patch, 0, i1, i2)] = 1;
            }
        } else {
            for (int i = 0; i < n - 1; ++i) {
                const auto [c, i1, i2] = edge_tangential_dof(edge, i, n);
                mask[sp.index(patch, c, i1, i2)] = 1;
            }
        }
    }
    return mask;
}

const SparseMatrix& DeRhamOperatorSet::projection(int ell, BoundaryCondition bc) const {
    const bool hom = bc == BoundaryCondition::homogeneous;
    switch (ell) {
        case 0: return hom ? p0_hom.bspline : p0_inhom.bspline;
        case 1: return hom ? p1_hom.bspline : p1_inhom.bspline;
        case 2: return p2;
    }
    throw ConfigError("projection: invalid form degree");
}

SparseMatrix DeRhamOperatorSet::collocation_matrix(const BrokenFemSpace& sp) const {
    CooBuilder coo(sp.dim(), sp.dim());
    for (int k = 0; k < sp.n_patches(); ++k) {
        for (int c = 0; c < sp.n_components(); ++c) {
            const Eigen::MatrixXd& a = sp.flavor(c, 0) == Flavor::n_spline ? interp : histo;
            const Eigen::MatrixXd& b = sp.flavor(c, 1) == Flavor::n_spline ? interp : histo;
            for (int i1 = 0; i1 < a.rows(); ++i1)
                for (int j1 = 0; j1 < a.cols(); ++j1) {
                    if (a(i1, j1) == 0.0) continue;
                    for (int i2 = 0; i2 < b.rows(); ++i2)
                        for (int j2 = 0; j2 < b.cols(); ++j2)
                            if (b(i2, j2) != 0.0)
                                coo.add(sp.index(k, c, i1, i2), sp.index(k, c, j1, j2), a(i1, j1) * b(i2, j2));
                }
        }
    }
    return coo.compress();
}

namespace {

// solve (A kron B) x = y in place for a row-major flattened block
void kron_solve_block(const Eigen::PartialPivLU<Eigen::MatrixXd>& lua,
                      const Eigen::PartialPivLU<Eigen::MatrixXd>& lub, Eigen::Ref<Eigen::VectorXd> block, int m1,
                      int m2) {
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<RowMat> y(block.data(), m1, m2);
    Eigen::MatrixXd x = lua.solve(Eigen::MatrixXd(y));
    x = lub.solve(x.transpose()).transpose();
    y = x;
}

void kron_apply_block(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::Ref<Eigen::VectorXd> block, int m1,
                      int m2) {
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<RowMat> y(block.data(), m1, m2);
    Eigen::MatrixXd x = a * Eigen::MatrixXd(y) * b.transpose();
    y = x;
}

} // namespace

Eigen::VectorXd DeRhamOperatorSet::collocation_solve(const BrokenFemSpace& sp, const Eigen::VectorXd& sigma) const {
    Eigen::VectorXd beta = sigma;
    for (int k = 0; k < sp.n_patches(); ++k)
        for (int c = 0; c < sp.n_components(); ++c) {
            const auto& lua = sp.flavor(c, 0) == Flavor::n_spline ? interp_lu : histo_lu;
            const auto& lub = sp.flavor(c, 1) == Flavor::n_spline ? interp_lu : histo_lu;
            kron_solve_block(lua, lub, beta.segment(sp.index(k, c, 0, 0), sp.comp_dim(c)), sp.comp_size(c, 0),
                             sp.comp_size(c, 1));
        }
    return beta;
}

Eigen::VectorXd DeRhamOperatorSet::collocation_apply(const BrokenFemSpace& sp, const Eigen::VectorXd& beta) const {
    Eigen::VectorXd sigma = beta;
    for (int k = 0; k < sp.n_patches(); ++k)
        for (int c = 0; c < sp.n_components(); ++c) {
            const auto& a = sp.flavor(c, 0) == Flavor::n_spline ? interp : histo;
            const auto& b = sp.flavor(c, 1) == Flavor::n_spline ? interp : histo;
            kron_apply_block(a, b, sigma.segment(sp.index(k, c, 0, 0), sp.comp_dim(c)), sp.comp_size(c, 0),
                             sp.comp_size(c, 1));
        }
    return sigma;
}

namespace {

SparseMatrix assemble_grad(const BrokenFemSpace& v0, const BrokenFemSpace& v1) {
    const int n = v0.n_univariate();
    CooBuilder coo(v1.dim(), v0.dim());
    for (int k = 0; k < v0.n_patches(); ++k) {
        for (int i1 = 0; i1 + 1 < n; ++i1)
            for (int i2 = 0; i2 < n; ++i2) {
                const int r = v1.index(k, 0, i1, i2);
                coo.add(r, v0.index(k, 0, i1, i2), -1.0);
                coo.add(r, v0.index(k, 0, i1 + 1, i2), 1.0);
            }
        for (int i1 = 0; i1 < n; ++i1)
            for (int i2 = 0; i2 + 1 < n; ++i2) {
                const int r = v1.index(k, 1, i1, i2);
                coo.add(r, v0.index(k, 0, i1, i2), -1.0);
                coo.add(r, v0.index(k, 0, i1, i2 + 1), 1.0);
            }
    }
    return coo.compress();
}

SparseMatrix assemble_curl(const BrokenFemSpace& v1, const BrokenFemSpace& v2) {
    const int n = v1.n_univariate();
    CooBuilder coo(v2.dim(), v1.dim());
    for (int k = 0; k < v1.n_patches(); ++k)
        for (int i1 = 0; i1 + 1 < n; ++i1)
            for (int i2 = 0; i2 + 1 < n; ++i2) {
                const int r = v2.index(k, 0, i1, i2);
                // curl u = dx u2 - dy u1
                coo.add(r, v1.index(k, 0, i1, i2), 1.0);
                coo.add(r, v1.index(k, 0, i1, i2 + 1), -1.0);
                coo.add(r, v1.index(k, 1, i1, i2), -1.0);
                coo.add(r, v1.index(k, 1, i1 + 1, i2), 1.0);
            }
    return coo.compress();
}

// P_B = K^{-1} P K, assembled as I + K^{-1}(P - I)K so only interface-coupled
// blocks are populated
SparseMatrix collocation_conjugate(const BrokenFemSpace& sp, const DeRhamOperatorSet& ops, const SparseMatrix& pgeo) {
    const SparseMatrix k_sparse = ops.collocation_matrix(sp);
    const SparseMatrix r = linalg::add(1.0, pgeo, -1.0, SparseMatrix::identity(sp.dim()));
    const SparseMatrix s = r * k_sparse;
    CooBuilder delta(sp.dim(), sp.dim());
    for (int k = 0; k < sp.n_patches(); ++k) {
        for (int c = 0; c < sp.n_components(); ++c) {
            const int base = sp.index(k, c, 0, 0);
            const int m1 = sp.comp_size(c, 0), m2 = sp.comp_size(c, 1);
            const int m = m1 * m2;
            std::map<int, int> colmap;
            for (int row = base; row < base + m; ++row)
                for (int col : s.row_columns(row)) colmap.try_emplace(col, 0);
            if (colmap.empty()) continue;
            int nc = 0;
            for (auto& [col, local] : colmap) local = nc++;
            Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, nc);
            for (int row = base; row < base + m; ++row) {
                auto cols = s.row_columns(row);
                auto vals = s.row_values(row);
                for (std::size_t t = 0; t < cols.size(); ++t) rhs(row - base, colmap.at(cols[t])) = vals[t];
            }
            const auto& lua = sp.flavor(c, 0) == Flavor::n_spline ? ops.interp_lu : ops.histo_lu;
            const auto& lub = sp.flavor(c, 1) == Flavor::n_spline ? ops.interp_lu : ops.histo_lu;
            for (const auto& [col, local] : colmap) {
                Eigen::VectorXd column = rhs.col(local);
                kron_solve_block(lua, lub, column, m1, m2);
                for (int row = 0; row < m; ++row)
                    if (column[row] != 0.0) delta.add(base + row, col, column[row]);
            }
        }
    }
    return linalg::add(1.0, SparseMatrix::identity(sp.dim()), 1.0, delta.compress());
}

} // namespace

DeRhamOperatorSet build_operators(const FemSpaces& spaces) {
    DeRhamOperatorSet ops;
    const BrokenFemSpace& v0 = *spaces.v0;
    const BrokenFemSpace& v1 = *spaces.v1;
    const BrokenFemSpace& v2 = *spaces.v2;

    ops.grad = assemble_grad(v0, v1);
    ops.curl = assemble_curl(v1, v2);

    ops.interp = bspline::interpolation_matrix(v0.univariate(Flavor::n_spline), v0.greville());
    ops.histo = bspline::histopolation_matrix(v0.univariate(Flavor::m_spline), v0.greville());
    ops.interp_lu.compute(ops.interp);
    ops.histo_lu.compute(ops.histo);

    for (auto bc : {BoundaryCondition::homogeneous, BoundaryCondition::inhomogeneous}) {
        SparseMatrix g0 = geometric_projection(v0, bc);
        SparseMatrix g1 = geometric_projection(v1, bc);
        ConformingProjection c0{g0, collocation_conjugate(v0, ops, g0)};
        ConformingProjection c1{g1, collocation_conjugate(v1, ops, g1)};
        if (bc == BoundaryCondition::homogeneous) {
            ops.p0_hom = std::move(c0);
            ops.p1_hom = std::move(c1);
        } else {
            ops.p0_inhom = std::move(c0);
            ops.p1_inhom = std::move(c1);
        }
    }
    ops.p2 = SparseMatrix::identity(v2.dim());
    return ops;
}

namespace {

std::vector<double> split_interval(double a, double b, const std::vector<double>& breaks) {
    std::vector<double> pts{a};
    for (double t : breaks)
        if (t > a + 1e-14 && t < b - 1e-14) pts.push_back(t);
    pts.push_back(b);
    return pts;
}

// exact for splines (>= p+1 points per polynomial piece) with headroom for
// the smooth fields of the commuting-diagram checks
int geo_quad_order(const BrokenFemSpace& sp) { return sp.degree() + 2; }

} // namespace

Eigen::VectorXd geometric_dofs(const BrokenFemSpace& sp, const ScalarField& f) {
    const auto& topo = sp.topology();
    const auto& z = sp.greville().points;
    const int n = sp.n_univariate();
    Eigen::VectorXd sigma(sp.dim());
    if (sp.form_degree() == 0) {
        for (int k = 0; k < sp.n_patches(); ++k)
            for (int i1 = 0; i1 < n; ++i1)
                for (int i2 = 0; i2 < n; ++i2)
                    sigma[sp.index(k, 0, i1, i2)] = f(topo.patches[k](Vec2(z[i1], z[i2])));
        return sigma;
    }
    if (sp.form_degree() != 2) throw ConfigError("geometric_dofs: scalar field needs a 0- or 2-form space");
    const auto& gr = bspline::gauss_legendre(geo_quad_order(sp));
    const auto& breaks = sp.knots().breakpoints();
    for (int k = 0; k < sp.n_patches(); ++k) {
        const auto& map = topo.patches[k];
        for (int i1 = 0; i1 + 1 < n; ++i1) {
            const auto px = split_interval(z[i1], z[i1 + 1], breaks);
            for (int i2 = 0; i2 + 1 < n; ++i2) {
                const auto py = split_interval(z[i2], z[i2 + 1], breaks);
                double acc = 0.0;
                for (std::size_t sx = 0; sx + 1 < px.size(); ++sx)
                    for (std::size_t sy = 0; sy + 1 < py.size(); ++sy) {
                        const double mx = 0.5 * (px[sx] + px[sx + 1]), hx = 0.5 * (px[sx + 1] - px[sx]);
                        const double my = 0.5 * (py[sy] + py[sy + 1]), hy = 0.5 * (py[sy + 1] - py[sy]);
                        for (std::size_t gx = 0; gx < gr.nodes.size(); ++gx)
                            for (std::size_t gy = 0; gy < gr.nodes.size(); ++gy) {
                                const Vec2 xh(mx + hx * gr.nodes[gx], my + hy * gr.nodes[gy]);
                                acc += hx * hy * gr.weights[gx] * gr.weights[gy] * f(map(xh)) *
                                       map.metric(xh).jacobian_det;
                            }
                    }
                sigma[sp.index(k, 0, i1, i2)] = acc;
            }
        }
    }
    return sigma;
}

Eigen::VectorXd geometric_dofs(const BrokenFemSpace& sp, const VectorField& f) {
    if (sp.form_degree() != 1) throw ConfigError("geometric_dofs: vector field needs a 1-form space");
    const auto& topo = sp.topology();
    const auto& z = sp.greville().points;
    const auto& gr = bspline::gauss_legendre(geo_quad_order(sp));
    const auto& breaks = sp.knots().breakpoints();
    Eigen::VectorXd sigma(sp.dim());
    for (int k = 0; k < sp.n_patches(); ++k) {
        const auto& map = topo.patches[k];
        for (int comp = 0; comp < 2; ++comp) {
            for (int i1 = 0; i1 < sp.comp_size(comp, 0); ++i1)
                for (int i2 = 0; i2 < sp.comp_size(comp, 1); ++i2) {
                    const int it = comp == 0 ? i1 : i2;
                    const double fixed = comp == 0 ? z[i2] : z[i1];
                    const auto pts = split_interval(z[it], z[it + 1], breaks);
                    double acc = 0.0;
                    for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
                        const double mid = 0.5 * (pts[s] + pts[s + 1]), half = 0.5 * (pts[s + 1] - pts[s]);
                        for (std::size_t g = 0; g < gr.nodes.size(); ++g) {
                            const double t = mid + half * gr.nodes[g];
                            const Vec2 xh = comp == 0 ? Vec2(t, fixed) : Vec2(fixed, t);
                            const Vec2 tangent = map.jacobian(xh).col(comp);
                            acc += half * gr.weights[g] * f(map(xh)).dot(tangent);
                        }
                    }
                    sigma[sp.index(k, comp, i1, i2)] = acc;
                }
        }
    }
    return sigma;
}

FemField primal_projection(const BrokenFemSpace& sp, const DeRhamOperatorSet& ops, const ScalarField& f) {
    return {&sp, ops.collocation_solve(sp, geometric_dofs(sp, f))};
}

FemField primal_projection(const BrokenFemSpace& sp, const DeRhamOperatorSet& ops, const VectorField& f) {
    return {&sp, ops.collocation_solve(sp, geometric_dofs(sp, f))};
}

Eigen::VectorXd dual_projection_coeffs(const SparseMatrix& projection_b, const Eigen::VectorXd& moments) {
    return projection_b.transpose() * moments;
}

namespace {

FemField lifting_impl(const BrokenFemSpace& sp, const DeRhamOperatorSet& ops, Eigen::VectorXd sigma) {
    const std::vector<char> mask = boundary_dof_mask(sp);
    for (int i = 0; i < sp.dim(); ++i)
        if (!mask[i]) sigma[i] = 0.0;
    return {&sp, ops.collocation_solve(sp, sigma)};
}

} // namespace

FemField boundary_lifting(const BrokenFemSpace& sp, const DeRhamOperatorSet& ops, const ScalarField& f) {
    return lifting_impl(sp, ops, geometric_dofs(sp, f));
}

FemField boundary_lifting(const BrokenFemSpace& sp, const DeRhamOperatorSet& ops, const VectorField& f) {
    return lifting_impl(sp, ops, geometric_dofs(sp, f));
}

} // namespace feec::derham
