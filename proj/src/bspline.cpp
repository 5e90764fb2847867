// SPDX-License-Identifier: Apache-2.0
#include "feec/bspline/bspline.hpp"

#include "feec/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace feec::bspline {

namespace {

GaussRule compute_gauss(int q) {
    GaussRule rule;
    rule.nodes.resize(q);
    rule.weights.resize(q);
    for (int i = 0; i < (q + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Legendre P_q(x) and its derivative by the three-term recurrence
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[q - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[q - 1 - i] = w;
    }
    if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
    return rule;
}

// Cox-de Boor span search: largest i with knots[i] <= x, clamped to valid spans.
int find_span(const std::vector<double>& knots, int degree, int n, double x) {
    if (x >= knots[n]) return n - 1;
    int lo = degree, hi = n;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        (x < knots[mid] ? hi : lo) = mid;
    }
    return lo;
}

// Values of the degree+1 B-splines that are nonzero on the span of x.
void basis_funs(const std::vector<double>& knots, int degree, int span, double x, std::vector<double>& out) {
    out.assign(degree + 1, 0.0);
    std::vector<double> left(degree + 1), right(degree + 1);
    out[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = x - knots[span + 1 - j];
        right[j] = knots[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double tmp = out[r] / (right[r + 1] + left[j - r]);
            out[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        out[j] = saved;
    }
}

} // namespace

const GaussRule& gauss_legendre(int q) {
    if (q < 1) throw ConfigError("gauss_legendre: order must be >= 1");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(q);
    if (it == cache.end()) it = cache.emplace(q, compute_gauss(q)).first;
    return it->second;
}

KnotVector::KnotVector(int degree, std::vector<double> knots) : p_(degree), knots_(std::move(knots)) {
    if (p_ < 1) throw ConfigError("KnotVector: degree must be >= 1");
    n_ = static_cast<int>(knots_.size()) - p_ - 1;
    if (n_ < p_ + 1) throw ConfigError("KnotVector: too few knots");
    for (int i = 0; i <= p_; ++i)
        if (knots_[i] != 0.0 || knots_[n_ + i] != 1.0)
            throw ConfigError("KnotVector: knots must be open on [0,1]");
    for (int i = p_; i < n_; ++i)
        if (knots_[i + 1] <= knots_[i]) throw ConfigError("KnotVector: interior knots must strictly increase");
    for (std::size_t i = 0; i < knots_.size(); ++i)
        if (std::abs(knots_[i] - (1.0 - knots_[knots_.size() - 1 - i])) > 1e-14)
            throw ConfigError("KnotVector: knot sequence must be symmetric");
    breaks_.assign(knots_.begin() + p_, knots_.begin() + n_ + 1);
}

KnotVector KnotVector::uniform(int degree, int cells) {
    if (cells < 1) throw ConfigError("KnotVector: need at least one cell");
    std::vector<double> knots(degree + cells + degree + 1);
    for (int i = 0; i <= degree; ++i) {
        knots[i] = 0.0;
        knots[knots.size() - 1 - i] = 1.0;
    }
    for (int i = 1; i < cells; ++i) knots[degree + i] = static_cast<double>(i) / cells;
    return KnotVector(degree, std::move(knots));
}

UnivariateSplineSpace::UnivariateSplineSpace(KnotVector kv, Flavor flavor) : kv_(std::move(kv)), flavor_(flavor) {
    if (flavor_ == Flavor::m_spline) {
        const auto& xi = kv_.knots();
        const int p = kv_.degree();
        reduced_knots_.assign(xi.begin() + 1, xi.end() - 1);
        m_scale_.resize(kv_.n_basis() - 1);
        for (int i = 0; i < kv_.n_basis() - 1; ++i) m_scale_[i] = p / (xi[i + p + 1] - xi[i + 1]);
    }
}

BasisValues UnivariateSplineSpace::eval_basis(double x) const {
    if (x < 0.0 || x > 1.0) throw GeometryError("eval_basis: point outside [0,1]");
    BasisValues out;
    const int p = kv_.degree();
    if (flavor_ == Flavor::n_spline) {
        const int span = find_span(kv_.knots(), p, kv_.n_basis(), x);
        basis_funs(kv_.knots(), p, span, x, out.values);
        out.first = span - p;
    } else {
        const int q = p - 1;
        const int nred = static_cast<int>(reduced_knots_.size()) - q - 1;
        if (q == 0) {
            // piecewise constants: indicator of the knot span, scaled to unit integral
            int span = find_span(reduced_knots_, 0, nred, x);
            out.first = span;
            out.values = {m_scale_[span]};
        } else {
            const int span = find_span(reduced_knots_, q, nred, x);
            basis_funs(reduced_knots_, q, span, x, out.values);
            out.first = span - q;
            for (std::size_t k = 0; k < out.values.size(); ++k)
                out.values[k] *= m_scale_[out.first + static_cast<int>(k)];
        }
    }
    return out;
}

double UnivariateSplineSpace::eval_one(int i, double x) const {
    const BasisValues bv = eval_basis(x);
    const int k = i - bv.first;
    if (k < 0 || k >= static_cast<int>(bv.values.size())) return 0.0;
    return bv.values[k];
}

InterpolationGrid greville_points(const KnotVector& kv) {
    const int p = kv.degree();
    const auto& xi = kv.knots();
    InterpolationGrid grid;
    grid.points.resize(kv.n_basis());
    for (int i = 0; i < kv.n_basis(); ++i) {
        double s = 0.0;
        for (int k = 1; k <= p; ++k) s += xi[i + k];
        grid.points[i] = s / p;
    }
    grid.points.front() = 0.0;
    grid.points.back() = 1.0;
    return grid;
}

Eigen::MatrixXd interpolation_matrix(const UnivariateSplineSpace& space, const InterpolationGrid& grid) {
    if (space.flavor() != Flavor::n_spline)
        throw ConfigError("interpolation_matrix: expects the N-spline space");
    const int n = space.dimension();
    if (static_cast<int>(grid.points.size()) != n)
        throw ConfigError("interpolation_matrix: grid size must match the space dimension");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const BasisValues bv = space.eval_basis(grid.points[i]);
        for (std::size_t k = 0; k < bv.values.size(); ++k) m(i, bv.first + static_cast<int>(k)) = bv.values[k];
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
    if (d.minCoeff() / d.maxCoeff() < 1e-14)
        throw ConfigError("interpolation_matrix: grid is not unisolvent (singular collocation)");
    return m;
}

Eigen::MatrixXd histopolation_matrix(const UnivariateSplineSpace& space, const InterpolationGrid& grid) {
    if (space.flavor() != Flavor::m_spline)
        throw ConfigError("histopolation_matrix: expects the M-spline space");
    const int m = space.dimension();
    if (static_cast<int>(grid.points.size()) != m + 1)
        throw ConfigError("histopolation_matrix: grid/space size mismatch");
    const auto& breaks = space.knot_vector().breakpoints();
    const GaussRule& gr = gauss_legendre(space.knot_vector().degree() + 1);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        // split [zeta_i, zeta_{i+1}] at knot lines so every piece is polynomial
        std::vector<double> pts{grid.points[i]};
        for (double b : breaks)
            if (b > grid.points[i] + 1e-15 && b < grid.points[i + 1] - 1e-15) pts.push_back(b);
        pts.push_back(grid.points[i + 1]);
        for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
            const double mid = 0.5 * (pts[s] + pts[s + 1]);
            const double half = 0.5 * (pts[s + 1] - pts[s]);
            for (std::size_t g = 0; g < gr.nodes.size(); ++g) {
                const BasisValues bv = space.eval_basis(mid + half * gr.nodes[g]);
                for (std::size_t k = 0; k < bv.values.size(); ++k)
                    h(i, bv.first + static_cast<int>(k)) += half * gr.weights[g] * bv.values[k];
            }
        }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(h);
    const Eigen::VectorXd d = lu.matrixLU().diagonal().cwiseAbs();
    if (d.minCoeff() / d.maxCoeff() < 1e-14)
        throw ConfigError("histopolation_matrix: grid is not unisolvent");
    return h;
}

linalg::SparseMatrix univariate_incidence(const KnotVector& kv) {
    const int n = kv.n_basis();
    linalg::CooBuilder coo(n - 1, n);
    for (int i = 0; i < n - 1; ++i) {
        coo.add(i, i, -1.0);
        coo.add(i, i + 1, 1.0);
    }
    return coo.compress();
}

} // namespace feec::bspline
