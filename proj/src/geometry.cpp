// SPDX-License-Identifier: Apache-2.0
#include "feec/geometry/geometry.hpp"

#include "feec/core.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace feec::geometry {

namespace {

constexpr double kPi = std::numbers::pi;

Vec2 sin_deformation(const Vec2& x, double a) {
    const double s = a * std::sin(2 * kPi * x[0]) * std::sin(2 * kPi * x[1]);
    return {x[0] + s, x[1] + s};
}

Mat2 sin_deformation_jacobian(const Vec2& x, double a) {
    const double u = 2 * kPi * a * std::cos(2 * kPi * x[0]) * std::sin(2 * kPi * x[1]);
    const double v = 2 * kPi * a * std::sin(2 * kPi * x[0]) * std::cos(2 * kPi * x[1]);
    Mat2 d;
    d << 1.0 + u, v, u, 1.0 + v;
    return d;
}

} // namespace

PatchMapping PatchMapping::identity() { return affine(Mat2::Identity(), Vec2::Zero()); }

PatchMapping PatchMapping::affine(const Mat2& a, const Vec2& b, double deform_amplitude) {
    PatchMapping m;
    m.kind_ = Kind::affine;
    m.a_ = a;
    m.b_ = b;
    m.deform_ = deform_amplitude;
    m.validate();
    return m;
}

PatchMapping PatchMapping::polar_annulus(double r_min, double r_max, double theta_min, double theta_max,
                                         const Vec2& center) {
    if (r_min <= 0.0 || r_max <= r_min) throw GeometryError("polar_annulus: need 0 < r_min < r_max");
    if (theta_max <= theta_min) throw GeometryError("polar_annulus: need theta_min < theta_max");
    PatchMapping m;
    m.kind_ = Kind::polar;
    m.r_min_ = r_min;
    m.r_max_ = r_max;
    m.t_min_ = theta_min;
    m.t_max_ = theta_max;
    m.center_ = center;
    m.validate();
    return m;
}

Vec2 PatchMapping::operator()(const Vec2& xhat) const {
    if (kind_ == Kind::affine) {
        Vec2 y = a_ * xhat + b_;
        return deform_ != 0.0 ? sin_deformation(y, deform_) : y;
    }
    const double r = r_min_ + xhat[0] * (r_max_ - r_min_);
    const double t = t_min_ + xhat[1] * (t_max_ - t_min_);
    return center_ + r * Vec2(std::cos(t), std::sin(t));
}

Mat2 PatchMapping::jacobian(const Vec2& xhat) const {
    if (kind_ == Kind::affine) {
        if (deform_ == 0.0) return a_;
        return sin_deformation_jacobian(a_ * xhat + b_, deform_) * a_;
    }
    const double dr = r_max_ - r_min_;
    const double dt = t_max_ - t_min_;
    const double r = r_min_ + xhat[0] * dr;
    const double t = t_min_ + xhat[1] * dt;
    Mat2 d;
    d << dr * std::cos(t), -r * dt * std::sin(t), dr * std::sin(t), r * dt * std::cos(t);
    return d;
}

MetricTerms PatchMapping::metric(const Vec2& xhat) const {
    const Mat2 df = jacobian(xhat);
    const double det = df.determinant();
    if (!(det > 0.0)) throw GeometryError("metric: non-invertible Jacobian (det <= 0)");
    const Mat2 g = df.transpose() * df;
    return {det, g.inverse()};
}

void PatchMapping::validate() const {
    // positivity of the Jacobian determinant on a sample grid, and a finite
    // difference cross-check of the analytic Jacobian
    const double h = 1e-6;
    for (int i = 0; i <= 8; ++i) {
        for (int j = 0; j <= 8; ++j) {
            const Vec2 x(i / 8.0, j / 8.0);
            const Mat2 df = jacobian(x);
            if (!(df.determinant() > 0.0)) throw GeometryError("PatchMapping: det DF <= 0 at a sample point");
            const Vec2 xa(std::clamp(x[0], h, 1 - h), std::clamp(x[1], h, 1 - h));
            Mat2 fd;
            fd.col(0) = ((*this)(xa + Vec2(h, 0)) - (*this)(xa - Vec2(h, 0))) / (2 * h);
            fd.col(1) = ((*this)(xa + Vec2(0, h)) - (*this)(xa - Vec2(0, h))) / (2 * h);
            if ((fd - jacobian(xa)).cwiseAbs().maxCoeff() > 1e-6 * (1.0 + jacobian(xa).cwiseAbs().maxCoeff()))
                throw GeometryError("PatchMapping: analytic Jacobian disagrees with finite differences");
        }
    }
}

std::string PatchMapping::describe() const {
    std::ostringstream os;
    if (kind_ == Kind::affine) {
        os << "affine a=[" << a_(0, 0) << "," << a_(0, 1) << ";" << a_(1, 0) << "," << a_(1, 1) << "] b=[" << b_[0]
           << "," << b_[1] << "]";
        if (deform_ != 0.0) os << " deform=" << deform_;
    } else {
        os << "polar r=[" << r_min_ << "," << r_max_ << "] theta=[" << t_min_ << "," << t_max_ << "] center=["
           << center_[0] << "," << center_[1] << "]";
    }
    return os.str();
}

Vec2 edge_point(Edge e, double s) {
    switch (e) {
        case Edge::south: return {s, 0.0};
        case Edge::east: return {1.0, s};
        case Edge::north: return {s, 1.0};
        case Edge::west: return {0.0, s};
    }
    throw GeometryError("edge_point: invalid edge");
}

int edge_direction(Edge e) { return (e == Edge::south || e == Edge::north) ? 0 : 1; }

namespace {

const std::array<Vec2, 4> kCorners = {Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};

struct EdgeSamples {
    std::vector<Vec2> pts;
};

EdgeSamples sample_edge(const PatchMapping& f, Edge e, int n) {
    EdgeSamples s;
    s.pts.reserve(n);
    for (int i = 0; i < n; ++i) s.pts.push_back(f(edge_point(e, static_cast<double>(i) / (n - 1))));
    return s;
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

} // namespace

MultipatchTopology detect_topology(std::vector<PatchMapping> patches, double tol) {
    constexpr int kSamples = 17;
    MultipatchTopology topo;
    topo.patches = std::move(patches);
    const int kp = topo.n_patches();

    std::vector<std::vector<EdgeSamples>> samples(kp);
    for (int k = 0; k < kp; ++k)
        for (int e = 0; e < 4; ++e) samples[k].push_back(sample_edge(topo.patches[k], static_cast<Edge>(e), kSamples));

    std::vector<std::vector<bool>> matched(kp, std::vector<bool>(4, false));
    for (int k = 0; k < kp; ++k) {
        for (int ek = 0; ek < 4; ++ek) {
            for (int l = k; l < kp; ++l) {
                for (int el = (l == k ? ek + 1 : 0); el < 4; ++el) {
                    const auto& sa = samples[k][ek].pts;
                    const auto& sb = samples[l][el].pts;
                    double d_id = 0.0, d_rev = 0.0;
                    for (int i = 0; i < kSamples; ++i) {
                        d_id = std::max(d_id, (sa[i] - sb[i]).norm());
                        d_rev = std::max(d_rev, (sa[i] - sb[kSamples - 1 - i]).norm());
                    }
                    const bool hit = std::min(d_id, d_rev) <= tol;
                    if (!hit) {
                        // partial geometric overlap without a conforming parametrization
                        int close = 0;
                        for (int i = 1; i + 1 < kSamples; ++i) {
                            double dmin = 1e300;
                            for (int j = 0; j < kSamples; ++j) dmin = std::min(dmin, (sa[i] - sb[j]).norm());
                            if (dmin <= tol) ++close;
                        }
                        if (close > 0)
                            throw ConformityError("detect_topology: edges of patches " + std::to_string(k) + " and " +
                                                  std::to_string(l) + " overlap but are not conforming");
                        continue;
                    }
                    if (matched[k][ek] || matched[l][el])
                        throw ConformityError("detect_topology: an edge appears in more than one interface");
                    matched[k][ek] = matched[l][el] = true;
                    InterfaceRecord rec;
                    rec.a = {k, static_cast<Edge>(ek)};
                    rec.b = {l, static_cast<Edge>(el)};
                    rec.reversed = d_rev < d_id;
                    // relative orientation from the mapped tangents at the midpoint
                    const double sm = 0.5;
                    const Vec2 ta = topo.patches[k].jacobian(edge_point(rec.a.edge, sm))
                                        .col(edge_direction(rec.a.edge));
                    const double sl = rec.reversed ? 1.0 - sm : sm;
                    const Vec2 tb = topo.patches[l].jacobian(edge_point(rec.b.edge, sl))
                                        .col(edge_direction(rec.b.edge));
                    const double dot = ta.dot(tb);
                    rec.sign = dot >= 0.0 ? 1 : -1;
                    const int expected = rec.reversed ? -1 : 1;
                    if (rec.sign != expected || std::abs(std::abs(dot) - ta.norm() * tb.norm()) >
                                                    1e-8 * ta.norm() * tb.norm())
                        throw ConformityError("detect_topology: inconsistent interface orientation");
                    topo.interfaces.push_back(rec);
                }
            }
        }
    }
    for (int k = 0; k < kp; ++k)
        for (int e = 0; e < 4; ++e)
            if (!matched[k][e]) topo.boundary_edges.push_back({k, static_cast<Edge>(e)});

    if (4 * kp != 2 * static_cast<int>(topo.interfaces.size()) + static_cast<int>(topo.boundary_edges.size()))
        throw ConformityError("detect_topology: edge bookkeeping is inconsistent");

    // vertex classes by physical coincidence of the mapped corners
    UnionFind uf(4 * kp);
    std::vector<Vec2> corners(4 * kp);
    for (int k = 0; k < kp; ++k)
        for (int c = 0; c < 4; ++c) corners[4 * k + c] = topo.patches[k](kCorners[c]);
    for (int i = 0; i < 4 * kp; ++i)
        for (int j = i + 1; j < 4 * kp; ++j)
            if ((corners[i] - corners[j]).norm() <= tol) uf.unite(i, j);
    std::map<int, std::vector<std::pair<int, int>>> classes;
    for (int i = 0; i < 4 * kp; ++i) classes[uf.find(i)].push_back({i / 4, i % 4});
    for (auto& [root, members] : classes)
        if (members.size() > 1) topo.vertex_classes.push_back(std::move(members));
    return topo;
}

namespace {

MultipatchTopology square_grid(int nx, int ny, double lx, double ly, double deform) {
    std::vector<PatchMapping> patches;
    Mat2 a = Mat2::Zero();
    a(0, 0) = lx / nx;
    a(1, 1) = ly / ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) patches.push_back(PatchMapping::affine(a, Vec2(i * lx / nx, j * ly / ny), deform));
    return detect_topology(std::move(patches));
}

MultipatchTopology annulus4(double r0, double r1) {
    std::vector<PatchMapping> patches;
    for (int k = 0; k < 4; ++k)
        patches.push_back(PatchMapping::polar_annulus(r0, r1, k * kPi / 2, (k + 1) * kPi / 2));
    return detect_topology(std::move(patches));
}

MultipatchTopology rotated_two_patch() {
    // same domain as two_patch_square but the second patch is rotated, so the
    // shared edge is traversed in opposite directions from the two sides
    std::vector<PatchMapping> patches;
    patches.push_back(PatchMapping::identity());
    Mat2 a;
    a << 0, 1, -1, 0;
    patches.push_back(PatchMapping::affine(a, Vec2(1, 1)));
    return detect_topology(std::move(patches));
}

} // namespace

MultipatchTopology built_in_domain(const std::string& name) {
    if (name == "unit_square") return square_grid(1, 1, 1.0, 1.0, 0.0);
    if (name == "two_patch_square") return square_grid(2, 1, 1.0, 1.0, 0.0);
    if (name == "four_patch_square") return square_grid(2, 2, 1.0, 1.0, 0.0);
    if (name == "pi_square") return square_grid(1, 1, kPi, kPi, 0.0);
    if (name == "two_patch_pi_square") return square_grid(2, 1, kPi, kPi, 0.0);
    if (name == "pi_square_2x2") return square_grid(2, 2, kPi, kPi, 0.0);
    if (name == "annulus") return annulus4(1.0, 2.0);
    if (name == "deformed_square") return square_grid(1, 1, 1.0, 1.0, 0.05);
    if (name == "deformed_square_2x2") return square_grid(2, 2, 1.0, 1.0, 0.05);
    if (name == "two_patch_square_rotated") return rotated_two_patch();
    throw ConfigError("built_in_domain: unknown domain '" + name + "'");
}

std::vector<std::string> built_in_domain_names() {
    return {"unit_square",     "two_patch_square",    "four_patch_square",
            "pi_square",       "two_patch_pi_square", "pi_square_2x2",
            "annulus",         "deformed_square",     "deformed_square_2x2",
            "two_patch_square_rotated"};
}

MultipatchTopology read_domain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("read_domain_file: cannot open '" + path + "'");
    std::vector<PatchMapping> patches;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word != "patch") throw ConfigError("domain file line " + std::to_string(lineno) + ": expected 'patch'");
        std::string kind;
        ls >> kind;
        std::map<std::string, double> kv;
        std::string item;
        while (ls >> item) {
            const auto eq = item.find('=');
            if (eq == std::string::npos)
                throw ConfigError("domain file line " + std::to_string(lineno) + ": expected key=value");
            kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
        }
        auto get = [&](const std::string& key, double dflt, bool required = false) {
            auto it = kv.find(key);
            if (it == kv.end()) {
                if (required)
                    throw ConfigError("domain file line " + std::to_string(lineno) + ": missing key '" + key + "'");
                return dflt;
            }
            return it->second;
        };
        if (kind == "identity") {
            patches.push_back(PatchMapping::identity());
        } else if (kind == "affine") {
            Mat2 a;
            a << get("a11", 1), get("a12", 0), get("a21", 0), get("a22", 1);
            patches.push_back(PatchMapping::affine(a, Vec2(get("bx", 0), get("by", 0)), get("deform", 0)));
        } else if (kind == "polar") {
            patches.push_back(PatchMapping::polar_annulus(get("rmin", 0, true), get("rmax", 0, true),
                                                          get("tmin", 0, true), get("tmax", 0, true),
                                                          Vec2(get("cx", 0), get("cy", 0))));
        } else {
            throw ConfigError("domain file line " + std::to_string(lineno) + ": unknown patch kind '" + kind + "'");
        }
    }
    if (patches.empty()) throw ConfigError("read_domain_file: no patches in '" + path + "'");
    return detect_topology(std::move(patches));
}

} // namespace feec::geometry
