// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace feec::geometry {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

struct MetricTerms {
    double jacobian_det;  ///< J_F = det DF > 0
    Mat2 metric_inverse;  ///< (DF^T DF)^{-1}, symmetric positive definite
};

/// Analytic map from the reference square [0,1]^2 to one physical patch.
///
/// Two families cover the built-in domains: affine maps optionally composed
/// with a global sinusoidal deformation, and polar annulus sectors. Jacobians
/// are analytic; construction cross-checks them against central differences.
class PatchMapping {
public:
    enum class Kind { affine, polar };

    static PatchMapping identity();
    static PatchMapping affine(const Mat2& a, const Vec2& b, double deform_amplitude = 0.0);
    static PatchMapping polar_annulus(double r_min, double r_max, double theta_min, double theta_max,
                                      const Vec2& center = Vec2::Zero());

    Vec2 operator()(const Vec2& xhat) const;
    Mat2 jacobian(const Vec2& xhat) const;
    MetricTerms metric(const Vec2& xhat) const;

    Kind kind() const { return kind_; }
    std::string describe() const;

private:
    PatchMapping() = default;
    void validate() const;

    Kind kind_ = Kind::affine;
    Mat2 a_ = Mat2::Identity();
    Vec2 b_ = Vec2::Zero();
    double deform_ = 0.0;
    double r_min_ = 0, r_max_ = 0, t_min_ = 0, t_max_ = 0;
    Vec2 center_ = Vec2::Zero();
};

/// Reference-square edges in canonical order with their parametrizations
/// x0 + s*u_d: south=(0,0)+s*u1, east=(1,0)+s*u2, north=(0,1)+s*u1, west=(0,0)+s*u2.
enum class Edge { south = 0, east = 1, north = 2, west = 3 };

Vec2 edge_point(Edge e, double s);
int edge_direction(Edge e); ///< 0 for south/north (u1), 1 for east/west (u2)

struct EdgeRef {
    int patch;
    Edge edge;
    bool operator==(const EdgeRef&) const = default;
};

struct InterfaceRecord {
    EdgeRef a, b;
    bool reversed;  ///< theta(s) = 1-s when true, theta(s) = s otherwise
    int sign;       ///< relative tangent orientation: +1 or -1
};

struct MultipatchTopology {
    std::vector<PatchMapping> patches;
    std::vector<InterfaceRecord> interfaces;
    std::vector<EdgeRef> boundary_edges;
    /// classes of coincident patch corners as (patch, corner) with corners
    /// numbered 0:SW 1:SE 2:NE 3:NW
    std::vector<std::vector<std::pair<int, int>>> vertex_classes;

    int n_patches() const { return static_cast<int>(patches.size()); }
};

/// Pairs up conforming edges by sampling their physical parametrizations.
/// Geometric overlap without a matching affine reparametrization is rejected.
MultipatchTopology detect_topology(std::vector<PatchMapping> patches, double tol = 1e-9);

/// Named domain catalog used by the test cases and the CLI.
MultipatchTopology built_in_domain(const std::string& name);
std::vector<std::string> built_in_domain_names();

/// Domain description file: one "patch <kind> key=value..." line per patch.
MultipatchTopology read_domain_file(const std::string& path);

} // namespace feec::geometry
