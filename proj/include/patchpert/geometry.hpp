#pragma once
#include "patchpert/config.hpp"

#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace patchpert {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

enum class DomainKind { UnitDisk, MappedHalfPlane };

// Scalar conductivity field with its ellipticity bounds 0 < alpha <= gamma <= beta.
struct Conductivity {
    std::function<double(Vec2)> value;
    double lower = 1.0;
    double upper = 1.0;

    static Conductivity constant(double g);
    double operator()(Vec2 x) const { return value(x); }
};

struct DomainSpec {
    DomainKind kind = DomainKind::UnitDisk;
    double radius = 1.0;
    double patch_center_angle = 0.0;
    Conductivity gamma = Conductivity::constant(1.0);
};

// Closed angular interval on the circle, stored as [lo, hi] with hi > lo
// (angles unwrapped, hi - lo <= 2*pi).
struct Arc {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    double center() const { return 0.5 * (lo + hi); }
};

// Dirichlet/Neumann decomposition of the circle boundary plus the optional
// patch where the condition type is swapped.
struct BoundaryPartition {
    std::vector<Arc> dirichlet_arcs;
    std::vector<Arc> neumann_arcs;
    std::optional<Arc> patch;
    bool patch_in_neumann = true; // which region hosts the patch
    double patch_center = 0.0;
    double d_min = 0.0;           // required geodesic separation from the interface

    // Interface angles between the Dirichlet and Neumann regions.
    std::vector<double> interface_angles() const;
};

// Default mixed partition on the unit circle: one Dirichlet arc, one Neumann
// arc, patch centered at patch_center inside the host region, d_min = 10% of
// the host arc length.
BoundaryPartition half_circle_partition(double patch_center, bool patch_in_neumann);

// Insert the patch arc of geodesic radius eps around the configured center.
// eps = 0 returns the partition unchanged (empty patch). Throws
// SeparationViolation if the arc comes within d_min of the interface.
BoundaryPartition make_patch(const BoundaryPartition& partition, double eps);

// Intrinsic boundary distance. Supported hosts: unit circle (2D points) and
// unit sphere (3D points). Throws UnsupportedGeometry otherwise.
double geodesic_distance_circle(double theta_p, double theta_q);
double geodesic_distance(const std::vector<double>& p, const std::vector<double>& q);

// Smooth diffeomorphism from the lower half-plane picture onto the tangent
// disk of radius r, with T(0) = 0, grad T(0) = Id, and the coefficient field
// A(y) = |det grad T| gamma(T(y)) (grad T)^{-1} (grad T)^{-T} it induces.
struct FlatteningMap {
    double radius = 1.0;
    Conductivity gamma = Conductivity::constant(1.0);
    std::function<double(Vec2)> source; // f in the physical picture

    Vec2 forward(Vec2 y) const;
    Mat2 jacobian(Vec2 y) const;
    Mat2 a_field(Vec2 y) const;
    double g_field(Vec2 y) const;
    // Scalar conductivity seen through the (conformal) map: a_field = a_scalar * Id.
    double a_scalar(Vec2 y) const;
};

FlatteningMap build_flattening(const DomainSpec& spec);

// Domain spec from a flat key=value config: keys kind (unit_disk |
// mapped_half_plane), radius, patch_center_angle, gamma0.
DomainSpec domain_from_config(const Config& c);

} // namespace patchpert
