#include "patchpert/config.hpp"
#include "patchpert/errors.hpp"
#include "patchpert/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace patchpert {

Conductivity Conductivity::constant(double g) {
    Conductivity c;
    c.value = [g](Vec2) { return g; };
    c.lower = c.upper = g;
    return c;
}

std::vector<double> BoundaryPartition::interface_angles() const {
    std::vector<double> out;
    for (const Arc& a : dirichlet_arcs) {
        out.push_back(a.lo);
        out.push_back(a.hi);
    }
    return out;
}

BoundaryPartition half_circle_partition(double patch_center, bool patch_in_neumann) {
    // Host region centered on the patch so the separation budget is symmetric.
    BoundaryPartition p;
    const double half = M_PI / 2.0;
    if (patch_in_neumann) {
        p.neumann_arcs = {{patch_center - half, patch_center + half}};
        p.dirichlet_arcs = {{patch_center + half, patch_center + 3.0 * half}};
    } else {
        p.dirichlet_arcs = {{patch_center - half, patch_center + half}};
        p.neumann_arcs = {{patch_center + half, patch_center + 3.0 * half}};
    }
    p.patch_in_neumann = patch_in_neumann;
    p.patch_center = patch_center;
    p.d_min = 0.1 * M_PI; // 10% of the host arc length
    return p;
}

BoundaryPartition make_patch(const BoundaryPartition& partition, double eps) {
    if (eps < 0.0) throw SeparationViolation("negative patch radius");
    BoundaryPartition out = partition;
    if (eps == 0.0) {
        out.patch.reset();
        return out;
    }
    const auto& host =
        partition.patch_in_neumann ? partition.neumann_arcs : partition.dirichlet_arcs;
    if (host.empty()) throw SeparationViolation("no host region for the patch");
    const double c = partition.patch_center;
    const Arc patch{c - eps, c + eps};
    // Geodesic radius equals arc length on the unit circle; enforce the
    // separation from the interface set on both endpoints.
    for (double s : partition.interface_angles()) {
        const double d = std::min(geodesic_distance_circle(patch.lo, s),
                                  geodesic_distance_circle(patch.hi, s));
        if (d < partition.d_min)
            throw SeparationViolation("patch arc violates d_min separation");
    }
    out.patch = patch;
    return out;
}

double geodesic_distance_circle(double theta_p, double theta_q) {
    double d = std::fmod(std::abs(theta_p - theta_q), 2.0 * M_PI);
    return std::min(d, 2.0 * M_PI - d);
}

double geodesic_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw UnsupportedGeometry("dimension mismatch");
    if (p.size() == 2) {
        const double rp = std::hypot(p[0], p[1]), rq = std::hypot(q[0], q[1]);
        if (std::abs(rp - 1.0) > 1e-9 || std::abs(rq - 1.0) > 1e-9)
            throw UnsupportedGeometry("2D geodesics implemented on the unit circle only");
        return geodesic_distance_circle(std::atan2(p[1], p[0]), std::atan2(q[1], q[0]));
    }
    if (p.size() == 3) {
        const double rp = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
        const double rq = std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]);
        if (std::abs(rp - 1.0) > 1e-9 || std::abs(rq - 1.0) > 1e-9)
            throw UnsupportedGeometry("3D geodesics implemented on the unit sphere only");
        double dot = (p[0] * q[0] + p[1] * q[1] + p[2] * q[2]) / (rp * rq);
        dot = std::clamp(dot, -1.0, 1.0);
        return std::acos(dot);
    }
    throw UnsupportedGeometry("unsupported dimension");
}

namespace {

// T(z) = z / (1 + i z / (2r)) maps {Im z < 0} onto the disk of radius r
// centered at -ir, with T(0) = 0 and T'(0) = 1.
std::complex<double> mobius(std::complex<double> z, double r) {
    const std::complex<double> i(0.0, 1.0);
    return z / (1.0 + i * z / (2.0 * r));
}

std::complex<double> mobius_deriv(std::complex<double> z, double r) {
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> d = 1.0 + i * z / (2.0 * r);
    return 1.0 / (d * d);
}

} // namespace

Vec2 FlatteningMap::forward(Vec2 y) const {
    const auto w = mobius({y[0], y[1]}, radius);
    return {w.real(), w.imag()};
}

Mat2 FlatteningMap::jacobian(Vec2 y) const {
    // Holomorphic map: grad T = [[a, -b], [b, a]] with T' = a + ib.
    const auto d = mobius_deriv({y[0], y[1]}, radius);
    return {{{d.real(), -d.imag()}, {d.imag(), d.real()}}};
}

Mat2 FlatteningMap::a_field(Vec2 y) const {
    // A = |det J| gamma(T(y)) J^{-1} J^{-T}; for the conformal map this
    // collapses to gamma(T(y)) Id, but the general formula is kept.
    const Mat2 j = jacobian(y);
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    const Mat2 jinv = {{{j[1][1] / det, -j[0][1] / det},
                        {-j[1][0] / det, j[0][0] / det}}};
    const double s = std::abs(det) * gamma(forward(y));
    Mat2 a{};
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            a[r][c] = s * (jinv[r][0] * jinv[c][0] + jinv[r][1] * jinv[c][1]);
    return a;
}

double FlatteningMap::a_scalar(Vec2 y) const {
    // |det grad T| = |T'|^2 and (grad T)^{-1}(grad T)^{-T} = |T'|^{-2} Id,
    // so the conformal map leaves only the transported conductivity.
    return gamma(forward(y));
}

double FlatteningMap::g_field(Vec2 y) const {
    const auto d = mobius_deriv({y[0], y[1]}, radius);
    const double det = std::norm(d);
    return det * (source ? source(forward(y)) : 0.0);
}

FlatteningMap build_flattening(const DomainSpec& spec) {
    FlatteningMap m;
    m.radius = spec.radius;
    m.gamma = spec.gamma;
    return m;
}

DomainSpec domain_from_config(const Config& c) {
    DomainSpec s;
    const std::string kind = c.get("kind", "unit_disk");
    if (kind == "unit_disk")
        s.kind = DomainKind::UnitDisk;
    else if (kind == "mapped_half_plane")
        s.kind = DomainKind::MappedHalfPlane;
    else
        throw ConfigError("unknown domain kind " + kind);
    s.radius = c.get_double("radius", 1.0);
    if (!(s.radius > 0.0)) throw ConfigError("radius must be positive");
    s.patch_center_angle = c.get_double("patch_center_angle", 0.0);
    const double g0 = c.get_double("gamma0", 1.0);
    if (!(g0 > 0.0)) throw ConfigError("gamma0 must be positive");
    s.gamma = Conductivity::constant(g0);
    return s;
}

} // namespace patchpert
