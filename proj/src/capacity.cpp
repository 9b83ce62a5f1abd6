#include "patchpert/capacity.hpp"
#include "patchpert/errors.hpp"
#include "patchpert/fem.hpp"
#include "patchpert/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace patchpert {

PatchSpec PatchSpec::flat_segment(double eps) {
    PatchSpec p;
    p.host = Host::FlatLine;
    if (eps > 0.0) p.components.push_back({-eps, eps});
    return p;
}

PatchSpec PatchSpec::circle_arc(const Arc& a) {
    PatchSpec p;
    p.host = Host::UnitCircle;
    if (a.length() > 0.0) p.components.push_back(a);
    return p;
}

namespace {

double min_half_length(const PatchSpec& p) {
    double m = 1e300;
    for (const Arc& a : p.components) m = std::min(m, 0.5 * a.length());
    return m;
}

// ---- flat host: tensor meshes on [-R,R] x [0,R] -------------------------

struct FlatSolve {
    Mesh mesh;
    std::vector<int> bottom_patch;   // nodes on y=0 inside a component
    std::vector<int> bottom_rest;    // nodes on y=0 outside the components
    std::vector<int> outer;          // truncation border nodes
    std::vector<int> bottom_comp_of; // component id per bottom-patch node
};

FlatSolve flat_mesh(const PatchSpec& p, double R, double h) {
    const double hmin = min_half_length(p) / 16.0;
    std::vector<double> feats;
    for (const Arc& a : p.components) {
        feats.push_back(a.lo);
        feats.push_back(a.hi);
    }
    FlatSolve fs;
    const auto xs = graded_axis(-R, R, feats, hmin, h, 0.5);
    const auto ys = graded_axis(0.0, R, {0.0}, hmin, h, 0.5);
    fs.mesh = rect_mesh(xs, ys);
    for (std::size_t i = 0; i < fs.mesh.nodes.size(); ++i) {
        const Vec2& q = fs.mesh.nodes[i];
        if (std::abs(q[1]) < 1e-13) {
            int comp = -1;
            for (std::size_t c = 0; c < p.components.size(); ++c)
                if (q[0] >= p.components[c].lo - 1e-12 &&
                    q[0] <= p.components[c].hi + 1e-12)
                    comp = static_cast<int>(c);
            if (comp >= 0) {
                fs.bottom_patch.push_back(static_cast<int>(i));
                fs.bottom_comp_of.push_back(comp);
            } else {
                fs.bottom_rest.push_back(static_cast<int>(i));
            }
        } else if (std::abs(q[0] - R) < 1e-13 || std::abs(q[0] + R) < 1e-13 ||
                   std::abs(q[1] - R) < 1e-13) {
            fs.outer.push_back(static_cast<int>(i));
        }
    }
    return fs;
}

double flat_cap_value(const PatchSpec& p, double R, double h, bool clamp_outer) {
    const FlatSolve fs = flat_mesh(p, R, h);
    MixedProblem prob;
    prob.mass = [](Vec2) { return 1.0; };
    for (int v : fs.bottom_patch) prob.node_constraints.push_back({v, 1.0});
    if (clamp_outer)
        for (int v : fs.outer) prob.node_constraints.push_back({v, 0.0});
    const ScalarField u = solve_mixed(fs.mesh, prob);
    const double hn = h1_norm(u);
    return 2.0 * hn * hn; // even reflection through the symmetry plane
}

double flat_e_value(const PatchSpec& p, double R, double h, bool clamp_outer,
                    const std::vector<int>& kappa) {
    // odd symmetry through the crack plane: solve on the upper half with
    // z = 0 on the uncracked part of the axis and flux kappa through the crack
    FlatSolve fs = flat_mesh(p, R, h);
    // relabel bottom edges carrying the flux per component
    for (auto& e : fs.mesh.boundary_edges) {
        const Vec2& a = fs.mesh.nodes[e.a];
        const Vec2& b = fs.mesh.nodes[e.b];
        if (std::abs(a[1]) > 1e-13 || std::abs(b[1]) > 1e-13) continue;
        const double mid = 0.5 * (a[0] + b[0]);
        for (std::size_t c = 0; c < p.components.size(); ++c)
            if (mid > p.components[c].lo && mid < p.components[c].hi)
                e.label = (kappa[c] > 0) ? EdgeLabel::CrackPlus : EdgeLabel::CrackMinus;
    }
    MixedProblem prob;
    prob.mass = [](Vec2) { return 1.0; };
    for (int v : fs.bottom_rest) prob.node_constraints.push_back({v, 0.0});
    if (clamp_outer)
        for (int v : fs.outer) prob.node_constraints.push_back({v, 0.0});
    // dz/dnu = -kappa on the upper face (nu = -e_y)
    prob.flux.push_back({EdgeLabel::CrackPlus, [](Vec2) { return -1.0; }});
    prob.flux.push_back({EdgeLabel::CrackMinus, [](Vec2) { return 1.0; }});
    const ScalarField z = solve_mixed(fs.mesh, prob);
    const double hn = h1_norm(z);
    return 2.0 * hn * hn;
}

// ---- circle host: disk + log-polar annulus glued at the unit circle ------

struct ArcSetup {
    Mesh glued;
    std::vector<int> rim_patch_nodes;   // merged indices (cap variant)
    std::vector<int> crack_rim_indices; // rim indices inside the open patch
};

bool angle_in_arc(double t, const Arc& a, double tol) {
    double rel = std::fmod(t - a.lo, 2.0 * M_PI);
    if (rel < 0.0) rel += 2.0 * M_PI;
    return rel >= -tol && rel <= a.length() + tol;
}

ArcSetup arc_setup(const PatchSpec& p, double R, double h, bool crack) {
    if (p.components.empty()) throw UnsupportedGeometry("empty patch");
    // grading follows the first component's scale (components assumed similar)
    BoundaryPartition part;
    part.neumann_arcs = {{0.0, 2.0 * M_PI}};
    part.patch = p.components.front();
    part.patch_in_neumann = true;
    part.patch_center = p.components.front().center();
    DomainSpec spec;
    Mesh disk = generate_mesh(spec, part, h);

    const double hmin = std::min(h, min_half_length(p) / 16.0);
    const auto rho = graded_axis(0.0, std::log(R), {0.0}, hmin,
                                 std::min(0.35, 0.7 * h), 0.5);
    Mesh ann = annulus_mesh(1.0, disk.rim_angles, rho);

    ArcSetup s;
    for (std::size_t i = 0; i < disk.rim_angles.size(); ++i) {
        for (const Arc& a : p.components) {
            if (angle_in_arc(disk.rim_angles[i], a, 1e-12)) {
                const bool interior = angle_in_arc(disk.rim_angles[i], a, -1e-9);
                if (interior) s.crack_rim_indices.push_back(static_cast<int>(i));
                s.rim_patch_nodes.push_back(disk.rim_nodes[i]);
                break;
            }
        }
    }
    s.glued = glue_disk_annulus(disk, ann, crack ? s.crack_rim_indices
                                                 : std::vector<int>{});
    return s;
}

double arc_cap_value(const PatchSpec& p, double R, double h, bool clamp_outer) {
    const ArcSetup s = arc_setup(p, R, h, false);
    MixedProblem prob;
    prob.mass = [](Vec2) { return 1.0; };
    for (int v : s.rim_patch_nodes) prob.node_constraints.push_back({v, 1.0});
    if (clamp_outer)
        for (int v : s.glued.outer_nodes) prob.node_constraints.push_back({v, 0.0});
    const ScalarField u = solve_mixed(s.glued, prob);
    const double hn = h1_norm(u);
    return hn * hn;
}

double arc_e_value(const PatchSpec& p, double R, double h, bool clamp_outer,
                   const std::vector<int>& kappa) {
    ArcSetup s = arc_setup(p, R, h, true);
    // per-component sign on the crack faces
    auto comp_of = [&](Vec2 q) {
        const double t = std::atan2(q[1], q[0]);
        for (std::size_t c = 0; c < p.components.size(); ++c)
            if (angle_in_arc(t, p.components[c], 1e-9)) return static_cast<int>(c);
        return 0;
    };
    MixedProblem prob;
    prob.mass = [](Vec2) { return 1.0; };
    if (clamp_outer)
        for (int v : s.glued.outer_nodes) prob.node_constraints.push_back({v, 0.0});
    prob.flux.push_back({EdgeLabel::CrackPlus, [&](Vec2 q) {
                             return static_cast<double>(kappa[comp_of(q)]);
                         }});
    prob.flux.push_back({EdgeLabel::CrackMinus, [&](Vec2 q) {
                             return -static_cast<double>(kappa[comp_of(q)]);
                         }});
    const ScalarField z = solve_mixed(s.glued, prob);
    const double hn = h1_norm(z);
    return hn * hn;
}

double capacity_one(const PatchSpec& p, double R, double h, bool clamp) {
    return p.host == PatchSpec::Host::FlatLine ? flat_cap_value(p, R, h, clamp)
                                               : arc_cap_value(p, R, h, clamp);
}

double neumann_one(const PatchSpec& p, double R, double h, bool clamp,
                   const std::vector<int>& kappa) {
    return p.host == PatchSpec::Host::FlatLine ? flat_e_value(p, R, h, clamp, kappa)
                                               : arc_e_value(p, R, h, clamp, kappa);
}

// exponential truncation-error model exp(-2R)
double radius_extrapolate(double vR, double v2R, double R) {
    const double q = std::exp(-2.0 * R); // error ratio between 2R and R
    return v2R + (v2R - vR) * q / (1.0 - q);
}

} // namespace

CapacityResult cap(const PatchSpec& patch, double truncation_radius, double h) {
    CapacityResult res;
    res.truncation_radius = truncation_radius;
    res.mesh_h = h;
    if (patch.components.empty()) return res;

    const double R1 = truncation_radius, R2 = 2.0 * truncation_radius;
    const double lo1 = capacity_one(patch, R1, h, false);
    const double hi1 = capacity_one(patch, R1, h, true);
    const double lo2 = capacity_one(patch, R2, h, false);
    const double hi2 = capacity_one(patch, R2, h, true);
    res.lower_value = lo2;
    res.upper_value = hi2;
    res.value = 0.5 * (lo2 + hi2);
    if (std::abs(hi2 - lo2) > 0.2 * res.value)
        throw TruncationTooSmall("one-sided capacity values differ by more than 20%");
    res.richardson_estimate =
        radius_extrapolate(0.5 * (lo1 + hi1), res.value, R1);
    return res;
}

NeumannCapacityResult neumann_capacity(const PatchSpec& patch, double truncation_radius,
                                       double h) {
    NeumannCapacityResult res;
    res.truncation_radius = truncation_radius;
    if (patch.components.empty()) return res;
    const int k = static_cast<int>(patch.components.size());
    if (k > 8) throw UnsupportedGeometry("sign-pattern search capped at 8 components");

    const double R1 = truncation_radius, R2 = 2.0 * truncation_radius;
    double best = -1.0;
    std::vector<int> best_kappa;
    for (int pat = 0; pat < (1 << (k - 1)); ++pat) {
        std::vector<int> kappa(k, 1);
        for (int c = 1; c < k; ++c)
            if (pat & (1 << (c - 1))) kappa[c] = -1;
        const double v = neumann_one(patch, R2, h, false, kappa);
        if (v > best) {
            best = v;
            best_kappa = kappa;
        }
    }
    const double free2 = best;
    const double clamp2 = neumann_one(patch, R2, h, true, best_kappa);
    if (std::abs(free2 - clamp2) > 0.2 * std::abs(free2))
        throw TruncationTooSmall("one-sided e(omega) values differ by more than 20%");
    const double free1 = neumann_one(patch, R1, h, false, best_kappa);
    res.value = 0.5 * (free2 + clamp2);
    res.sign_pattern = best_kappa;
    res.richardson_estimate = radius_extrapolate(free1, free2, R1);
    return res;
}

double neumann_energy(const PatchSpec& patch, double truncation_radius, double h,
                      const std::vector<int>& kappa) {
    if (patch.components.empty()) return 0.0;
    return neumann_one(patch, truncation_radius, h, false, kappa);
}

double rho_weight(double x_angle, const PatchSpec& patch) {
    if (patch.host != PatchSpec::Host::UnitCircle)
        throw UnsupportedGeometry("rho_weight implemented on the unit-circle host");
    bool inside = false;
    for (const Arc& a : patch.components)
        if (angle_in_arc(x_angle, a, -1e-12)) inside = true;
    if (!inside) throw UnsupportedGeometry("rho_weight needs x strictly inside the patch");

    // complement of the patch on the circle: gaps between sorted components
    std::vector<Arc> comps = patch.components;
    std::sort(comps.begin(), comps.end(), [](const Arc& a, const Arc& b) {
        return a.lo < b.lo;
    });
    double total = 0.0;
    for (std::size_t c = 0; c < comps.size(); ++c) {
        const double lo = comps[c].hi; // gap start, an endpoint of this component
        const double hi_base =
            (c + 1 < comps.size()) ? comps[c + 1].lo : comps[0].lo; // gap end mod 2pi
        double len = hi_base - lo;
        if (c + 1 == comps.size()) len += 2.0 * M_PI;
        if (len <= 0.0) continue;
        // |x - y|^2 = 4 sin^2((tx - ty)/2) on the unit circle. Each half of
        // the gap is parametrized from its own edge and the kernel's exact
        // 2pi-periodicity absorbs the wrap, so the angle difference near the
        // (outside) singularity is an exact nearby subtraction.
        const double dlo = x_angle - lo, dhi = x_angle - hi_base;
        auto kern = [](double d) {
            const double s = std::sin(0.5 * d);
            return 1.0 / (4.0 * s * s);
        };
        total += adaptive_quad([&](double u) { return kern(dlo - u); }, 0.0,
                               0.5 * len, 1e-8, 30);
        total += adaptive_quad([&](double u) { return kern(dhi + u); }, 0.0,
                               0.5 * len, 1e-8, 30);
    }
    return total;
}

double d_surrogate(const PatchSpec& patch) {
    if (patch.components.empty()) return 0.0;
    if (patch.host != PatchSpec::Host::UnitCircle)
        throw UnsupportedGeometry("d_surrogate implemented on the unit-circle host");
    // the integrand vanishes like the edge distance, so a small pad near the
    // endpoints only discards an O(pad^2) sliver
    double total = 0.0;
    for (const Arc& a : patch.components) {
        const double pad = 5e-3 * 0.5 * a.length();
        total += adaptive_quad(
            [&](double t) { return 1.0 / rho_weight(t, patch); }, a.lo + pad,
            a.hi - pad, 1e-5, 30);
    }
    return total;
}

double dist_integral(const PatchSpec& patch) {
    // geodesic distance to the patch boundary integrates to (len/2)^2 per arc
    double s = 0.0;
    for (const Arc& a : patch.components) {
        const double half = 0.5 * a.length();
        s += half * half;
    }
    return s;
}

double check_cap_sandwich(double chi_energy, double cap_value) {
    return chi_energy / cap_value;
}

} // namespace patchpert
