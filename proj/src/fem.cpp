#include "patchpert/fem.hpp"
#include "patchpert/errors.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace patchpert {

namespace {

struct TriGeom {
    double area;
    Vec2 centroid;
    double bx[3], by[3]; // P1 basis gradients
};

TriGeom tri_geom(const Mesh& m, const std::array<int, 3>& t) {
    const Vec2 &a = m.nodes[t[0]], &b = m.nodes[t[1]], &c = m.nodes[t[2]];
    TriGeom g;
    const double det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
    g.area = 0.5 * det;
    g.centroid = {(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0};
    g.bx[0] = (b[1] - c[1]) / det;
    g.by[0] = (c[0] - b[0]) / det;
    g.bx[1] = (c[1] - a[1]) / det;
    g.by[1] = (a[0] - c[0]) / det;
    g.bx[2] = (a[1] - b[1]) / det;
    g.by[2] = (b[0] - a[0]) / det;
    return g;
}

// Assemble the full (unconstrained) operator and load.
void assemble(const Mesh& mesh, const MixedProblem& p,
              Eigen::SparseMatrix<double>& A, Eigen::VectorXd& b) {
    const int n = static_cast<int>(mesh.nodes.size());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(mesh.triangles.size() * 9);
    b.setZero(n);
    for (const auto& t : mesh.triangles) {
        const TriGeom g = tri_geom(mesh, t);
        const double c = p.coeff ? p.coeff(g.centroid) : 1.0;
        const double mm = p.mass ? p.mass(g.centroid) : 0.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double v = c * g.area * (g.bx[i] * g.bx[j] + g.by[i] * g.by[j]);
                if (mm != 0.0) v += mm * g.area / 12.0 * (i == j ? 2.0 : 1.0);
                trips.emplace_back(t[i], t[j], v);
            }
            if (p.source) b(t[i]) += g.area / 3.0 * p.source(mesh.nodes[t[i]]);
        }
    }
    for (const auto& fb : p.flux) {
        for (const auto& e : mesh.boundary_edges) {
            if (e.label != fb.label) continue;
            const Vec2 &pa = mesh.nodes[e.a], &pb = mesh.nodes[e.b];
            const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
            const double ga = fb.g ? fb.g(pa) : 0.0;
            const double gb = fb.g ? fb.g(pb) : 0.0;
            b(e.a) += len / 6.0 * (2.0 * ga + gb);
            b(e.b) += len / 6.0 * (ga + 2.0 * gb);
        }
    }
    A.resize(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
}

void collect_constraints(const Mesh& mesh, const MixedProblem& p,
                         std::vector<char>& mask, Eigen::VectorXd& vals) {
    const int n = static_cast<int>(mesh.nodes.size());
    mask.assign(n, 0);
    vals.setZero(n);
    for (const auto& eb : p.essential) {
        for (const auto& e : mesh.boundary_edges) {
            if (e.label != eb.label) continue;
            for (int v : {e.a, e.b}) {
                mask[v] = 1;
                vals(v) = eb.trace ? eb.trace(mesh.nodes[v]) : 0.0;
            }
        }
    }
    for (const auto& [idx, val] : p.node_constraints) {
        mask[idx] = 1;
        vals(idx) = val;
    }
}

} // namespace

ScalarField solve_mixed(const Mesh& mesh, const MixedProblem& p) {
    const int n = static_cast<int>(mesh.nodes.size());
    std::vector<char> mask;
    Eigen::VectorXd cvals;
    collect_constraints(mesh, p, mask, cvals);
    const int nc = static_cast<int>(std::count(mask.begin(), mask.end(), 1));
    if (nc == 0 && !p.mass)
        throw SingularSystem("no essential data and no reaction term");

    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    assemble(mesh, p, A, b);

    // reduced system on the free nodes (elimination keeps symmetry)
    std::vector<int> free_id(n, -1);
    int nf = 0;
    for (int i = 0; i < n; ++i)
        if (!mask[i]) free_id[i] = nf++;
    Eigen::VectorXd rb(nf);
    for (int i = 0; i < n; ++i)
        if (!mask[i]) rb(free_id[i]) = b(i);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(A.nonZeros());
    for (int k = 0; k < A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
            const int i = static_cast<int>(it.row()), j = static_cast<int>(it.col());
            if (mask[i]) continue;
            if (mask[j])
                rb(free_id[i]) -= it.value() * cvals(j);
            else
                trips.emplace_back(free_id[i], free_id[j], it.value());
        }
    Eigen::SparseMatrix<double> Ar(nf, nf);
    Ar.setFromTriplets(trips.begin(), trips.end());

    Eigen::VectorXd x(nf);
    if (nf > 0) {
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Ar);
        if (solver.info() != Eigen::Success)
            throw SolverFailure("sparse factorization failed");
        x = solver.solve(rb);
        const double resid = (Ar * x - rb).norm();
        const double scale = std::max(rb.norm(), x.norm());
        if (scale > 0.0 && resid > 1e-10 * scale)
            throw SolverFailure("linear solve residual above tolerance");
    }

    ScalarField u;
    u.mesh = &mesh;
    u.values.resize(n);
    u.essential_mask = mask;
    for (int i = 0; i < n; ++i) u.values(i) = mask[i] ? cvals(i) : x(free_id[i]);
    return u;
}

double ScalarField::at(Vec2 p) const {
    const Mesh& m = *mesh;
    double best = -1e300, best_val = 0.0;
    for (const auto& t : m.triangles) {
        const Vec2 &a = m.nodes[t[0]], &b = m.nodes[t[1]], &c = m.nodes[t[2]];
        const double lo_x = std::min({a[0], b[0], c[0]}), hi_x = std::max({a[0], b[0], c[0]});
        if (p[0] < lo_x - 1e-9 || p[0] > hi_x + 1e-9) continue;
        const double lo_y = std::min({a[1], b[1], c[1]}), hi_y = std::max({a[1], b[1], c[1]});
        if (p[1] < lo_y - 1e-9 || p[1] > hi_y + 1e-9) continue;
        const double det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
        const double l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (p[1] - a[1]) * (c[0] - a[0])) / det;
        const double l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])) / det;
        const double l0 = 1.0 - l1 - l2;
        const double worst = std::min({l0, l1, l2});
        if (worst > best) {
            best = worst;
            best_val = l0 * values(t[0]) + l1 * values(t[1]) + l2 * values(t[2]);
        }
        if (worst >= 0.0) return best_val;
    }
    if (best < -1e-6)
        throw UnsupportedGeometry("evaluation point outside the mesh (" +
                                  std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                                  "), best coordinate " + std::to_string(best));
    return best_val;
}

ScalarField solve_chi_eps(const Mesh& mesh, const BoundaryPartition& partition) {
    if (!partition.patch_in_neumann)
        throw UnsupportedGeometry("chi needs the patch hosted in the Neumann region");
    MixedProblem p;
    p.essential.push_back({EdgeLabel::Dirichlet, {}});
    p.essential.push_back({EdgeLabel::Patch, [](Vec2) { return 1.0; }});
    return solve_mixed(mesh, p);
}

ScalarField solve_zeta_eps(const Mesh& mesh, const BoundaryPartition& partition) {
    if (partition.patch_in_neumann)
        throw UnsupportedGeometry("zeta needs the patch hosted in the Dirichlet region");
    MixedProblem p;
    p.essential.push_back({EdgeLabel::Dirichlet, {}});
    p.flux.push_back({EdgeLabel::Patch, [](Vec2) { return 1.0; }});
    return solve_mixed(mesh, p);
}

BoundaryFlux normal_flux(const Mesh& mesh, const MixedProblem& p,
                         const ScalarField& u, EdgeLabel label) {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    assemble(mesh, p, A, b);
    const Eigen::VectorXd r = A * u.values - b;

    // recover the flux on the whole boundary (the residual at a part endpoint
    // mixes both adjacent edges), then restrict to the requested part
    std::map<int, int> local;
    std::vector<int> bnodes;
    for (const auto& e : mesh.boundary_edges)
        for (int v : {e.a, e.b})
            if (!local.count(v)) {
                local[v] = static_cast<int>(bnodes.size());
                bnodes.push_back(v);
            }
    const int nb = static_cast<int>(bnodes.size());
    BoundaryFlux f;
    if (nb == 0) return f;

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rl(nb);
    for (int i = 0; i < nb; ++i) rl(i) = r(bnodes[i]);
    for (const auto& e : mesh.boundary_edges) {
        const Vec2 &pa = mesh.nodes[e.a], &pb = mesh.nodes[e.b];
        const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
        const int ia = local[e.a], ib = local[e.b];
        trips.emplace_back(ia, ia, len / 3.0);
        trips.emplace_back(ib, ib, len / 3.0);
        trips.emplace_back(ia, ib, len / 6.0);
        trips.emplace_back(ib, ia, len / 6.0);
    }
    Eigen::SparseMatrix<double> M(nb, nb);
    M.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(M);
    if (solver.info() != Eigen::Success) throw SolverFailure("boundary mass factorization");
    const Eigen::VectorXd lambda = solver.solve(rl);

    std::set<int> keep;
    for (const auto& e : mesh.boundary_edges)
        if (e.label == label) {
            keep.insert(e.a);
            keep.insert(e.b);
        }
    for (int v : bnodes)
        if (keep.count(v)) f.nodes.push_back(v);
    f.values.resize(f.nodes.size());
    for (std::size_t i = 0; i < f.nodes.size(); ++i)
        f.values(i) = lambda(local[f.nodes[i]]);
    return f;
}

double flux_at_point(const BoundaryFlux& f, const Mesh& mesh, Vec2 p) {
    double best = 1e300, val = 0.0;
    for (std::size_t i = 0; i < f.nodes.size(); ++i) {
        const Vec2& q = mesh.nodes[f.nodes[i]];
        const double d = std::hypot(p[0] - q[0], p[1] - q[1]);
        if (d < best) {
            best = d;
            val = f.values(i);
        }
    }
    return val;
}

double integrate_flux(const BoundaryFlux& f, const Mesh& mesh, EdgeLabel label) {
    std::map<int, int> local;
    for (std::size_t i = 0; i < f.nodes.size(); ++i) local[f.nodes[i]] = static_cast<int>(i);
    double s = 0.0;
    for (const auto& e : mesh.boundary_edges) {
        if (e.label != label) continue;
        const Vec2 &pa = mesh.nodes[e.a], &pb = mesh.nodes[e.b];
        const double len = std::hypot(pb[0] - pa[0], pb[1] - pa[1]);
        s += 0.5 * len * (f.values(local.at(e.a)) + f.values(local.at(e.b)));
    }
    return s;
}

double compliance(const ScalarField& u, const std::function<double(Vec2)>& source) {
    if (!source) return 0.0;
    const Mesh& m = *u.mesh;
    double s = 0.0;
    for (const auto& t : m.triangles) {
        const TriGeom g = tri_geom(m, t);
        for (int i = 0; i < 3; ++i)
            s += g.area / 3.0 * source(m.nodes[t[i]]) * u.values(t[i]);
    }
    return s;
}

double l2_norm(const ScalarField& u) {
    const Mesh& m = *u.mesh;
    double s = 0.0;
    for (const auto& t : m.triangles) {
        const TriGeom g = tri_geom(m, t);
        const double a = u.values(t[0]), b = u.values(t[1]), c = u.values(t[2]);
        s += g.area / 6.0 * (a * a + b * b + c * c + a * b + b * c + a * c);
    }
    return std::sqrt(s);
}

double h1_seminorm(const ScalarField& u) {
    const Mesh& m = *u.mesh;
    double s = 0.0;
    for (const auto& t : m.triangles) {
        const TriGeom g = tri_geom(m, t);
        double gx = 0.0, gy = 0.0;
        for (int i = 0; i < 3; ++i) {
            gx += u.values(t[i]) * g.bx[i];
            gy += u.values(t[i]) * g.by[i];
        }
        s += g.area * (gx * gx + gy * gy);
    }
    return std::sqrt(s);
}

double h1_norm(const ScalarField& u) {
    const double l2 = l2_norm(u), h1 = h1_seminorm(u);
    return std::sqrt(l2 * l2 + h1 * h1);
}

} // namespace patchpert
