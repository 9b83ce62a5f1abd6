#pragma once
#include "patchpert/geometry.hpp"
#include "patchpert/mesh.hpp"

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace patchpert {

// P1 finite element function with its mesh reference.
struct ScalarField {
    const Mesh* mesh = nullptr;
    Eigen::VectorXd values;
    std::vector<char> essential_mask;

    double at(Vec2 p) const; // P1 interpolation, throws if p is outside
};

// Mixed problem  -div(coeff grad u) + mass u = source  with label-driven
// essential/natural conditions plus raw nodal constraints (used for internal
// constraint curves in the capacity solves). The homogeneous natural
// condition needs no entry.
struct MixedProblem {
    std::function<double(Vec2)> coeff;  // defaults to 1
    std::function<double(Vec2)> mass;   // empty = no reaction term
    std::function<double(Vec2)> source; // empty = 0

    struct EssentialBC {
        EdgeLabel label;
        std::function<double(Vec2)> trace; // empty = 0
    };
    struct FluxBC {
        EdgeLabel label;
        std::function<double(Vec2)> g;
    };
    std::vector<EssentialBC> essential;
    std::vector<FluxBC> flux;
    std::vector<std::pair<int, double>> node_constraints;
};

// Galerkin solve by direct sparse factorization; relative residual of the
// reduced system is checked against 1e-10. Throws SingularSystem when there
// is no essential data and no reaction term.
ScalarField solve_mixed(const Mesh& mesh, const MixedProblem& p);

// chi: Laplace, u = 1 on the patch, 0 on the Dirichlet region (patch hosted
// in the Neumann region).
ScalarField solve_chi_eps(const Mesh& mesh, const BoundaryPartition& partition);

// zeta: Laplace, zero trace on the Dirichlet region minus the patch, unit
// flux on the patch (patch hosted in the Dirichlet region).
ScalarField solve_zeta_eps(const Mesh& mesh, const BoundaryPartition& partition);

// Variationally consistent boundary flux on one labeled part (residual
// method: boundary mass solve against the interior residual).
struct BoundaryFlux {
    std::vector<int> nodes;      // mesh node indices on the part
    Eigen::VectorXd values;      // coeff * du/dn at those nodes
};
BoundaryFlux normal_flux(const Mesh& mesh, const MixedProblem& p,
                         const ScalarField& u, EdgeLabel label);
double flux_at_point(const BoundaryFlux& f, const Mesh& mesh, Vec2 p);
double integrate_flux(const BoundaryFlux& f, const Mesh& mesh, EdgeLabel label);

// int_Omega source * u dx by elementwise (vertex rule) quadrature.
double compliance(const ScalarField& u, const std::function<double(Vec2)>& source);

double l2_norm(const ScalarField& u);
double h1_seminorm(const ScalarField& u);
double h1_norm(const ScalarField& u);

} // namespace patchpert
