#pragma once
#include "patchpert/fem.hpp"
#include "patchpert/geometry.hpp"
#include "patchpert/mesh.hpp"

namespace patchpert {

// Fundamental solution N(x,y) of the background mixed problem, represented by
// the singular split N = G/gamma(x) + R with the smooth corrector R solved by
// FEM (the Dirac source never meets the mesh).
struct FundamentalSolution {
    Vec2 source{};
    double gamma_at_source = 1.0;
    ScalarField corrector;

    double eval(Vec2 y) const;           // N(x, y)
    double corrector_at(Vec2 y) const;   // R(x, y)
};

FundamentalSolution fundamental_solution_N(const Mesh& mesh, const Conductivity& gamma,
                                           const BoundaryPartition& partition, Vec2 x);

// dN/dn_y(x, p) at a boundary point p = (cos a, sin a), by Richardson
// extrapolation of inward difference quotients at offsets {4d, 2d, d}.
double normal_derivative_at_boundary(const FundamentalSolution& n, double angle,
                                     double delta);

// Explicit first-order coefficients of the expansions.
double dirichlet_patch_coefficient(int d); // pi (d=2), 4 (d=3)
double neumann_patch_coefficient(int d);   // pi/2 (d=2), 1/3 (d=3)

// Equilibrium-distribution means <S1^{-1}1,1>, <R1^{-1}1,1> (closed forms).
double equilibrium_mean_s1(int d); // 2pi/log2 (d=2), 8 (d=3)
double equilibrium_mean_r1(int d); // -pi (d=2), -2/3 (d=3)

// Leading correction u_eps(x) - u0(x).
double predict_dirichlet_patch(double eps, double n_val, double u00, double gamma0,
                               int d);
double predict_neumann_patch(double eps, double dn_n_val, double du0dn0, double gamma0,
                             int d);

// First-order compliance change; negative for the Dirichlet-patch variant,
// positive for the Neumann-patch variant.
double predict_compliance_delta_dirichlet(double eps, double u00, double gamma0, int d);
double predict_compliance_delta_neumann(double eps, double du0dn0, double gamma0, int d);

enum class ExpansionVariant {
    DirichletPatch2D,
    DirichletPatch3DFormula,
    NeumannPatch2D,
    NeumannPatch3DFormula,
};

struct ExpansionPrediction {
    ExpansionVariant variant = ExpansionVariant::DirichletPatch2D;
    Vec2 x{};
    double leading_coefficient = 0.0; // signed prefactor of the eps-law

    double leading_order(double eps) const;
    double predicted_delta(double eps) const {
        return leading_coefficient * leading_order(eps);
    }
};

ExpansionPrediction make_prediction(ExpansionVariant v, Vec2 x, double n_or_dn_val,
                                    double u00_or_flux, double gamma0);

} // namespace patchpert
