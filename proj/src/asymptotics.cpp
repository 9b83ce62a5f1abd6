#include "patchpert/asymptotics.hpp"
#include "patchpert/errors.hpp"
#include "patchpert/kernels.hpp"

#include <cmath>

namespace patchpert {

namespace {

double green2(Vec2 x, Vec2 y) {
    const double r = std::hypot(x[0] - y[0], x[1] - y[1]);
    if (r == 0.0) throw SingularEvaluation("green at x = y");
    return -std::log(r) / (2.0 * M_PI);
}

Vec2 grad_y_green2(Vec2 x, Vec2 y) {
    const double dx = y[0] - x[0], dy = y[1] - x[1];
    const double r2 = dx * dx + dy * dy;
    return {-dx / (2.0 * M_PI * r2), -dy / (2.0 * M_PI * r2)};
}

} // namespace

FundamentalSolution fundamental_solution_N(const Mesh& mesh, const Conductivity& gamma,
                                           const BoundaryPartition& partition, Vec2 x) {
    double rad = 0.0;
    for (int i : mesh.rim_nodes)
        rad = std::max(rad, std::hypot(mesh.nodes[i][0], mesh.nodes[i][1]));
    if (std::hypot(x[0], x[1]) > rad - 4.0 * mesh.h_max)
        throw SourceTooCloseToBoundary("dist(x, boundary) < 4h");

    const double gx = gamma(x);
    MixedProblem p;
    p.coeff = [&gamma](Vec2 q) { return gamma(q); };
    const bool gamma_const = (gamma.lower == gamma.upper);
    if (!gamma_const) {
        p.source = [&gamma, gx, x](Vec2 q) {
            const double h = 1e-5;
            const double dgx =
                (gamma({q[0] + h, q[1]}) - gamma({q[0] - h, q[1]})) / (2.0 * h);
            const double dgy =
                (gamma({q[0], q[1] + h}) - gamma({q[0], q[1] - h})) / (2.0 * h);
            const Vec2 gg = grad_y_green2(x, q);
            return (dgx * gg[0] + dgy * gg[1]) / gx;
        };
    }
    auto dir_trace = [gx, x](Vec2 q) { return -green2(x, q) / gx; };
    auto neu_flux = [&gamma, gx, x](Vec2 q) {
        const double r = std::hypot(q[0], q[1]);
        const Vec2 n{q[0] / r, q[1] / r};
        const Vec2 gg = grad_y_green2(x, q);
        return -(gamma(q) / gx) * (gg[0] * n[0] + gg[1] * n[1]);
    };
    p.essential.push_back({EdgeLabel::Dirichlet, dir_trace});
    p.flux.push_back({EdgeLabel::Neumann, neu_flux});
    if (partition.patch_in_neumann)
        p.flux.push_back({EdgeLabel::Patch, neu_flux});
    else
        p.essential.push_back({EdgeLabel::Patch, dir_trace});

    FundamentalSolution n;
    n.source = x;
    n.gamma_at_source = gx;
    n.corrector = solve_mixed(mesh, p);
    return n;
}

double FundamentalSolution::eval(Vec2 y) const {
    return green2(source, y) / gamma_at_source + corrector.at(y);
}

double FundamentalSolution::corrector_at(Vec2 y) const { return corrector.at(y); }

double normal_derivative_at_boundary(const FundamentalSolution& n, double angle,
                                     double delta) {
    const Vec2 nv{std::cos(angle), std::sin(angle)};
    const double v0 = n.eval(nv); // boundary point itself (rim node value)
    auto quotient = [&](double t) {
        const Vec2 y{(1.0 - t) * nv[0], (1.0 - t) * nv[1]};
        return (v0 - n.eval(y)) / t;
    };
    return richardson3(quotient(4.0 * delta), quotient(2.0 * delta), quotient(delta));
}

double dirichlet_patch_coefficient(int d) { return d == 2 ? M_PI : 4.0; }
double neumann_patch_coefficient(int d) { return d == 2 ? M_PI / 2.0 : 1.0 / 3.0; }

double equilibrium_mean_s1(int d) { return d == 2 ? 2.0 * M_PI / std::log(2.0) : 8.0; }
double equilibrium_mean_r1(int d) { return d == 2 ? -M_PI : -2.0 / 3.0; }

double predict_dirichlet_patch(double eps, double n_val, double u00, double gamma0,
                               int d) {
    const double law = (d == 2) ? 1.0 / std::abs(std::log(eps)) : eps;
    return -dirichlet_patch_coefficient(d) * law * gamma0 * u00 * n_val;
}

double predict_neumann_patch(double eps, double dn_n_val, double du0dn0, double gamma0,
                             int d) {
    return neumann_patch_coefficient(d) * std::pow(eps, d) * gamma0 * du0dn0 * dn_n_val;
}

double predict_compliance_delta_dirichlet(double eps, double u00, double gamma0, int d) {
    const double law = (d == 2) ? 1.0 / std::abs(std::log(eps)) : eps;
    return -dirichlet_patch_coefficient(d) * law * gamma0 * u00 * u00;
}

double predict_compliance_delta_neumann(double eps, double du0dn0, double gamma0, int d) {
    return neumann_patch_coefficient(d) * std::pow(eps, d) * gamma0 * du0dn0 * du0dn0;
}

double ExpansionPrediction::leading_order(double eps) const {
    switch (variant) {
        case ExpansionVariant::DirichletPatch2D:
            return 1.0 / std::abs(std::log(eps));
        case ExpansionVariant::DirichletPatch3DFormula:
            return eps;
        case ExpansionVariant::NeumannPatch2D:
            return eps * eps;
        case ExpansionVariant::NeumannPatch3DFormula:
            return eps * eps * eps;
    }
    return 0.0;
}

ExpansionPrediction make_prediction(ExpansionVariant v, Vec2 x, double n_or_dn_val,
                                    double u00_or_flux, double gamma0) {
    ExpansionPrediction p;
    p.variant = v;
    p.x = x;
    switch (v) {
        case ExpansionVariant::DirichletPatch2D:
            p.leading_coefficient = -M_PI * gamma0 * u00_or_flux * n_or_dn_val;
            break;
        case ExpansionVariant::DirichletPatch3DFormula:
            p.leading_coefficient = -4.0 * gamma0 * u00_or_flux * n_or_dn_val;
            break;
        case ExpansionVariant::NeumannPatch2D:
            p.leading_coefficient = 0.5 * M_PI * gamma0 * u00_or_flux * n_or_dn_val;
            break;
        case ExpansionVariant::NeumannPatch3DFormula:
            p.leading_coefficient = gamma0 * u00_or_flux * n_or_dn_val / 3.0;
            break;
    }
    return p;
}

} // namespace patchpert
