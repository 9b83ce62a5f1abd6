#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "patchpert/asymptotics.hpp"
#include "patchpert/errors.hpp"

#include <doctest.h>
#include <cmath>

using namespace patchpert;

namespace {

// quadrature of int N(x,y) f(y) dy: the corrector part by the vertex rule,
// the log part with recursive subdivision near the source
double integrate_n_against(const FundamentalSolution& n, const Mesh& m,
                           const std::function<double(Vec2)>& f) {
    double s = 0.0;
    std::function<double(Vec2, Vec2, Vec2, int)> green_part = [&](Vec2 a, Vec2 b, Vec2 c,
                                                                  int depth) -> double {
        const double area =
            0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
        const Vec2 cen{(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0};
        const double d = std::hypot(cen[0] - n.source[0], cen[1] - n.source[1]);
        const double diam = std::sqrt(area);
        if (depth >= 6 || d > 4.0 * diam) {
            const double g = -std::log(std::max(d, 1e-12)) / (2.0 * M_PI);
            return area * g * f(cen) / n.gamma_at_source;
        }
        const Vec2 ab{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
        const Vec2 bc{0.5 * (b[0] + c[0]), 0.5 * (b[1] + c[1])};
        const Vec2 ca{0.5 * (c[0] + a[0]), 0.5 * (c[1] + a[1])};
        return green_part(a, ab, ca, depth + 1) + green_part(ab, b, bc, depth + 1) +
               green_part(ca, bc, c, depth + 1) + green_part(ab, bc, ca, depth + 1);
    };
    for (const auto& t : m.triangles) {
        const Vec2 &a = m.nodes[t[0]], &b = m.nodes[t[1]], &c = m.nodes[t[2]];
        const double area =
            0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]));
        for (int k = 0; k < 3; ++k)
            s += area / 3.0 * n.corrector.values(t[k]) * f(m.nodes[t[k]]);
        s += green_part(a, b, c, 0);
    }
    return s;
}

} // namespace

TEST_CASE("fundamental solution of the background problem") {
    DomainSpec spec;
    const auto part = half_circle_partition(M_PI / 2.0, true);
    const Mesh m = generate_mesh(spec, part, 0.05);
    const Vec2 x{0.25, -0.3};
    const auto n = fundamental_solution_N(m, spec.gamma, part, x);

    SUBCASE("symmetry in the arguments") {
        const Vec2 y{-0.3, 0.25};
        const auto ny = fundamental_solution_N(m, spec.gamma, part, y);
        CHECK(n.eval(y) == doctest::Approx(ny.eval(x)).epsilon(2e-3));
    }
    SUBCASE("boundary conditions of the split") {
        auto rim_angle_near = [&](double t) {
            double best = 1e300, ang = 0.0;
            for (double a : m.rim_angles) {
                const double d = std::abs(std::remainder(a - t, 2.0 * M_PI));
                if (d < best) {
                    best = d;
                    ang = a;
                }
            }
            return ang;
        };
        // N vanishes on the Dirichlet part (sample at rim nodes)
        for (double t : {-2.8, -2.0, -1.0, -0.5}) {
            const double a = rim_angle_near(t);
            const Vec2 p{std::cos(a), std::sin(a)};
            CHECK(std::abs(n.eval(p)) < 1e-3);
        }
        // extrapolated normal derivative is small on the Neumann part
        for (double t : {0.8, 2.2}) {
            const double dn = normal_derivative_at_boundary(n, rim_angle_near(t), 0.08);
            CHECK(std::abs(dn) < 1e-2);
        }
    }
    SUBCASE("reproduction of the background potential") {
        MixedProblem p0;
        auto f = [](Vec2 q) { return std::exp(-4.0 * (q[0] * q[0] + q[1] * q[1])); };
        p0.source = f;
        p0.essential.push_back({EdgeLabel::Dirichlet, {}});
        const ScalarField u0 = solve_mixed(m, p0);
        const double via_n = integrate_n_against(n, m, f);
        CHECK(via_n == doctest::Approx(u0.at(x)).epsilon(0.01));
    }
    SUBCASE("source too close to the boundary is rejected") {
        CHECK_THROWS_AS(fundamental_solution_N(m, spec.gamma, part, {0.999, 0.0}),
                        SourceTooCloseToBoundary);
    }
}

TEST_CASE("prediction formulas") {
    SUBCASE("zero background value gives a zero correction") {
        CHECK(predict_dirichlet_patch(0.01, 0.3, 0.0, 1.0, 2) == 0.0);
        CHECK(predict_compliance_delta_dirichlet(0.01, 0.0, 1.0, 2) == 0.0);
    }
    SUBCASE("leading coefficients") {
        CHECK(dirichlet_patch_coefficient(2) == doctest::Approx(M_PI));
        CHECK(dirichlet_patch_coefficient(3) == doctest::Approx(4.0));
        CHECK(neumann_patch_coefficient(2) == doctest::Approx(M_PI / 2.0));
        CHECK(neumann_patch_coefficient(3) == doctest::Approx(1.0 / 3.0));
    }
    SUBCASE("cross-checks against the equilibrium means hold to 1e-12") {
        CHECK(std::abs(dirichlet_patch_coefficient(3) -
                       0.5 * equilibrium_mean_s1(3)) <= 1e-12);
        CHECK(std::abs(neumann_patch_coefficient(2) +
                       0.5 * equilibrium_mean_r1(2)) <= 1e-12);
        CHECK(std::abs(neumann_patch_coefficient(3) +
                       0.5 * equilibrium_mean_r1(3)) <= 1e-12);
    }
    SUBCASE("predictions are linear in the background data") {
        const double a = predict_dirichlet_patch(0.02, 0.17, 0.6, 1.3, 2);
        const double b = predict_dirichlet_patch(0.02, 0.17, 1.2, 1.3, 2);
        CHECK(b == doctest::Approx(2.0 * a).epsilon(1e-14));
        const double c = predict_neumann_patch(0.02, 0.4, 0.25, 1.3, 2);
        const double d = predict_neumann_patch(0.02, 0.4, 0.5, 1.3, 2);
        CHECK(d == doctest::Approx(2.0 * c).epsilon(1e-14));
    }
    SUBCASE("compliance deltas carry the variant signs") {
        CHECK(predict_compliance_delta_dirichlet(0.01, 0.7, 1.0, 2) < 0.0);
        CHECK(predict_compliance_delta_neumann(0.01, -0.7, 1.0, 2) > 0.0);
    }
    SUBCASE("expansion prediction laws match the variants") {
        const auto p2 = make_prediction(ExpansionVariant::DirichletPatch2D, {0.1, 0.1},
                                        0.2, 0.5, 1.0);
        CHECK(p2.leading_order(0.01) == doctest::Approx(1.0 / std::abs(std::log(0.01))));
        const auto p3 = make_prediction(ExpansionVariant::DirichletPatch3DFormula,
                                        {0.1, 0.1}, 0.2, 0.5, 1.0);
        CHECK(p3.leading_order(0.01) == doctest::Approx(0.01));
        const auto n2 = make_prediction(ExpansionVariant::NeumannPatch2D, {0.1, 0.1},
                                        0.2, 0.5, 1.0);
        CHECK(n2.leading_order(0.01) == doctest::Approx(1e-4));
        const auto n3 = make_prediction(ExpansionVariant::NeumannPatch3DFormula,
                                        {0.1, 0.1}, 0.2, 0.5, 1.0);
        CHECK(n3.leading_order(0.01) == doctest::Approx(1e-6));
        CHECK(n3.predicted_delta(0.01) ==
              doctest::Approx(1e-6 * n3.leading_coefficient));
    }
}
