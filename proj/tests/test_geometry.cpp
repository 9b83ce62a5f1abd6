#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "patchpert/errors.hpp"
#include "patchpert/geometry.hpp"

#include <doctest.h>
#include <cmath>
#include <random>

using namespace patchpert;

TEST_CASE("make_patch basics") {
    const auto part = half_circle_partition(M_PI / 2.0, true);

    SUBCASE("zero radius leaves the partition unchanged") {
        const auto p = make_patch(part, 0.0);
        CHECK(!p.patch.has_value());
        CHECK(p.dirichlet_arcs.size() == part.dirichlet_arcs.size());
    }
    SUBCASE("unit circle arc of geodesic radius eps") {
        const auto p = make_patch(part, 0.1);
        REQUIRE(p.patch.has_value());
        CHECK(p.patch->lo == doctest::Approx(M_PI / 2.0 - 0.1));
        CHECK(p.patch->hi == doctest::Approx(M_PI / 2.0 + 0.1));
    }
    SUBCASE("separation violation at the configured d_min") {
        // interface sits at patch_center +- pi/2; d_min = 0.1 pi
        const double limit = M_PI / 2.0 - part.d_min;
        CHECK_NOTHROW(make_patch(part, limit - 1e-6));
        CHECK_THROWS_AS(make_patch(part, limit + 1e-3), SeparationViolation);
    }
    SUBCASE("patch endpoints respect d_min for every generated eps") {
        for (double eps : {1.0 / 16, 1.0 / 64, 1.0 / 256, 1.0 / 512}) {
            const auto p = make_patch(part, eps);
            for (double s : p.interface_angles()) {
                CHECK(geodesic_distance_circle(p.patch->lo, s) >= p.d_min - 1e-12);
                CHECK(geodesic_distance_circle(p.patch->hi, s) >= p.d_min - 1e-12);
            }
        }
    }
}

TEST_CASE("geodesic distance") {
    CHECK(geodesic_distance({1.0, 0.0}, {-1.0, 0.0}) == doctest::Approx(M_PI));
    CHECK(geodesic_distance({0.0, 1.0}, {0.0, 1.0}) == 0.0);
    CHECK(geodesic_distance({0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}) ==
          doctest::Approx(M_PI));

    SUBCASE("chord-arc equivalence with c = 2/pi on the unit circle") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
        for (int k = 0; k < 200; ++k) {
            const double a = u(rng), b = u(rng);
            const double d = geodesic_distance_circle(a, b);
            const double chord = std::hypot(std::cos(a) - std::cos(b),
                                            std::sin(a) - std::sin(b));
            CHECK(chord <= d + 1e-12);
            CHECK(chord >= (2.0 / M_PI) * d - 1e-12);
        }
    }
    SUBCASE("unsupported geometries are rejected") {
        CHECK_THROWS_AS(geodesic_distance({0.5, 0.0}, {1.0, 0.0}), UnsupportedGeometry);
        CHECK_THROWS_AS(geodesic_distance({1.0}, {1.0}), UnsupportedGeometry);
    }
}

TEST_CASE("domain spec from config") {
    const auto c = Config::from_string(
        "kind = unit_disk\nradius = 1.0\npatch_center_angle = 1.5707963\ngamma0 = 2.5\n");
    const DomainSpec s = domain_from_config(c);
    CHECK(s.kind == DomainKind::UnitDisk);
    CHECK(s.gamma({0.0, 0.0}) == doctest::Approx(2.5));
    CHECK(s.patch_center_angle == doctest::Approx(M_PI / 2.0).epsilon(1e-6));
    CHECK_THROWS_AS(domain_from_config(Config::from_string("kind = torus\n")),
                    ConfigError);
    CHECK_THROWS_AS(domain_from_config(Config::from_string("gamma0 = -1\n")),
                    ConfigError);
}

TEST_CASE("flattening map") {
    DomainSpec spec;
    SUBCASE("gamma = 1 gives the identity coefficient at the origin") {
        const auto f = build_flattening(spec);
        const Vec2 t0 = f.forward({0.0, 0.0});
        CHECK(std::hypot(t0[0], t0[1]) < 1e-15);
        const Mat2 j = f.jacobian({0.0, 0.0});
        CHECK(j[0][0] == doctest::Approx(1.0));
        CHECK(j[1][1] == doctest::Approx(1.0));
        CHECK(std::abs(j[0][1]) < 1e-15);
        const Mat2 a = f.a_field({0.0, 0.0});
        CHECK(a[0][0] == doctest::Approx(1.0));
        CHECK(a[1][1] == doctest::Approx(1.0));
        CHECK(std::abs(a[0][1]) < 1e-14);
    }
    SUBCASE("gamma = 2 scales the coefficient") {
        spec.gamma = Conductivity::constant(2.0);
        const auto f = build_flattening(spec);
        const Mat2 a = f.a_field({0.0, 0.0});
        CHECK(a[0][0] == doctest::Approx(2.0));
        CHECK(a[1][1] == doctest::Approx(2.0));
    }
    SUBCASE("coefficient field symmetric positive definite at 100 samples") {
        spec.gamma.value = [](Vec2 p) { return 1.5 + 0.3 * p[0] - 0.2 * p[1]; };
        spec.gamma.lower = 0.9;
        spec.gamma.upper = 2.1;
        const auto f = build_flattening(spec);
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u(-0.6, 0.6);
        for (int k = 0; k < 100; ++k) {
            const Vec2 y{u(rng), -std::abs(u(rng))};
            const Mat2 a = f.a_field(y);
            CHECK(std::abs(a[0][1] - a[1][0]) < 1e-12);
            // eigenvalues of the symmetric 2x2 stay within the gamma bounds
            const double tr = a[0][0] + a[1][1];
            const double det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
            CHECK(tr / 2.0 - disc > spec.gamma.lower - 1e-9);
            CHECK(tr / 2.0 + disc < spec.gamma.upper + 1e-9);
        }
    }
    SUBCASE("the wall maps onto the tangent circle") {
        const auto f = build_flattening(spec);
        for (double t : {-1.5, -0.2, 0.4, 2.0}) {
            const Vec2 w = f.forward({t, 0.0});
            CHECK(std::hypot(w[0], w[1] + spec.radius) ==
                  doctest::Approx(spec.radius).epsilon(1e-12));
        }
    }
}
