#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "patchpert/errors.hpp"
#include "patchpert/mesh.hpp"

#include <doctest.h>
#include <cmath>
#include <sstream>

using namespace patchpert;

TEST_CASE("graded axis") {
    const auto xs = graded_axis(-2.0, 2.0, {0.5}, 0.01, 0.4, 0.5);
    CHECK(xs.front() == -2.0);
    CHECK(xs.back() == 2.0);
    bool has_feature = false;
    double min_gap = 1e300;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        CHECK(xs[i] > xs[i - 1]);
        min_gap = std::min(min_gap, xs[i] - xs[i - 1]);
        if (std::abs(xs[i] - 0.5) < 1e-12) has_feature = true;
    }
    CHECK(has_feature);
    CHECK(min_gap <= 0.016); // resolves toward the floor near the feature
    CHECK(min_gap >= 0.004);
}

TEST_CASE("disk mesh") {
    DomainSpec spec;
    const auto part = half_circle_partition(M_PI / 2.0, true);

    SUBCASE("no patch: Euler characteristic and area") {
        const Mesh m = generate_mesh(spec, part, 0.1);
        CHECK(m.euler_characteristic() == 1);
        CHECK(m.min_signed_area() > 0.0);
        CHECK(m.total_area() == doctest::Approx(M_PI).epsilon(5e-3));
        // every boundary edge is labeled
        for (const auto& e : m.boundary_edges)
            CHECK((e.label == EdgeLabel::Dirichlet || e.label == EdgeLabel::Neumann));
    }
    SUBCASE("patch resolution contract: smallest patch edge <= eps/8") {
        for (double eps : {0.05, 1.0 / 512}) {
            const auto pp = make_patch(part, eps);
            const Mesh m = generate_mesh(spec, pp, 0.05);
            double smallest = 1e300;
            int patch_edges = 0;
            for (const auto& e : m.boundary_edges) {
                if (e.label != EdgeLabel::Patch) continue;
                ++patch_edges;
                smallest = std::min(smallest,
                                    std::hypot(m.nodes[e.a][0] - m.nodes[e.b][0],
                                               m.nodes[e.a][1] - m.nodes[e.b][1]));
            }
            CHECK(patch_edges >= 8);
            CHECK(smallest <= eps / 8.0);
        }
    }
    SUBCASE("edge labels are consistent with the partition") {
        const auto pp = make_patch(part, 0.1);
        const Mesh m = generate_mesh(spec, pp, 0.07);
        auto in_arc = [](double t, const Arc& a) {
            double rel = std::fmod(t - a.lo, 2.0 * M_PI);
            if (rel < 0.0) rel += 2.0 * M_PI;
            return rel <= a.length();
        };
        for (const auto& e : m.boundary_edges) {
            const Vec2& a = m.nodes[e.a];
            const Vec2& b = m.nodes[e.b];
            const double mid = std::atan2(0.5 * (a[1] + b[1]), 0.5 * (a[0] + b[0]));
            if (in_arc(mid, *pp.patch))
                CHECK(e.label == EdgeLabel::Patch);
            else if (in_arc(mid, pp.dirichlet_arcs.front()))
                CHECK(e.label == EdgeLabel::Dirichlet);
            else
                CHECK(e.label == EdgeLabel::Neumann);
        }
    }
    SUBCASE("area converges under refinement") {
        const double c1 = std::abs(generate_mesh(spec, part, 0.1).total_area() - M_PI);
        const double c2 = std::abs(generate_mesh(spec, part, 0.05).total_area() - M_PI);
        CHECK(c2 < c1);
        CHECK(c2 / M_PI < 5e-3);
    }
    SUBCASE("degenerate input rejected") {
        CHECK_THROWS_AS(generate_mesh(spec, part, 0.0), MeshFailure);
    }
}

TEST_CASE("annulus and gluing") {
    DomainSpec spec;
    const auto pp = make_patch(half_circle_partition(M_PI / 2.0, true), 1.0 / 32);
    const Mesh disk = generate_mesh(spec, pp, 0.1);
    std::vector<double> rho = {0.0, 0.1, 0.25, 0.5, 1.0, 2.0};
    const Mesh ann = annulus_mesh(1.0, disk.rim_angles, rho);
    CHECK(ann.euler_characteristic() == 0); // annulus has a hole
    CHECK(ann.min_signed_area() > 0.0);

    SUBCASE("glue without a crack restores the disk topology") {
        const Mesh g = glue_disk_annulus(disk, ann, {});
        CHECK(g.euler_characteristic() == 1);
        CHECK(g.nodes.size() ==
              disk.nodes.size() + ann.nodes.size() - disk.rim_nodes.size());
    }
    SUBCASE("crack rim nodes are duplicated") {
        std::vector<int> crack;
        for (std::size_t i = 0; i < disk.rim_angles.size(); ++i) {
            const double rel = std::remainder(disk.rim_angles[i] - M_PI / 2.0, 2.0 * M_PI);
            if (std::abs(rel) < 1.0 / 32 - 1e-12) crack.push_back(static_cast<int>(i));
        }
        REQUIRE(!crack.empty());
        const Mesh g = glue_disk_annulus(disk, ann, crack);
        CHECK(g.nodes.size() == disk.nodes.size() + ann.nodes.size() -
                                    disk.rim_nodes.size() + crack.size());
        int plus = 0, minus = 0;
        for (const auto& e : g.boundary_edges) {
            if (e.label == EdgeLabel::CrackPlus) ++plus;
            if (e.label == EdgeLabel::CrackMinus) ++minus;
        }
        CHECK(plus == minus);
        CHECK(plus >= static_cast<int>(crack.size()));
    }
}

TEST_CASE("rect mesh") {
    const auto xs = graded_axis(-1.0, 1.0, {0.0}, 0.05, 0.3, 0.5);
    const auto ys = graded_axis(0.0, 1.0, {0.0}, 0.05, 0.3, 0.5);
    const Mesh m = rect_mesh(xs, ys);
    CHECK(m.min_signed_area() > 0.0);
    CHECK(m.total_area() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.euler_characteristic() == 1);
}

TEST_CASE("mesh plain-text round trip") {
    DomainSpec spec;
    const auto pp = make_patch(half_circle_partition(M_PI / 2.0, true), 0.05);
    const Mesh m = generate_mesh(spec, pp, 0.15);
    std::stringstream ss;
    write_mesh(m, ss);
    const Mesh r = read_mesh(ss);
    REQUIRE(r.nodes.size() == m.nodes.size());
    REQUIRE(r.triangles.size() == m.triangles.size());
    REQUIRE(r.boundary_edges.size() == m.boundary_edges.size());
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        CHECK(r.nodes[i][0] == m.nodes[i][0]);
        CHECK(r.nodes[i][1] == m.nodes[i][1]);
    }
    for (std::size_t i = 0; i < m.triangles.size(); ++i)
        CHECK(r.triangles[i] == m.triangles[i]);
    for (std::size_t i = 0; i < m.boundary_edges.size(); ++i) {
        CHECK(r.boundary_edges[i].a == m.boundary_edges[i].a);
        CHECK(r.boundary_edges[i].b == m.boundary_edges[i].b);
        CHECK(r.boundary_edges[i].label == m.boundary_edges[i].label);
    }
}
