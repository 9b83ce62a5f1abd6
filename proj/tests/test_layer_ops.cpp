#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "patchpert/errors.hpp"
#include "patchpert/layer_ops.hpp"
#include "patchpert/quadrature.hpp"

#include <doctest.h>
#include <cmath>
#include <random>
#include <sstream>

using namespace patchpert;

namespace {

// independent quadrature oracle for the segment log kernel: the substitution
// y = cos(tau) removes the endpoint weight and the singular moment
// int_0^pi log|x - cos(tau)| dtau = -pi log 2 regularizes the integrand
double s1_segment_oracle(const std::function<double(double)>& psi, double x) {
    auto f = [&](double tau) {
        const double y = std::cos(tau);
        return std::log(std::abs(x - y)) * (psi(y) - psi(x));
    };
    const double reg = adaptive_quad(f, 0.0, M_PI, 1e-10, 40);
    return -(reg + psi(x) * (-M_PI * std::log(2.0))) / (2.0 * M_PI);
}

// disk center-value oracles for the radially symmetric modes
double s1_disk_center_oracle(int n) {
    // S1[P_n^{(-1/2,0)}(2r^2-1)(1-r^2)^{-1/2}](0) = (1/2) int_0^1 P_n (1-r^2)^{-1/2} dr
    return 0.5 * adaptive_quad(
                     [&](double tau) {
                         const double r = std::sin(tau);
                         return jacobi_eval(n, -0.5, 0.0, 2.0 * r * r - 1.0);
                     },
                     0.0, M_PI / 2.0, 1e-12, 40);
}

double r1_disk_center_oracle(int n) {
    // R1[P_n^{(1/2,0)}(2r^2-1) sqrt(1-r^2)](0) with the toolkit normalization
    // (1/pi) f.p. int phi/|y|^3 dA = 2 f.p. int_0^1 f(r)/r^2 dr,
    // f.p. int_0^1 f/r^2 dr = int_0^1 (f - f(0))/r^2 dr - f(0)
    auto f = [&](double r) {
        return jacobi_eval(n, 0.5, 0.0, 2.0 * r * r - 1.0) * std::sqrt(1.0 - r * r);
    };
    const double f0 = f(0.0);
    const double reg = adaptive_quad(
        [&](double r) { return (f(r) - f0) / (r * r); }, 1e-10, 1.0, 1e-10, 40);
    return 2.0 * (reg - f0);
}

} // namespace

TEST_CASE("segment operators against the quadrature oracle") {
    const int n = 64;
    const KernelMatrix s1 = op_S1(RefGeometry::Segment, n);
    auto psi = [](double y) { return 0.3 + y - 0.5 * y * y + 0.2 * y * y * y; };
    const auto phi = make_density_segment(n, WeightClass::InverseSqrt, [&](double y) {
        return psi(y) / std::sqrt(1.0 - y * y);
    });
    const Eigen::VectorXd vals = apply(s1, phi);
    // the cos substitution absorbs the weight: the oracle integrand is
    // -(1/2pi) log|x - cos(tau)| psi(cos(tau))
    for (int i : {5, 20, 40, 60}) {
        const double oracle = s1_segment_oracle(psi, s1.node_x[i]);
        CHECK(vals(i) == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("disk operators against the center-value oracle") {
    for (int nn : {0, 1, 2, 3, 4}) {
        // eigenvalue * P_n(-1) equals the oracle value at the center (t = -1)
        const KernelMatrix s1 = op_S1(RefGeometry::Disk, 16);
        const KernelMatrix r1 = op_R1(RefGeometry::Disk, 16);
        const double pn1s = jacobi_eval(nn, -0.5, 0.0, -1.0);
        const double pn1r = jacobi_eval(nn, 0.5, 0.0, -1.0);
        CHECK(s1.sigma(0, nn) * pn1s ==
              doctest::Approx(s1_disk_center_oracle(nn)).epsilon(1e-9));
        CHECK(r1.sigma(0, nn) * pn1r ==
              doctest::Approx(r1_disk_center_oracle(nn)).epsilon(1e-9));
    }
}

TEST_CASE("kernel matrix invariants") {
    SUBCASE("symmetry of the S1 kernel part") {
        const KernelMatrix s = op_S1(RefGeometry::Segment, 96);
        CHECK((s.K - s.K.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        const KernelMatrix d = op_S1(RefGeometry::Disk, 12);
        CHECK((d.K - d.K.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("pairing weights positive, nodes strictly interior") {
        for (auto geom : {RefGeometry::Segment, RefGeometry::Disk}) {
            const KernelMatrix s = op_S1(geom, 16);
            CHECK(s.pair_w.minCoeff() > 0.0);
            for (double x : s.node_x) CHECK(std::abs(x) < 1.0);
        }
    }
    SUBCASE("positive definiteness (mean-zero and beyond)") {
        // the log-kernel single layer is positive definite on the segment
        // (transfinite diameter 1/2 < 1) and on the disk
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const KernelMatrix s = op_S1(RefGeometry::Segment, 48);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd psi(48);
            for (int i = 0; i < 48; ++i) psi(i) = u(rng);
            // remove the mean in the pairing sense
            const Eigen::VectorXd w = s.pair_w;
            psi.array() -= w.dot(psi) / w.sum();
            const Eigen::VectorXd wpsi = w.cwiseProduct(psi);
            CHECK(wpsi.dot(s.K * wpsi) > 0.0);
        }
        // hypersingular pairing is negative
        const KernelMatrix r = op_R1(RefGeometry::Segment, 48);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd psi(48);
            for (int i = 0; i < 48; ++i) psi(i) = u(rng);
            const Eigen::VectorXd wpsi = r.pair_w.cwiseProduct(psi);
            CHECK(wpsi.dot(r.K * wpsi) < 0.0);
        }
    }
    SUBCASE("solve then apply is the identity on smooth data") {
        for (auto geom : {RefGeometry::Segment, RefGeometry::Disk}) {
            const int n = geom == RefGeometry::Segment ? 64 : 16;
            const KernelMatrix s = op_S1(geom, n);
            BoundaryDensity rhs;
            rhs.values.resize(s.size());
            for (int i = 0; i < s.size(); ++i) {
                const double x = s.node_x[i];
                rhs.values(i) = 1.0 + 0.5 * x - 0.25 * x * x;
            }
            const BoundaryDensity sol = solve_S1(s, rhs);
            const Eigen::VectorXd back = apply(s, sol);
            CHECK((back - rhs.values).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
    SUBCASE("R1 linearity holds at matrix level") {
        const KernelMatrix r = op_R1(RefGeometry::Segment, 32);
        auto phi = make_density_segment(32, WeightClass::Sqrt,
                                        [](double x) { return std::sqrt(1.0 - x * x); });
        const Eigen::VectorXd v1 = apply(r, phi);
        phi.values *= 4.0; // power of two: scaling commutes exactly
        const Eigen::VectorXd v2 = apply(r, phi);
        CHECK((v2 - 4.0 * v1).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("condition estimate and ill-conditioning guard") {
        const KernelMatrix s = op_S1(RefGeometry::Segment, 64);
        CHECK(condition_estimate(s) < 1e4);
    }
}

TEST_CASE("V_eps structure") {
    SUBCASE("gamma(0) = 1 gives alpha = 0") {
        const KernelMatrix v = op_Veps(0.1, 1.0, 32);
        CHECK(v.alpha == 0.0);
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(op_Veps(1.5, 1.0, 32), UnsupportedGeometry);
        CHECK_THROWS_AS(op_Veps(0.1, -2.0, 32), UnsupportedGeometry);
        CHECK_THROWS_AS(op_S1(RefGeometry::Segment, 2), UnsupportedGeometry);
    }
    SUBCASE("inverse identities at machine precision") {
        const KernelMatrix v = op_Veps(1.0 / 64.0, 2.2, 64);
        const auto rep = veps_inverse_identities(v, 99);
        CHECK(rep.inverse_resid < 1e-10);
        CHECK(rep.mean_formula_resid < 1e-12);
    }
    SUBCASE("inverse mean approaches 1/|log eps|") {
        // <V^-1 1, 1> = 1/(|log eps| + alpha + log 2) exactly
        for (double eps : {1.0 / 16, 1.0 / 256}) {
            const KernelMatrix v = op_Veps(eps, 1.0, 64);
            const KernelMatrix s1 = op_S1(RefGeometry::Segment, 64);
            BoundaryDensity one;
            one.values = Eigen::VectorXd::Ones(64);
            const auto s1inv1 = solve_S1(s1, one);
            const double c = std::abs(std::log(eps));
            const double mean =
                s1inv1.pair_with_one() /
                (2.0 * M_PI + c * s1inv1.pair_with_one());
            CHECK(mean == doctest::Approx(1.0 / (c + std::log(2.0))).epsilon(1e-12));
            CHECK(mean * c == doctest::Approx(1.0).epsilon(0.3));
        }
    }
}

TEST_CASE("T_eps operators") {
    DomainSpec spec; // gamma = 1
    const auto flat = build_flattening(spec);
    SUBCASE("constant unit conductivity collapses to the explicit form") {
        const double eps = 1.0 / 32.0;
        const KernelMatrix t = op_Teps_dirichlet(flat, eps, 48, 2);
        const KernelMatrix s1 = op_S1(RefGeometry::Segment, 48);
        // T = (1/pi)|log eps| <.,1> + 2 S1
        const Eigen::MatrixXd top =
            t.row_scale.asDiagonal() * t.K * t.pair_w.asDiagonal() +
            t.row_shift * t.pair_w.transpose();
        const Eigen::MatrixXd lim =
            2.0 * s1.K * s1.pair_w.asDiagonal() +
            (std::abs(std::log(eps)) / M_PI) * Eigen::VectorXd::Ones(48) *
                s1.pair_w.transpose();
        CHECK((top - lim).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(teps_residual_dirichlet(flat, eps, 48, 2) < 1e-10);
        CHECK(teps_residual_neumann(flat, eps, 48, 2) < 1e-10);
    }
    SUBCASE("variable conductivity residuals shrink along the sweep") {
        DomainSpec vspec;
        vspec.gamma.value = [](Vec2 p) { return 1.5 + 0.4 * p[0]; };
        vspec.gamma.lower = 1.1;
        vspec.gamma.upper = 1.9;
        const auto vflat = build_flattening(vspec);
        double prev_d = 1e300, prev_n = 1e300;
        for (double eps : {1.0 / 16, 1.0 / 64, 1.0 / 256}) {
            const double rd = teps_residual_dirichlet(vflat, eps, 32, 2);
            const double rn = teps_residual_neumann(vflat, eps, 32, 2);
            CHECK(rd < prev_d);
            CHECK(rn < prev_n);
            prev_d = rd;
            prev_n = rn;
        }
        // 3D kernel-level variants
        CHECK(teps_residual_dirichlet(vflat, 1.0 / 64, 12, 3) <
              teps_residual_dirichlet(vflat, 1.0 / 16, 12, 3));
        CHECK(teps_residual_neumann(vflat, 1.0 / 64, 12, 3) <
              teps_residual_neumann(vflat, 1.0 / 16, 12, 3));
    }
}

TEST_CASE("plain-text dumps") {
    const KernelMatrix s = op_S1(RefGeometry::Segment, 8);
    std::ostringstream m;
    dump_matrix(s, m);
    CHECK(m.str().find("# row col value") != std::string::npos);
    const auto phi =
        make_density_segment(8, WeightClass::Plain, [](double x) { return x; });
    std::ostringstream d;
    dump_density(phi, d);
    CHECK(d.str().find("# x theta value weight") != std::string::npos);
}
