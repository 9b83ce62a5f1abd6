#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "patchpert/errors.hpp"
#include "patchpert/geometry.hpp"
#include "patchpert/kernels.hpp"

#include <doctest.h>
#include <cmath>
#include <random>

using namespace patchpert;

TEST_CASE("free-space fundamental solution") {
    Eigen::Vector2d x2(0.0, 0.0), y2(1.0, 0.0);
    CHECK(green_free(x2, y2) == doctest::Approx(0.0));
    Eigen::Vector3d x3(0.0, 0.0, 0.0), y3(0.0, 1.0, 0.0);
    CHECK(green_free(x3, y3) == doctest::Approx(1.0 / (4.0 * M_PI)));
    CHECK_THROWS_AS(green_free(x2, x2), SingularEvaluation);

    SUBCASE("harmonic away from the source (5-point stencil)") {
        const double h = 1e-3;
        const Eigen::Vector2d y(0.4, -0.7);
        auto g = [&](double a, double b) {
            return green_free(x2, Eigen::Vector2d(y(0) + a, y(1) + b));
        };
        const double lap =
            (g(h, 0) + g(-h, 0) + g(0, h) + g(0, -h) - 4.0 * g(0, 0)) / (h * h);
        CHECK(std::abs(lap) < 1e-6);
    }
}

TEST_CASE("single layer potential on the unit circle") {
    const int n = 512;
    SUBCASE("constant density has zero potential at the center") {
        CircleDensity one;
        one.values.assign(n, 1.0);
        CHECK(std::abs(single_layer_circle(one, {0.0, 0.0})) < 1e-12);
    }
    SUBCASE("mean-zero density decays like 1/|x|") {
        CircleDensity phi;
        phi.values.resize(n);
        for (int j = 0; j < n; ++j)
            phi.values[j] = std::cos(2.0 * M_PI * j / n) + 0.5 * std::sin(6.0 * M_PI * j / n);
        double prev = 0.0;
        std::vector<double> vals;
        for (double r : {10.0, 20.0, 40.0}) {
            vals.push_back(std::abs(single_layer_circle(phi, {r, 0.3})));
        }
        const double rate1 = std::log(vals[0] / vals[1]) / std::log(2.0);
        const double rate2 = std::log(vals[1] / vals[2]) / std::log(2.0);
        CHECK(rate1 > 0.9);
        CHECK(rate2 > 0.9);
        (void)prev;
    }
}

TEST_CASE("half-space kernels") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);

    SUBCASE("identity matrix reduces to Euclidean images") {
        const Eigen::MatrixXd I2 = Eigen::MatrixXd::Identity(2, 2);
        const auto kn = HalfSpaceKernel::make(I2, ImageType::NeumannImage);
        const auto kd = HalfSpaceKernel::make(I2, ImageType::DirichletImage);
        const Eigen::Vector2d x(0.3, -0.8), y(-0.2, -0.5), ystar(-0.2, 0.5);
        CHECK(kn.eval(x, y) ==
              doctest::Approx(green_free(x, y) + green_free(x, ystar)).epsilon(1e-13));
        CHECK(kd.eval(x, y) ==
              doctest::Approx(green_free(x, y) - green_free(x, ystar)).epsilon(1e-13));
    }
    SUBCASE("gradient matches finite differences") {
        for (int d : {2, 3}) {
            Eigen::MatrixXd b(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) b(i, j) = u(rng);
            const Eigen::MatrixXd A =
                b * b.transpose() + 0.4 * Eigen::MatrixXd::Identity(d, d);
            for (ImageType t : {ImageType::NeumannImage, ImageType::DirichletImage}) {
                const auto k = HalfSpaceKernel::make(A, t);
                Eigen::VectorXd x(d), y(d);
                for (int i = 0; i < d; ++i) {
                    x(i) = u(rng);
                    y(i) = u(rng);
                }
                x(d - 1) = -1.1;
                y(d - 1) = -0.4;
                const Eigen::VectorXd g = k.grad_y(x, y);
                const double h = 1e-6;
                for (int i = 0; i < d; ++i) {
                    Eigen::VectorXd yp = y, ym = y;
                    yp(i) += h;
                    ym(i) -= h;
                    const double fd = (k.eval(x, yp) - k.eval(x, ym)) / (2.0 * h);
                    CHECK(g(i) == doctest::Approx(fd).epsilon(5e-6));
                }
            }
        }
    }
}

TEST_CASE("homogeneous kernel classes") {
    SUBCASE("log-difference kernel has a class -1 gradient") {
        // analytic z-gradient of (1/pi c0) log|z| - (1/pi c(x)) log|m(x) z|
        DomainSpec spec;
        spec.gamma.value = [](Vec2 p) { return 1.4 + 0.3 * p[0]; };
        spec.gamma.lower = 1.0;
        spec.gamma.upper = 1.8;
        const auto flat = build_flattening(spec);
        const double g0 = spec.gamma({0.0, 0.0});
        auto grad = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
            const double s = flat.a_scalar({x(0), x(1)});
            Eigen::VectorXd g = z / z.squaredNorm();
            return Eigen::VectorXd(g * (1.0 / (M_PI * g0) - 1.0 / (M_PI * s)));
        };
        const auto rep = check_homogeneous_kernel_class1(grad, 2, 100, 5);
        CHECK(rep.parity_defect < 1e-12);
        CHECK(rep.homogeneity_defect < 1e-12);
    }
    SUBCASE("principal-value kernel z1/|z|^2 is class 0") {
        auto k = [](const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
            (void)x;
            return z(0) / z.squaredNorm();
        };
        const auto rep = check_homogeneous_kernel_class0(k, 2, 100, 6);
        CHECK(rep.parity_defect < 1e-12);
        CHECK(rep.homogeneity_defect < 1e-12);
    }
}
