#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "patchpert/errors.hpp"
#include "patchpert/quadrature.hpp"

#include <doctest.h>
#include <cmath>

using namespace patchpert;

namespace {
double apply(const QuadRule& q, const std::function<double(double)>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * f(q.nodes[i]);
    return s;
}
} // namespace

TEST_CASE("gauss rules integrate their weight classes exactly") {
    SUBCASE("legendre polynomial exactness") {
        const QuadRule q = gauss_legendre(6);
        CHECK(apply(q, [](double) { return 1.0; }) == doctest::Approx(2.0));
        CHECK(apply(q, [](double x) { return x * x; }) == doctest::Approx(2.0 / 3.0));
        // degree 11 is the highest exact one
        CHECK(apply(q, [](double x) { return std::pow(x, 10); }) ==
              doctest::Approx(2.0 / 11.0).epsilon(1e-13));
    }
    SUBCASE("jacobi(-1/2,0) matches the chebyshev closed forms") {
        const QuadRule q = gauss_jacobi(8, -0.5, 0.0);
        // int (1-t)^{-1/2} dt = 2 sqrt(2); int t (1-t)^{-1/2} dt = 2 sqrt(2)/3
        CHECK(apply(q, [](double) { return 1.0; }) ==
              doctest::Approx(2.0 * std::sqrt(2.0)));
        CHECK(apply(q, [](double t) { return t; }) ==
              doctest::Approx(2.0 * std::sqrt(2.0) / 3.0));
    }
    SUBCASE("chebyshev first kind") {
        const QuadRule q = gauss_chebyshev1(16);
        CHECK(apply(q, [](double) { return 1.0; }) == doctest::Approx(M_PI));
        CHECK(apply(q, [](double x) { return x * x; }) == doctest::Approx(M_PI / 2.0));
    }
    SUBCASE("chebyshev second kind") {
        const QuadRule q = gauss_chebyshev2(16);
        CHECK(apply(q, [](double) { return 1.0; }) == doctest::Approx(M_PI / 2.0));
        CHECK(apply(q, [](double x) { return x * x; }) == doctest::Approx(M_PI / 8.0));
    }
}

TEST_CASE("adaptive quadrature") {
    SUBCASE("smooth integrand") {
        const double v = adaptive_quad([](double x) { return std::exp(x); }, 0.0, 1.0,
                                       1e-12);
        CHECK(v == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
    }
    SUBCASE("sharp interior peak") {
        const double d = 1e-6;
        const double v = adaptive_quad(
            [&](double x) { return 1.0 / (x * x + d * d); }, -1.0, 1.0, 1e-9);
        const double exact = 2.0 * std::atan(1.0 / d) / d;
        CHECK(v == doctest::Approx(exact).epsilon(1e-8));
    }
    SUBCASE("depth limit failure is reported") {
        // integrable but too sharp for the allotted depth
        CHECK_THROWS_AS(adaptive_quad([](double x) {
                            return 1.0 / std::sqrt(std::abs(x - 0.3317277));
                        },
                        0.0, 1.0, 1e-13, 8),
                        QuadratureFailure);
    }
}
