#pragma once
#include <functional>
#include <vector>

namespace patchpert {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre on (-1, 1).
QuadRule gauss_legendre(int n);

// Gauss-Jacobi on (-1, 1) for the weight (1-x)^a (1+x)^b.
QuadRule gauss_jacobi(int n, double a, double b);

// Gauss-Chebyshev, first kind: weight (1-x^2)^{-1/2}, nodes cos((2i-1)pi/2n).
QuadRule gauss_chebyshev1(int n);

// Gauss-Chebyshev, second kind: weight (1-x^2)^{1/2}, nodes cos(i pi/(n+1)).
QuadRule gauss_chebyshev2(int n);

// Map a rule from (-1,1) to (a,b).
QuadRule mapped(const QuadRule& r, double a, double b);

// Adaptive Gauss-Kronrod style quadrature (embedded G7/K15 pair) with
// recursive bisection. Throws QuadratureFailure past max_depth.
double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, int max_depth = 30);

} // namespace patchpert
