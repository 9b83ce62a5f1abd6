#include "patchpert/quadrature.hpp"
#include "patchpert/errors.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace patchpert {

namespace {

// Golub-Welsch: nodes/weights from the symmetric Jacobi matrix of the
// orthogonal-polynomial recurrence.
QuadRule golub_welsch(const std::vector<double>& alpha,
                      const std::vector<double>& beta, double mu0) {
    const int n = static_cast<int>(alpha.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        J(i, i) = alpha[i];
        if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = std::sqrt(beta[i + 1]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    QuadRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        r.weights[i] = mu0 * v0 * v0;
    }
    return r;
}

} // namespace

QuadRule gauss_legendre(int n) { return gauss_jacobi(n, 0.0, 0.0); }

QuadRule gauss_jacobi(int n, double a, double b) {
    std::vector<double> alpha(n), beta(n);
    const double apb = a + b;
    for (int k = 0; k < n; ++k) {
        if (k == 0)
            alpha[k] = (b - a) / (apb + 2.0);
        else
            alpha[k] = (b * b - a * a) /
                       ((2.0 * k + apb) * (2.0 * k + apb + 2.0));
        if (k == 0) {
            beta[k] = 0.0; // unused
        } else if (k == 1) {
            beta[k] = 4.0 * (1.0 + a) * (1.0 + b) /
                      ((2.0 + apb) * (2.0 + apb) * (3.0 + apb));
        } else {
            beta[k] = 4.0 * k * (k + a) * (k + b) * (k + apb) /
                      ((2.0 * k + apb) * (2.0 * k + apb) * (2.0 * k + apb + 1.0) *
                       (2.0 * k + apb - 1.0));
        }
    }
    // mu0 = int (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
    const double mu0 = std::pow(2.0, apb + 1.0) *
                       std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(apb + 2.0));
    return golub_welsch(alpha, beta, mu0);
}

QuadRule gauss_chebyshev1(int n) {
    QuadRule r;
    r.nodes.resize(n);
    r.weights.assign(n, M_PI / n);
    for (int i = 0; i < n; ++i)
        r.nodes[i] = std::cos((2.0 * i + 1.0) * M_PI / (2.0 * n));
    return r;
}

QuadRule gauss_chebyshev2(int n) {
    QuadRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 1; i <= n; ++i) {
        const double t = i * M_PI / (n + 1.0);
        r.nodes[i - 1] = std::cos(t);
        r.weights[i - 1] = M_PI / (n + 1.0) * std::sin(t) * std::sin(t);
    }
    return r;
}

QuadRule mapped(const QuadRule& r, double a, double b) {
    QuadRule m = r;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        m.nodes[i] = mid + half * r.nodes[i];
        m.weights[i] = half * r.weights[i];
    }
    return m;
}

namespace {

// Gauss 7 / Kronrod 15 nodes and weights on (-1,1).
constexpr double kXgk[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,                0.207784955007898,
    0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr double kWk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kWg[7] = {0.129484966168870, 0.279705391489277,
                           0.381830050505119, 0.417959183673469,
                           0.381830050505119, 0.279705391489277,
                           0.129484966168870};

void gk15(const std::function<double(double)>& f, double a, double b,
          double& result, double& err, double& resabs) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double k = 0.0, g = 0.0, l1 = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double v = f(mid + half * kXgk[i]);
        k += kWk[i] * v;
        l1 += kWk[i] * std::abs(v);
        if (i % 2 == 1) g += kWg[i / 2] * v;
    }
    result = k * half;
    err = std::abs((k - g) * half);
    resabs = l1 * std::abs(half);
}

double adaptive_rec(const std::function<double(double)>& f, double a, double b,
                    double tol, int depth, int max_depth) {
    double res, err, resabs;
    gk15(f, a, b, res, err, resabs);
    // the roundoff floor stops the bisection once the panel error sits at the
    // noise level of the function evaluations
    if (err <= tol || err <= 1e-300 || err <= 5e-14 * resabs) return res;
    if (depth >= max_depth)
        throw QuadratureFailure("adaptive quadrature exceeded depth limit");
    const double mid = 0.5 * (a + b);
    return adaptive_rec(f, a, mid, 0.5 * tol, depth + 1, max_depth) +
           adaptive_rec(f, mid, b, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, int max_depth) {
    // coarse seed pass so the tolerance anchors to a sane magnitude even when
    // a single Kronrod panel badly under-samples a peak
    const int seed_panels = 32;
    double est = 0.0;
    for (int i = 0; i < seed_panels; ++i) {
        double r, e, l1;
        gk15(f, a + (b - a) * i / seed_panels, a + (b - a) * (i + 1) / seed_panels, r,
             e, l1);
        est += r;
    }
    const double tol = rel_tol * std::max(std::abs(est), 1e-30);
    double total = 0.0;
    for (int i = 0; i < seed_panels; ++i)
        total += adaptive_rec(f, a + (b - a) * i / seed_panels,
                              a + (b - a) * (i + 1) / seed_panels,
                              tol / seed_panels, 0, max_depth);
    return total;
}

} // namespace patchpert
