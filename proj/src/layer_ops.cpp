#include "patchpert/layer_ops.hpp"
#include "patchpert/errors.hpp"
#include "patchpert/parallel.hpp"
#include "patchpert/quadrature.hpp"

#include <cmath>
#include <ostream>
#include <random>

namespace patchpert {

double jacobi_eval(int n, double a, double b, double t) {
    if (n == 0) return 1.0;
    double p0 = 1.0;
    double p1 = 0.5 * ((a + b + 2.0) * t + (a - b));
    for (int k = 2; k <= n; ++k) {
        const double c1 = 2.0 * k * (k + a + b) * (2.0 * k + a + b - 2.0);
        const double c2 = (2.0 * k + a + b - 1.0) *
                          ((2.0 * k + a + b) * (2.0 * k + a + b - 2.0) * t + a * a - b * b);
        const double c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + a + b);
        const double p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

namespace {

double jacobi_norm2(int n, double a, double b) {
    // int_{-1}^{1} (1-t)^a (1+t)^b P_n^2 dt
    return std::pow(2.0, a + b + 1.0) / (2.0 * n + a + b + 1.0) *
           std::exp(std::lgamma(n + a + 1.0) + std::lgamma(n + b + 1.0) -
                    std::lgamma(n + a + b + 1.0) - std::lgamma(n + 1.0));
}

double cheb_t(int k, double theta) { return std::cos(k * theta); }
double cheb_u(int km1, double theta) {
    // U_{km1}(cos theta) = sin((km1+1) theta)/sin(theta)
    return std::sin((km1 + 1.0) * theta) / std::sin(theta);
}

// segment eigenvalues in the matched Chebyshev bases
double s1_segment_eig(int k) { return k == 0 ? 0.5 * std::log(2.0) : 0.5 / k; }
double r1_segment_eig(int k) { return -0.5 * k; } // k >= 1, U_{k-1} basis

// disk eigenvalues in the weighted Jacobi bases (see op_S1/op_R1)
double s1_disk_eig(int m, int n) {
    return 0.25 * std::exp(std::lgamma(n + 0.5) + std::lgamma(n + m + 0.5) -
                           std::lgamma(n + 1.0) - std::lgamma(n + m + 1.0));
}
double r1_disk_eig(int m, int n) {
    // normalized by the flat-disk dipole equilibrium R1[-(1/pi) sqrt(1-r^2)] = 1
    return -4.0 * std::exp(std::lgamma(n + 1.5) + std::lgamma(n + m + 1.5) -
                           std::lgamma(n + 1.0) - std::lgamma(n + m + 1.0));
}

struct SegmentGrid {
    std::vector<double> x;      // nodes
    std::vector<double> theta;  // acos(x)
    Eigen::VectorXd pair_w;
};

SegmentGrid segment_grid(int n, WeightClass wc) {
    SegmentGrid g;
    g.x.resize(n);
    g.theta.resize(n);
    g.pair_w.resize(n);
    if (wc == WeightClass::InverseSqrt) {
        for (int i = 0; i < n; ++i) {
            g.theta[i] = (2.0 * i + 1.0) * M_PI / (2.0 * n);
            g.x[i] = std::cos(g.theta[i]);
            g.pair_w(i) = M_PI / n * std::sin(g.theta[i]); // (pi/n) sqrt(1-x^2)
        }
    } else if (wc == WeightClass::Sqrt) {
        for (int i = 1; i <= n; ++i) {
            const double t = i * M_PI / (n + 1.0);
            g.theta[i - 1] = t;
            g.x[i - 1] = std::cos(t);
            g.pair_w(i - 1) = M_PI / (n + 1.0) * std::sin(t); // w2_i / sqrt(1-x^2)
        }
    } else {
        const QuadRule q = gauss_legendre(n);
        for (int i = 0; i < n; ++i) {
            g.x[i] = q.nodes[i];
            g.theta[i] = std::acos(q.nodes[i]);
            g.pair_w(i) = q.weights[i];
        }
    }
    return g;
}

KernelMatrix segment_operator(OperatorTag tag, int n, bool parallel) {
    const bool hyper = (tag == OperatorTag::R1_2D);
    KernelMatrix op;
    op.tag = tag;
    op.geometry = RefGeometry::Segment;
    op.domain_class = hyper ? WeightClass::Sqrt : WeightClass::InverseSqrt;
    const SegmentGrid g = segment_grid(n, op.domain_class);
    op.node_x = g.x;
    op.pair_w = g.pair_w;
    op.K.resize(n, n);
    // mode tables: K(i,j) = sum_k eig_k B_k(x_i) B_k(x_j) / ||B_k||^2 with the
    // matched Chebyshev family B, truncated at the grid resolution
    Eigen::MatrixXd modes(n, n); // (k, i), already eigenvalue/norm scaled row-wise
    Eigen::MatrixXd raw(n, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            const double b = hyper ? cheb_u(k, g.theta[i]) : cheb_t(k, g.theta[i]);
            raw(k, i) = b;
            const double eig = hyper ? r1_segment_eig(k + 1) : s1_segment_eig(k);
            const double norm2 = (!hyper && k == 0) ? M_PI : M_PI / 2.0;
            modes(k, i) = b * eig / norm2;
        }
    auto fill_row = [&](std::size_t i) {
        for (int j = 0; j < n; ++j)
            op.K(static_cast<int>(i), j) = raw.col(static_cast<int>(i)).dot(modes.col(j));
    };
    if (parallel)
        parallel_for(static_cast<std::size_t>(n), fill_row);
    else
        serial_for(static_cast<std::size_t>(n), fill_row);
    return op;
}

struct DiskGrid {
    Eigen::VectorXd t, v;      // radial Gauss-Jacobi rule in t = 2r^2-1
    std::vector<double> r;
    std::vector<double> theta; // azimuthal grid
    Eigen::VectorXd pair_w;    // per flattened node (i_r * n_theta + j)
    Eigen::VectorXd psi_w;     // weighted-quadrature weights for projections
};

DiskGrid disk_grid(int n_r, int n_theta, double a) {
    DiskGrid g;
    const QuadRule q = gauss_jacobi(n_r, a, 0.0);
    g.t.resize(n_r);
    g.v.resize(n_r);
    g.r.resize(n_r);
    for (int i = 0; i < n_r; ++i) {
        g.t(i) = q.nodes[i];
        g.v(i) = q.weights[i];
        g.r[i] = std::sqrt(0.5 * (1.0 + q.nodes[i]));
    }
    g.theta.resize(n_theta);
    for (int j = 0; j < n_theta; ++j) g.theta[j] = 2.0 * M_PI * j / n_theta;
    g.pair_w.resize(n_r * n_theta);
    g.psi_w.resize(n_r * n_theta);
    const double c = 0.25 * std::pow(2.0, -a) * 2.0 * M_PI / n_theta;
    for (int i = 0; i < n_r; ++i) {
        const double rim = std::pow(1.0 - g.r[i] * g.r[i], -a);
        for (int j = 0; j < n_theta; ++j) {
            g.psi_w(i * n_theta + j) = c * g.v(i);
            g.pair_w(i * n_theta + j) = c * g.v(i) * rim;
        }
    }
    return g;
}

KernelMatrix disk_operator(OperatorTag tag, int n, bool parallel) {
    const bool hyper = (tag == OperatorTag::R1_3D);
    const double a = hyper ? 0.5 : -0.5;
    const int n_r = n, n_theta = n;
    if (n_theta % 2 != 0) throw UnsupportedGeometry("disk grid needs even azimuthal count");
    KernelMatrix op;
    op.tag = tag;
    op.geometry = RefGeometry::Disk;
    op.domain_class = hyper ? WeightClass::Sqrt : WeightClass::InverseSqrt;
    op.n_r = n_r;
    op.n_theta = n_theta;
    op.jacobi_a = a;
    const DiskGrid g = disk_grid(n_r, n_theta, a);
    op.radial_t = g.t;
    op.radial_v = g.v;
    op.pair_w = g.pair_w;
    const int ntot = n_r * n_theta;
    op.node_x.resize(ntot);
    op.node_theta.resize(ntot);
    for (int i = 0; i < n_r; ++i)
        for (int j = 0; j < n_theta; ++j) {
            op.node_x[i * n_theta + j] = g.r[i];
            op.node_theta[i * n_theta + j] = g.theta[j];
        }

    const int m_max = n_theta / 2;
    op.sigma.resize(m_max + 1, n_r);
    op.h_rad.resize(m_max + 1, n_r);
    Eigen::MatrixXd rpow(m_max + 1, n_r); // r_i^m
    for (int m = 0; m <= m_max; ++m)
        for (int i = 0; i < n_r; ++i) rpow(m, i) = std::pow(g.r[i], m);
    std::vector<Eigen::MatrixXd> radial_modes(m_max + 1); // R_mn(r_i), (n, i)
    for (int m = 0; m <= m_max; ++m) {
        radial_modes[m].resize(n_r, n_r);
        for (int nn = 0; nn < n_r; ++nn) {
            op.sigma(m, nn) = hyper ? r1_disk_eig(m, nn) : s1_disk_eig(m, nn);
            op.h_rad(m, nn) = 0.25 * std::pow(2.0, -a - m) * jacobi_norm2(nn, a, m);
            for (int i = 0; i < n_r; ++i)
                radial_modes[m](nn, i) = rpow(m, i) * jacobi_eval(nn, a, m, g.t(i));
        }
    }

    // mode kernels G_m(a,b) = sum_n sigma R R / (2 pi h)
    std::vector<Eigen::MatrixXd> gm(m_max + 1);
    auto build_mode = [&](std::size_t m) {
        Eigen::MatrixXd scaled = radial_modes[m];
        for (int nn = 0; nn < n_r; ++nn)
            scaled.row(nn) *= op.sigma(static_cast<int>(m), nn) /
                              (2.0 * M_PI * op.h_rad(static_cast<int>(m), nn));
        gm[m] = radial_modes[m].transpose() * scaled;
    };
    if (parallel)
        parallel_for(static_cast<std::size_t>(m_max + 1), build_mode);
    else
        serial_for(static_cast<std::size_t>(m_max + 1), build_mode);

    // azimuthal cosine table over the n_theta possible index offsets
    Eigen::MatrixXd ct(m_max + 1, n_theta);
    for (int m = 0; m <= m_max; ++m)
        for (int dj = 0; dj < n_theta; ++dj)
            ct(m, dj) = std::cos(2.0 * M_PI * m * dj / n_theta);

    op.K.resize(ntot, ntot);
    auto fill_row = [&](std::size_t p) {
        const int ip = static_cast<int>(p) / n_theta;
        const int jp = static_cast<int>(p) % n_theta;
        for (int q = 0; q < ntot; ++q) {
            const int iq = q / n_theta;
            const int jq = q % n_theta;
            const int dj = (jp - jq + n_theta) % n_theta;
            double s = gm[0](ip, iq);
            for (int m = 1; m < m_max; ++m) s += 2.0 * ct(m, dj) * gm[m](ip, iq);
            s += ct(m_max, dj) * gm[m_max](ip, iq);
            op.K(static_cast<int>(p), q) = s;
        }
    };
    if (parallel)
        parallel_for(static_cast<std::size_t>(ntot), fill_row);
    else
        serial_for(static_cast<std::size_t>(ntot), fill_row);
    return op;
}

} // namespace

BoundaryDensity make_density_segment(int n, WeightClass wc,
                                     const std::function<double(double)>& phi) {
    const SegmentGrid g = segment_grid(n, wc);
    BoundaryDensity d;
    d.geometry = RefGeometry::Segment;
    d.weight_class = wc;
    d.x = g.x;
    d.weights = g.pair_w;
    d.values.resize(n);
    for (int i = 0; i < n; ++i) d.values(i) = phi(g.x[i]);
    return d;
}

BoundaryDensity make_density_disk(int n, WeightClass wc,
                                  const std::function<double(double, double)>& phi) {
    const double a = (wc == WeightClass::Sqrt) ? 0.5 : (wc == WeightClass::InverseSqrt ? -0.5 : 0.0);
    const DiskGrid g = disk_grid(n, n, a);
    BoundaryDensity d;
    d.geometry = RefGeometry::Disk;
    d.weight_class = wc;
    d.x.resize(n * n);
    d.theta.resize(n * n);
    d.values.resize(n * n);
    d.weights = g.pair_w;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            d.x[i * n + j] = g.r[i];
            d.theta[i * n + j] = g.theta[j];
            d.values(i * n + j) = phi(g.r[i], g.theta[j]);
        }
    return d;
}

KernelMatrix op_S1(RefGeometry geometry, int n, bool parallel) {
    if (n < 4) throw UnsupportedGeometry("op_S1 needs n >= 4");
    return geometry == RefGeometry::Segment
               ? segment_operator(OperatorTag::S1_2D, n, parallel)
               : disk_operator(OperatorTag::S1_3D, n, parallel);
}

KernelMatrix op_R1(RefGeometry geometry, int n, bool parallel) {
    if (n < 4) throw UnsupportedGeometry("op_R1 needs n >= 4");
    return geometry == RefGeometry::Segment
               ? segment_operator(OperatorTag::R1_2D, n, parallel)
               : disk_operator(OperatorTag::R1_3D, n, parallel);
}

Eigen::VectorXd apply(const KernelMatrix& op, const BoundaryDensity& phi) {
    Eigen::VectorXd out = op.K * op.pair_w.cwiseProduct(phi.values).eval();
    if (op.row_scale.size() > 0) out = op.row_scale.cwiseProduct(out);
    if (op.row_shift.size() > 0) out += op.row_shift * op.pair_w.dot(phi.values);
    return out;
}

namespace {

// Segment solve in the matched Chebyshev basis: expand the right-hand side,
// divide by the eigenvalues, reattach the endpoint weight.
BoundaryDensity segment_solve(const KernelMatrix& op, const Eigen::VectorXd& rhs,
                              bool hyper) {
    const int n = op.size();
    SegmentGrid g = segment_grid(n, op.domain_class);
    BoundaryDensity out;
    out.geometry = RefGeometry::Segment;
    out.weight_class = op.domain_class;
    out.x = op.node_x;
    out.weights = op.pair_w;
    out.values.setZero(n);
    if (!hyper) {
        std::vector<double> psi(n, 0.0);
        for (int k = 0; k < n; ++k) {
            double a = 0.0;
            for (int j = 0; j < n; ++j) a += rhs(j) * cheb_t(k, g.theta[j]);
            a *= (k == 0 ? 1.0 : 2.0) / n;
            const double c = a / s1_segment_eig(k);
            for (int i = 0; i < n; ++i) psi[i] += c * cheb_t(k, g.theta[i]);
        }
        for (int i = 0; i < n; ++i)
            out.values(i) = psi[i] / std::sin(g.theta[i]); // psi / sqrt(1-x^2)
    } else {
        std::vector<double> psi(n, 0.0);
        for (int k = 1; k <= n; ++k) {
            double c = 0.0;
            for (int j = 0; j < n; ++j) {
                const double w2 = M_PI / (n + 1.0) * std::pow(std::sin(g.theta[j]), 2);
                c += w2 * rhs(j) * cheb_u(k - 1, g.theta[j]);
            }
            c *= 2.0 / M_PI;
            const double d = c / r1_segment_eig(k);
            for (int i = 0; i < n; ++i) psi[i] += d * cheb_u(k - 1, g.theta[i]);
        }
        for (int i = 0; i < n; ++i)
            out.values(i) = psi[i] * std::sin(g.theta[i]); // psi * sqrt(1-x^2)
    }
    return out;
}

// Disk solve by orthogonal projection in the rim-weighted inner product.
BoundaryDensity disk_solve(const KernelMatrix& op, const Eigen::VectorXd& rhs) {
    const int n_r = op.n_r, n_theta = op.n_theta, m_max = n_theta / 2;
    const DiskGrid g = disk_grid(n_r, n_theta, op.jacobi_a);
    BoundaryDensity out;
    out.geometry = RefGeometry::Disk;
    out.weight_class = op.domain_class;
    out.x = op.node_x;
    out.theta = op.node_theta;
    out.weights = op.pair_w;
    out.values.setZero(n_r * n_theta);

    // azimuthal transform: cos/sin components per mode at each radius
    Eigen::MatrixXd gc(m_max + 1, n_r), gs(m_max + 1, n_r);
    gc.setZero();
    gs.setZero();
    for (int m = 0; m <= m_max; ++m)
        for (int i = 0; i < n_r; ++i) {
            double cc = 0.0, ss = 0.0;
            for (int j = 0; j < n_theta; ++j) {
                cc += rhs(i * n_theta + j) * std::cos(m * g.theta[j]);
                ss += rhs(i * n_theta + j) * std::sin(m * g.theta[j]);
            }
            const double fac = (m == 0 || m == m_max) ? 1.0 : 2.0;
            gc(m, i) = fac * cc / n_theta;
            gs(m, i) = fac * ss / n_theta;
        }

    // radial projection in the weighted inner product, divide by eigenvalue,
    // evaluate; reattach the rim weight.
    const double c0 = 0.25 * std::pow(2.0, -op.jacobi_a);
    for (int m = 0; m <= m_max; ++m) {
        for (int nn = 0; nn < n_r; ++nn) {
            double dc = 0.0, ds = 0.0;
            for (int i = 0; i < n_r; ++i) {
                const double R = std::pow(g.r[i], m) * jacobi_eval(nn, op.jacobi_a, m, g.t(i));
                dc += c0 * g.v(i) * gc(m, i) * R;
                ds += c0 * g.v(i) * gs(m, i) * R;
            }
            dc /= op.h_rad(m, nn) * op.sigma(m, nn);
            ds /= op.h_rad(m, nn) * op.sigma(m, nn);
            for (int i = 0; i < n_r; ++i) {
                const double R = std::pow(g.r[i], m) * jacobi_eval(nn, op.jacobi_a, m, g.t(i));
                const double rim = std::pow(1.0 - g.r[i] * g.r[i], op.jacobi_a);
                for (int j = 0; j < n_theta; ++j)
                    out.values(i * n_theta + j) +=
                        rim * R * (dc * std::cos(m * g.theta[j]) + ds * std::sin(m * g.theta[j]));
            }
        }
    }
    return out;
}

} // namespace

double condition_estimate(const KernelMatrix& op) {
    if (op.geometry == RefGeometry::Segment) {
        const int n = op.size();
        double lo = 1e300, hi = 0.0;
        const bool hyper = (op.tag == OperatorTag::R1_2D);
        for (int k = hyper ? 1 : 0; k <= (hyper ? n : n - 1); ++k) {
            const double e = std::abs(hyper ? r1_segment_eig(k) : s1_segment_eig(k));
            lo = std::min(lo, e);
            hi = std::max(hi, e);
        }
        return hi / lo;
    }
    const double lo = op.sigma.cwiseAbs().minCoeff();
    const double hi = op.sigma.cwiseAbs().maxCoeff();
    return hi / lo;
}

BoundaryDensity solve_S1(const KernelMatrix& op, const BoundaryDensity& rhs) {
    if (op.tag != OperatorTag::S1_2D && op.tag != OperatorTag::S1_3D)
        throw UnsupportedGeometry("solve_S1 expects an S1 matrix");
    if (condition_estimate(op) > 1e12) throw IllConditioned("S1 condition estimate > 1e12");
    return op.geometry == RefGeometry::Segment ? segment_solve(op, rhs.values, false)
                                               : disk_solve(op, rhs.values);
}

BoundaryDensity solve_R1(const KernelMatrix& op, const BoundaryDensity& rhs) {
    if (op.tag != OperatorTag::R1_2D && op.tag != OperatorTag::R1_3D)
        throw UnsupportedGeometry("solve_R1 expects an R1 matrix");
    if (condition_estimate(op) > 1e12) throw IllConditioned("R1 condition estimate > 1e12");
    return op.geometry == RefGeometry::Segment ? segment_solve(op, rhs.values, true)
                                               : disk_solve(op, rhs.values);
}

double inverse_mean(const KernelMatrix& s1, const Eigen::VectorXd& rhs_values) {
    BoundaryDensity rhs;
    rhs.values = rhs_values;
    return solve_S1(s1, rhs).pair_with_one();
}

KernelMatrix op_Veps(double eps, double gamma0, int n) {
    if (!(eps > 0.0 && eps < 1.0)) throw UnsupportedGeometry("op_Veps needs 0 < eps < 1");
    if (!(gamma0 > 0.0)) throw UnsupportedGeometry("op_Veps needs gamma0 > 0");
    KernelMatrix op = segment_operator(OperatorTag::S1_2D, n, true);
    op.tag = OperatorTag::Veps;
    op.eps = eps;
    op.alpha = 0.5 * std::log(gamma0);
    const double c = std::abs(std::log(eps)) + op.alpha;
    op.K = (2.0 * M_PI) * op.K + c * Eigen::MatrixXd::Ones(n, n);
    return op;
}

VepsIdentityReport veps_inverse_identities(const KernelMatrix& veps, unsigned seed) {
    const int n = veps.size();
    const double c = std::abs(std::log(veps.eps)) + veps.alpha;
    KernelMatrix s1 = op_S1(RefGeometry::Segment, n);

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VepsIdentityReport rep;

    BoundaryDensity ones;
    ones.values = Eigen::VectorXd::Ones(n);
    const BoundaryDensity s1_inv_1 = solve_S1(s1, ones);
    const double mean_s1_inv_1 = s1_inv_1.pair_with_one(); // = 2 pi / log 2

    for (int trial = 0; trial < 5; ++trial) {
        // smooth random right-hand side (low-order Chebyshev combination)
        std::array<double, 6> coef;
        for (auto& cc : coef) cc = u(rng);
        Eigen::VectorXd gv(n);
        for (int i = 0; i < n; ++i) {
            const double x = veps.node_x[i];
            double tkm1 = 1.0, tk = x, s = coef[0] + coef[1] * x;
            for (int k = 2; k < 6; ++k) {
                const double tk1 = 2.0 * x * tk - tkm1;
                s += coef[k] * tk1;
                tkm1 = tk;
                tk = tk1;
            }
            gv(i) = s;
        }
        BoundaryDensity g;
        g.values = gv;
        const BoundaryDensity s1_inv_g = solve_S1(s1, g);

        // rank-one inversion formula
        const double num = c * s1_inv_g.pair_with_one();
        const double den = 2.0 * M_PI + c * mean_s1_inv_1;
        Eigen::VectorXd phi =
            (s1_inv_g.values - (num / den) * s1_inv_1.values) / (2.0 * M_PI);

        BoundaryDensity phid;
        phid.values = phi;
        phid.weights = veps.pair_w;
        const Eigen::VectorXd back = apply(veps, phid);
        rep.inverse_resid = std::max(
            rep.inverse_resid, (back - gv).cwiseAbs().maxCoeff() / gv.cwiseAbs().maxCoeff());

        const double mean_direct = veps.pair_w.dot(phi);
        const double mean_formula = s1_inv_g.pair_with_one() / den;
        rep.mean_formula_resid =
            std::max(rep.mean_formula_resid,
                     std::abs(mean_direct - mean_formula) /
                         std::max(std::abs(mean_formula), 1e-30));
    }
    return rep;
}

namespace {

KernelMatrix teps_common(const FlatteningMap& f, double eps, int n, int d, bool neumann) {
    if (d != 2 && d != 3) throw UnsupportedGeometry("T_eps supports d = 2, 3");
    KernelMatrix base = neumann
                            ? op_R1(d == 2 ? RefGeometry::Segment : RefGeometry::Disk, n)
                            : op_S1(d == 2 ? RefGeometry::Segment : RefGeometry::Disk, n);
    KernelMatrix op = base;
    op.eps = eps;
    const int ntot = op.size();
    op.row_scale.resize(ntot);
    if (!neumann && d == 2) op.row_shift.resize(ntot);
    for (int i = 0; i < ntot; ++i) {
        // boundary point of the half-plane picture at scale eps
        Vec2 y{};
        if (d == 2) {
            y = {eps * op.node_x[i], 0.0};
        } else {
            // kernel-level 3D: local conductivity sampled along the first axis
            y = {eps * op.node_x[i] * std::cos(op.node_theta[i]), 0.0};
        }
        const double s = f.a_scalar(y);
        if (neumann) {
            op.row_scale(i) = 2.0 * s / std::pow(eps, d);
            op.tag = (d == 2) ? OperatorTag::TepsNeumann2D : OperatorTag::TepsNeumann3D;
        } else if (d == 2) {
            op.row_scale(i) = 2.0 / s;
            op.row_shift(i) = (std::abs(std::log(eps)) + 0.5 * std::log(s)) / (M_PI * s);
            op.tag = OperatorTag::TepsDirichlet2D;
        } else {
            op.row_scale(i) = 2.0 / (eps * s);
            op.tag = OperatorTag::TepsDirichlet3D;
        }
    }
    op.symmetric_kernel = false;
    return op;
}

} // namespace

KernelMatrix op_Teps_dirichlet(const FlatteningMap& f, double eps, int n, int d) {
    return teps_common(f, eps, n, d, false);
}

KernelMatrix op_Teps_neumann(const FlatteningMap& f, double eps, int n, int d) {
    return teps_common(f, eps, n, d, true);
}

double op_norm2(const Eigen::MatrixXd& m) {
    // power iteration on m^T m, deterministic start
    Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(m.cols(), 1.0, 2.0).normalized();
    double norm = 0.0;
    for (int it = 0; it < 60; ++it) {
        v = m.transpose() * (m * v).eval();
        norm = std::sqrt(v.norm());
        if (v.norm() == 0.0) return 0.0;
        v.normalize();
    }
    return norm;
}

double teps_residual_dirichlet(const FlatteningMap& f, double eps, int n, int d) {
    const KernelMatrix t = op_Teps_dirichlet(f, eps, n, d);
    const KernelMatrix s1 =
        op_S1(d == 2 ? RefGeometry::Segment : RefGeometry::Disk, n);
    const double g0 = f.gamma({0.0, 0.0});
    const int ntot = t.size();
    // dense operator acting on density values
    Eigen::MatrixXd top = t.row_scale.asDiagonal() * t.K * t.pair_w.asDiagonal();
    if (t.row_shift.size() > 0)
        top += t.row_shift * t.pair_w.transpose();
    Eigen::MatrixXd lim;
    if (d == 2) {
        const double alpha = 0.5 * std::log(g0);
        lim = (2.0 / g0) * s1.K * s1.pair_w.asDiagonal();
        lim += ((std::abs(std::log(eps)) + alpha) / (M_PI * g0)) *
               Eigen::VectorXd::Ones(ntot) * s1.pair_w.transpose();
        return op_norm2(top - lim);
    }
    lim = (2.0 / (eps * g0)) * s1.K * s1.pair_w.asDiagonal();
    return eps * op_norm2(top - lim);
}

double teps_residual_neumann(const FlatteningMap& f, double eps, int n, int d) {
    const KernelMatrix t = op_Teps_neumann(f, eps, n, d);
    const KernelMatrix r1 =
        op_R1(d == 2 ? RefGeometry::Segment : RefGeometry::Disk, n);
    const double g0 = f.gamma({0.0, 0.0});
    Eigen::MatrixXd top = t.row_scale.asDiagonal() * t.K * t.pair_w.asDiagonal();
    Eigen::MatrixXd lim =
        (2.0 * g0 / std::pow(eps, d)) * r1.K * r1.pair_w.asDiagonal();
    return std::pow(eps, d) * op_norm2(top - lim);
}

void dump_matrix(const KernelMatrix& op, std::ostream& out) {
    out << "# kernel matrix tag=" << static_cast<int>(op.tag)
        << " n=" << op.size() << " eps=" << op.eps << "\n";
    out << "# row col value\n";
    for (int i = 0; i < op.size(); ++i)
        for (int j = 0; j < op.size(); ++j)
            out << i << " " << j << " " << op.K(i, j) << "\n";
}

void dump_density(const BoundaryDensity& d, std::ostream& out) {
    out << "# density nodes=" << d.size() << " class="
        << static_cast<int>(d.weight_class) << "\n";
    out << "# x theta value weight\n";
    for (int i = 0; i < d.size(); ++i)
        out << d.x[i] << " " << (d.theta.empty() ? 0.0 : d.theta[i]) << " "
            << d.values(i) << " " << d.weights(i) << "\n";
}

} // namespace patchpert
