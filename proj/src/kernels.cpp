#include "patchpert/kernels.hpp"
#include "patchpert/errors.hpp"

#include <cmath>
#include <complex>
#include <random>

namespace patchpert {

double green_free(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const double r = (x - y).norm();
    if (r == 0.0) throw SingularEvaluation("green_free at x = y");
    if (x.size() == 2) return -std::log(r) / (2.0 * M_PI);
    if (x.size() == 3) return 1.0 / (4.0 * M_PI * r);
    throw UnsupportedGeometry("green_free supports d = 2, 3");
}

namespace {

Eigen::VectorXd grad2_green(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    // gradient of G(u, .) at v
    const Eigen::VectorXd d = v - u;
    const double r2 = d.squaredNorm();
    if (u.size() == 2) return -d / (2.0 * M_PI * r2);
    return -d / (4.0 * M_PI * r2 * std::sqrt(r2));
}

} // namespace

HalfSpaceKernel HalfSpaceKernel::make(const Eigen::MatrixXd& A, ImageType type) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw UnsupportedGeometry("half-space kernel needs a positive definite matrix");
    HalfSpaceKernel k;
    k.A = A;
    k.M = es.eigenvectors() *
          es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
          es.eigenvectors().transpose();
    k.type = type;
    return k;
}

Eigen::VectorXd HalfSpaceKernel::image_point(const Eigen::VectorXd& y) const {
    // reflection along the co-normal A e_d; in the M-coordinates this is the
    // Euclidean reflection of My across the mapped wall
    const int d = dim();
    const Eigen::VectorXd w = A.col(d - 1);
    return y - 2.0 * y(d - 1) / w(d - 1) * w;
}

double HalfSpaceKernel::eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    if ((x - y).norm() == 0.0) throw SingularEvaluation("half-space kernel at x = y");
    const double sgn = (type == ImageType::NeumannImage) ? 1.0 : -1.0;
    const double detM = std::abs(M.determinant());
    return detM * (green_free(M * x, M * y) + sgn * green_free(M * x, M * image_point(y)));
}

Eigen::VectorXd HalfSpaceKernel::grad_y(const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y) const {
    if ((x - y).norm() == 0.0) throw SingularEvaluation("half-space kernel at x = y");
    const int d = dim();
    const double sgn = (type == ImageType::NeumannImage) ? 1.0 : -1.0;
    const double detM = std::abs(M.determinant());
    Eigen::VectorXd ed = Eigen::VectorXd::Zero(d);
    ed(d - 1) = 1.0;
    const Eigen::VectorXd w = A.col(d - 1);
    // d(image)/dy = I - (2 / (e_d . A e_d)) (A e_d) e_d^T
    const Eigen::MatrixXd J =
        Eigen::MatrixXd::Identity(d, d) - 2.0 / w(d - 1) * w * ed.transpose();
    const Eigen::VectorXd g1 = M.transpose() * grad2_green(M * x, M * y);
    const Eigen::VectorXd g2 =
        J.transpose() * M.transpose() * grad2_green(M * x, M * image_point(y));
    return detM * (g1 + sgn * g2);
}

double CircleDensity::at(double theta) const {
    const int n = static_cast<int>(values.size());
    std::complex<double> acc(0.0, 0.0);
    const std::complex<double> i(0.0, 1.0);
    for (int k = -n / 2; k <= n / 2; ++k) {
        std::complex<double> c(0.0, 0.0);
        for (int j = 0; j < n; ++j)
            c += values[j] * std::exp(-i * (k * 2.0 * M_PI * j / n));
        c /= double(n);
        const double halve = (std::abs(k) == n / 2 && n % 2 == 0) ? 0.5 : 1.0;
        acc += halve * c * std::exp(i * (k * theta));
    }
    return acc.real();
}

double single_layer_circle(const CircleDensity& phi, const Eigen::Vector2d& x) {
    const int n = static_cast<int>(phi.values.size());
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * M_PI * j / n;
        const Eigen::Vector2d y(std::cos(t), std::sin(t));
        s += green_free(x, y) * phi.values[j];
    }
    return s * 2.0 * M_PI / n;
}

namespace {

Eigen::Vector2d grad_single_layer_circle(const CircleDensity& phi,
                                         const Eigen::Vector2d& x) {
    const int n = static_cast<int>(phi.values.size());
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * M_PI * j / n;
        const Eigen::Vector2d y(std::cos(t), std::sin(t));
        const Eigen::Vector2d r = x - y;
        g += -r / (2.0 * M_PI * r.squaredNorm()) * phi.values[j];
    }
    return g * 2.0 * M_PI / n;
}

Eigen::Vector2d grad_double_layer_circle(const CircleDensity& phi,
                                         const Eigen::Vector2d& x) {
    const int n = static_cast<int>(phi.values.size());
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * M_PI * j / n;
        const Eigen::Vector2d y(std::cos(t), std::sin(t));
        const Eigen::Vector2d ny = y; // outward normal of the unit circle
        const Eigen::Vector2d r = y - x;
        const double r2 = r.squaredNorm();
        // grad_x of  -(1/2pi) (y-x).n_y / |y-x|^2
        g += -(1.0 / (2.0 * M_PI)) *
             (-ny / r2 + 2.0 * r.dot(ny) * r / (r2 * r2)) * phi.values[j];
    }
    return g * 2.0 * M_PI / n;
}

} // namespace

double double_layer_circle(const CircleDensity& phi, const Eigen::Vector2d& x) {
    const int n = static_cast<int>(phi.values.size());
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * M_PI * j / n;
        const Eigen::Vector2d y(std::cos(t), std::sin(t));
        const Eigen::Vector2d ny = y;
        const Eigen::Vector2d r = y - x;
        s += -(1.0 / (2.0 * M_PI)) * r.dot(ny) / r.squaredNorm() * phi.values[j];
    }
    return s * 2.0 * M_PI / n;
}

double richardson3(double v4h, double v2h, double vh) {
    return v4h / 3.0 - 2.0 * v2h + 8.0 * vh / 3.0;
}

namespace {

template <class Eval>
JumpCheck one_sided(const Eval& at_offset, double h) {
    JumpCheck jc;
    jc.outer = richardson3(at_offset(4.0 * h), at_offset(2.0 * h), at_offset(h));
    jc.inner = richardson3(at_offset(-4.0 * h), at_offset(-2.0 * h), at_offset(-h));
    return jc;
}

} // namespace

JumpCheck trace_jump_single_layer(const CircleDensity& phi, double theta, double h) {
    const Eigen::Vector2d p(std::cos(theta), std::sin(theta));
    return one_sided([&](double t) { return single_layer_circle(phi, p + t * p); }, h);
}

JumpCheck flux_jump_single_layer(const CircleDensity& phi, double theta, double h) {
    const Eigen::Vector2d p(std::cos(theta), std::sin(theta));
    return one_sided(
        [&](double t) { return grad_single_layer_circle(phi, p + t * p).dot(p); }, h);
}

JumpCheck trace_jump_double_layer(const CircleDensity& phi, double theta, double h) {
    const Eigen::Vector2d p(std::cos(theta), std::sin(theta));
    return one_sided([&](double t) { return double_layer_circle(phi, p + t * p); }, h);
}

JumpCheck flux_jump_double_layer(const CircleDensity& phi, double theta, double h) {
    const Eigen::Vector2d p(std::cos(theta), std::sin(theta));
    return one_sided(
        [&](double t) { return grad_double_layer_circle(phi, p + t * p).dot(p); }, h);
}

HomogeneityReport check_homogeneous_kernel_class0(
    const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& K,
    int d, int n_samples, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ts(0.2, 5.0);
    HomogeneityReport rep;
    for (int s = 0; s < n_samples; ++s) {
        Eigen::VectorXd x(d), z(d);
        for (int i = 0; i < d; ++i) x(i) = 0.3 * u(rng);
        do {
            for (int i = 0; i < d; ++i) z(i) = u(rng);
        } while (z.norm() < 1e-3);
        z.normalize();
        const double t = ts(rng);
        const double k0 = K(x, z);
        const double scale = std::max(std::abs(k0), 1e-12);
        rep.parity_defect = std::max(rep.parity_defect, std::abs(K(x, -z) + k0) / scale);
        rep.homogeneity_defect =
            std::max(rep.homogeneity_defect,
                     std::abs(K(x, t * z) - std::pow(t, -(d - 1.0)) * k0) / scale);
    }
    return rep;
}

HomogeneityReport check_homogeneous_kernel_class1(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>&
        grad_z,
    int d, int n_samples, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ts(0.2, 5.0);
    HomogeneityReport rep;
    for (int s = 0; s < n_samples; ++s) {
        Eigen::VectorXd x(d), z(d);
        for (int i = 0; i < d; ++i) x(i) = 0.3 * u(rng);
        do {
            for (int i = 0; i < d; ++i) z(i) = u(rng);
        } while (z.norm() < 1e-3);
        z.normalize();
        const double t = ts(rng);
        const Eigen::VectorXd g0 = grad_z(x, z);
        const double scale = std::max(g0.norm(), 1e-12);
        rep.parity_defect =
            std::max(rep.parity_defect, (grad_z(x, -z) + g0).norm() / scale);
        rep.homogeneity_defect =
            std::max(rep.homogeneity_defect,
                     (grad_z(x, t * z) - std::pow(t, -(d - 1.0)) * g0).norm() / scale);
    }
    return rep;
}

} // namespace patchpert
