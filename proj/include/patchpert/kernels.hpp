#pragma once
#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace patchpert {

// Free-space fundamental solution of -Laplace: -(1/2pi) log|x-y| (d=2),
// 1/(4pi|x-y|) (d=3). Throws SingularEvaluation at x = y.
double green_free(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

enum class ImageType { NeumannImage, DirichletImage };

// Explicit fundamental solution for -div(A grad .) on the lower half-space
// {x_d < 0}, built by the method of images through M = A^{-1/2}:
//   L_A(x,y) = |det M| ( G(Mx,My) +/- G(Mx, My - 2 y_d M^{-1}e_d / |M^{-1}e_d|^2) ),
// + for the zero-co-normal-flux wall, - for the zero-trace wall.
struct HalfSpaceKernel {
    Eigen::MatrixXd A;  // symmetric positive definite, d x d
    Eigen::MatrixXd M;  // A^{-1/2}
    ImageType type = ImageType::NeumannImage;

    static HalfSpaceKernel make(const Eigen::MatrixXd& A, ImageType type);

    int dim() const { return static_cast<int>(A.rows()); }
    double eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    Eigen::VectorXd grad_y(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    // Reflected image of y across the wall in the M-metric.
    Eigen::VectorXd image_point(const Eigen::VectorXd& y) const;
};

// Single/double layer potentials on the unit circle, densities sampled on a
// uniform periodic grid (trapezoid rule, spectral for smooth densities).
struct CircleDensity {
    std::vector<double> values; // at angles 2*pi*j/n
    double at(double theta) const; // trigonometric interpolation
};

double single_layer_circle(const CircleDensity& phi, const Eigen::Vector2d& x);
double double_layer_circle(const CircleDensity& phi, const Eigen::Vector2d& x);

// One-sided boundary values/fluxes by Richardson extrapolation along the
// normal at offsets {4h, 2h, h}.
struct JumpCheck {
    double outer = 0.0;
    double inner = 0.0;
    double jump() const { return outer - inner; }
};

JumpCheck trace_jump_single_layer(const CircleDensity& phi, double theta, double h);
JumpCheck flux_jump_single_layer(const CircleDensity& phi, double theta, double h);
JumpCheck trace_jump_double_layer(const CircleDensity& phi, double theta, double h);
JumpCheck flux_jump_double_layer(const CircleDensity& phi, double theta, double h);

// Homogeneous-kernel sanity checks (class -m): the m-th z-derivatives must be
// odd and (-(d-1))-homogeneous. `grad` supplies the analytic z-gradient when
// m = 1; for m = 0 the kernel itself is checked.
struct HomogeneityReport {
    double parity_defect = 0.0;
    double homogeneity_defect = 0.0;
};

HomogeneityReport check_homogeneous_kernel_class0(
    const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& K,
    int d, int n_samples, unsigned seed);

HomogeneityReport check_homogeneous_kernel_class1(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)>&
        grad_z,
    int d, int n_samples, unsigned seed);

// Richardson extrapolation to t -> 0 from samples at {4h, 2h, h} assuming a
// smooth expansion v(t) = v0 + c1 t + c2 t^2 + O(t^3).
double richardson3(double v4h, double v2h, double vh);

} // namespace patchpert
