#pragma once
#include "patchpert/geometry.hpp"

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace patchpert {

enum class RefGeometry { Segment, Disk };

// Endpoint behavior of admissible densities on the reference segment/disk:
// InverseSqrt ~ (1-|x|^2)^{-1/2}, Sqrt ~ (1-|x|^2)^{+1/2}.
enum class WeightClass { InverseSqrt, Sqrt, Plain };

enum class OperatorTag {
    S1_2D,
    S1_3D,
    R1_2D,
    R1_3D,
    Veps,
    TepsDirichlet2D,
    TepsNeumann2D,
    TepsDirichlet3D,
    TepsNeumann3D,
};

// Quadrature representation of a density: values at the collocation nodes and
// pairing weights so that <phi, 1> = weights . values.
struct BoundaryDensity {
    RefGeometry geometry = RefGeometry::Segment;
    WeightClass weight_class = WeightClass::Plain;
    std::vector<double> x;     // segment abscissa, or disk radius per node
    std::vector<double> theta; // disk azimuth per node (empty on the segment)
    Eigen::VectorXd values;
    Eigen::VectorXd weights;

    int size() const { return static_cast<int>(values.size()); }
    double pair_with_one() const { return weights.dot(values); }
};

BoundaryDensity make_density_segment(int n, WeightClass wc,
                                     const std::function<double(double)>& phi);
BoundaryDensity make_density_disk(int n, WeightClass wc,
                                  const std::function<double(double, double)>& phi);

// Dense discretization of one boundary integral operator. The stored matrix K
// is the symmetric kernel part: (Op phi)(x_i) = sum_j K(i,j) w_j phi_j, so the
// S1/R1 matrices are symmetric while the T_eps variants carry an extra row
// scaling. Spectral data is kept alongside for exact transforms and solves.
struct KernelMatrix {
    OperatorTag tag = OperatorTag::S1_2D;
    RefGeometry geometry = RefGeometry::Segment;
    WeightClass domain_class = WeightClass::InverseSqrt;
    Eigen::MatrixXd K;
    Eigen::VectorXd pair_w;
    std::vector<double> node_x;
    std::vector<double> node_theta;
    int n_r = 0;
    int n_theta = 0;
    double eps = 0.0;
    double alpha = 0.0; // Veps shift: alpha = (1/2) log gamma(0)
    bool symmetric_kernel = true;

    // disk spectral data
    double jacobi_a = 0.0;                 // rim-weight exponent
    Eigen::MatrixXd sigma;                 // eigenvalues (mode m, radial n)
    Eigen::MatrixXd h_rad;                 // radial norms
    Eigen::VectorXd radial_t;              // Gauss-Jacobi nodes in t = 2r^2-1
    Eigen::VectorXd radial_v;              // their weights
    // Teps row scaling (identity for S1/R1/Veps)
    Eigen::VectorXd row_scale;
    Eigen::VectorXd row_shift;             // constant-per-row term (Dirichlet Teps)

    int size() const { return static_cast<int>(K.rows()); }
};

// Assembly. For the disk, n is the per-direction count (n x n polar grid).
// The parallel flag selects the OpenMP or the serial reference assembly path;
// both produce bit-identical matrices.
KernelMatrix op_S1(RefGeometry geometry, int n, bool parallel = true);
KernelMatrix op_R1(RefGeometry geometry, int n, bool parallel = true);
KernelMatrix op_Veps(double eps, double gamma0, int n);
KernelMatrix op_Teps_dirichlet(const FlatteningMap& f, double eps, int n, int d);
KernelMatrix op_Teps_neumann(const FlatteningMap& f, double eps, int n, int d);

Eigen::VectorXd apply(const KernelMatrix& op, const BoundaryDensity& phi);

// First-kind solves. rhs holds values of the right-hand side at the nodes.
// Throws IllConditioned if the spectral condition estimate exceeds 1e12.
BoundaryDensity solve_S1(const KernelMatrix& op, const BoundaryDensity& rhs);
BoundaryDensity solve_R1(const KernelMatrix& op, const BoundaryDensity& rhs);

double condition_estimate(const KernelMatrix& op);

// <S1^{-1} g, 1> for g given by values at the S1 nodes.
double inverse_mean(const KernelMatrix& s1, const Eigen::VectorXd& rhs_values);

// V_eps^{-1} built from the rank-one inversion formula, verified against the
// direct inverse: returns both defects (exact up to roundoff).
struct VepsIdentityReport {
    double inverse_resid = 0.0;      // max |V (V^{-1} g) - g| / |g|
    double mean_formula_resid = 0.0; // defect of the explicit mean identity
};
VepsIdentityReport veps_inverse_identities(const KernelMatrix& veps, unsigned seed);

// Discrete l2-induced operator norm (proxy for the H^{+-1/2} norms).
double op_norm2(const Eigen::MatrixXd& m);

// Scaled residuals of the small-scale operator approximations:
// Dirichlet: || T_eps - (1/(pi g0))(|log eps|+alpha)<.,1> - (2/g0) S1 || (d=2),
//            eps * || T_eps - (2/(eps g0)) S1 ||                        (d=3);
// Neumann:   eps^d * || T_eps - (2 g0 / eps^d) R1 ||.
double teps_residual_dirichlet(const FlatteningMap& f, double eps, int n, int d);
double teps_residual_neumann(const FlatteningMap& f, double eps, int n, int d);

// Plain-text dumps for offline inspection.
void dump_matrix(const KernelMatrix& op, std::ostream& out);
void dump_density(const BoundaryDensity& d, std::ostream& out);

// Jacobi polynomial P_n^{(a,b)}(t), three-term recurrence.
double jacobi_eval(int n, double a, double b, double t);

} // namespace patchpert
