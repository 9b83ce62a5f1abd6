#pragma once
#include "patchpert/geometry.hpp"

#include <vector>

namespace patchpert {

// Boundary subset whose smallness is being measured: one or more components
// on a supported host. FlatLine components are intervals [lo, hi] on the
// x-axis of the plane; UnitCircle components are arcs of the circle.
struct PatchSpec {
    enum class Host { FlatLine, UnitCircle };
    Host host = Host::FlatLine;
    std::vector<Arc> components;

    static PatchSpec flat_segment(double eps);
    static PatchSpec circle_arc(const Arc& a);
};

struct CapacityResult {
    double value = 0.0;               // bracket midpoint at the largest radius
    double lower_value = 0.0;         // free artificial boundary
    double upper_value = 0.0;         // clamped artificial boundary
    double truncation_radius = 0.0;
    double mesh_h = 0.0;
    double richardson_estimate = 0.0; // extrapolated over the two radii
};

struct NeumannCapacityResult {
    double value = 0.0;
    std::vector<int> sign_pattern;    // maximizing orientation per component
    double truncation_radius = 0.0;
    double richardson_estimate = 0.0;
};

// H1(R^d) capacity by truncated exterior energy minimization with v = 1 on
// the patch (trace sense). Solves at radii {R, 2R} with both one-sided outer
// conditions; throws TruncationTooSmall if the one-sided values at the larger
// radius differ by more than 20%.
CapacityResult cap(const PatchSpec& patch, double truncation_radius, double h);

// Neumann capacity e(omega): energy of -Lap z + z = 0 with two-sided unit
// flux through the patch, maximized over the 2^(k-1) per-component sign
// patterns (component count capped at 8).
NeumannCapacityResult neumann_capacity(const PatchSpec& patch, double truncation_radius,
                                       double h);

// Energy of one fixed sign pattern (free outer condition); the value is
// invariant under a global sign flip of kappa.
double neumann_energy(const PatchSpec& patch, double truncation_radius, double h,
                      const std::vector<int>& kappa);

// Geometric surrogates for e(omega) on the unit-circle host.
// rho_weight: x given as an angle strictly inside the patch arc.
double rho_weight(double x_angle, const PatchSpec& patch);
double d_surrogate(const PatchSpec& patch);
double dist_integral(const PatchSpec& patch); // int_patch dist(x, boundary of patch) ds

double check_cap_sandwich(double chi_energy, double cap_value);

} // namespace patchpert
