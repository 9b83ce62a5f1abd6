#pragma once
#include "patchpert/report.hpp"
#include "patchpert/sweep.hpp"

#include <vector>

namespace patchpert {

// Runs every acceptance criterion at its stated tolerance and returns one
// result per criterion. base supplies mesh sizes / output directory; the
// criterion-specific scenarios and eps grids are fixed here.
std::vector<CriterionResult> run_acceptance(const SweepConfig& base);

// Log-law coefficient extraction: the inverse of the extracted 1/|log eps|
// coefficient is linear in 1/|log eps| (the explicit inverse-mean identity),
// so the Richardson extrapolation runs on the reciprocal sequence.
double extract_dirichlet_coefficient(const std::vector<double>& eps,
                                     const std::vector<double>& coef, int tail);

} // namespace patchpert
