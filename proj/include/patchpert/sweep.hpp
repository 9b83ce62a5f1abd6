#pragma once
#include "patchpert/config.hpp"
#include "patchpert/geometry.hpp"

#include <limits>
#include <string>
#include <vector>

namespace patchpert {

struct SweepConfig {
    std::string scenario = "dirichlet2d";
    std::vector<double> eps_list = {1.0 / 16, 1.0 / 32, 1.0 / 64,
                                    1.0 / 128, 1.0 / 256, 1.0 / 512};
    double mesh_h = 0.04;
    std::string out_dir = "out";
    int threads = 0;
    unsigned seed = 1;

    double gamma0 = 1.0;
    double cap_h = 0.2; // flat capacity far-field mesh size
    double arc_h = 0.1; // circle capacity far-field mesh size
    int segment_n = 128;
    int disk_n = 24;
    Vec2 observation{0.3, -0.35};

    static SweepConfig from_config(const Config& c);
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// One sweep row. The first block is the documented CSV schema (in order);
// the extras below stay in memory for the acceptance checks.
struct SweepRecord {
    double eps = kNaN;
    double cap_value = kNaN;
    double e_value = kNaN;
    double chi_energy = kNaN;
    double zeta_energy = kNaN;
    double u0_at_x = kNaN;
    double ueps_at_x = kNaN;
    double predicted_delta = kNaN;
    double computed_delta = kNaN;
    double residual_ratio = kNaN;
    double compliance_0 = kNaN;
    double compliance_eps = kNaN;
    double wall_time = kNaN;
    double cap_flat = kNaN;
    double e_flat = kNaN;
    double op_resid_dirichlet = kNaN;
    double op_resid_neumann = kNaN;
    double veps_identity_resid = kNaN;
    bool failed = false;

    // extras (not serialized)
    double r_h1 = kNaN;
    double r_l2 = kNaN;
    double u00 = kNaN;       // u0 at the patch center
    double flux0 = kNaN;     // du0/dn at the patch center
    double n_x0 = kNaN;      // N(x, 0)
    double dn_x0 = kNaN;     // dN/dn_y(x, 0)
    double cap_rich = kNaN;
    double e_rich = kNaN;
    double d_surr = kNaN;
    double dist_int = kNaN;
    double c1_defect = kNaN; // worst equilibrium-constant deviation (kernel rows)
    std::string message;
};

std::vector<std::string> sweep_csv_columns();
double record_column(const SweepRecord& r, const std::string& column);

// Runs the configured scenario over the eps list; rows execute concurrently
// and are appended (in order, crash-safe) to <out_dir>/<scenario>.csv.partial.
std::vector<SweepRecord> run_sweep(const SweepConfig& cfg);

struct FitResult {
    enum class Model { PowerLaw, LogLaw };
    Model model = Model::PowerLaw;
    double exponent = 0.0;    // PowerLaw: fitted p in c * eps^p
    double coefficient = 0.0; // PowerLaw: c; LogLaw: c in c / |log eps|
    int first_row = 0;
    int last_row = 0;
    double goodness = 0.0; // max relative deviation inside the window
};

// Least-squares fit in transformed coordinates (log-log / reciprocal-log).
// The window excludes the coarsest eps by default; needs >= 3 usable rows.
FitResult fit_rate(const std::vector<SweepRecord>& records, const std::string& column,
                   FitResult::Model model, bool include_coarsest = false);

// Richardson extrapolation of a log-law coefficient in t = 1/|log eps| from
// the last two rows.
double extrapolate_loglaw(const std::vector<double>& eps,
                          const std::vector<double>& coef);

} // namespace patchpert
