#include "patchpert/sweep.hpp"
#include "patchpert/asymptotics.hpp"
#include "patchpert/capacity.hpp"
#include "patchpert/errors.hpp"
#include "patchpert/fem.hpp"
#include "patchpert/layer_ops.hpp"
#include "patchpert/mesh.hpp"
#include "patchpert/parallel.hpp"
#include "patchpert/report.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>

namespace patchpert {

SweepConfig SweepConfig::from_config(const Config& c) {
    SweepConfig s;
    s.scenario = c.get("scenario", s.scenario);
    s.eps_list = c.get_list("eps_list", s.eps_list);
    s.mesh_h = c.get_double("mesh_h", s.mesh_h);
    s.out_dir = c.get("out_dir", s.out_dir);
    s.threads = c.get_int("threads", s.threads);
    s.seed = static_cast<unsigned>(c.get_int("seed", static_cast<int>(s.seed)));
    s.gamma0 = c.get_double("gamma0", s.gamma0);
    s.cap_h = c.get_double("cap_h", s.cap_h);
    s.arc_h = c.get_double("arc_h", s.arc_h);
    s.segment_n = c.get_int("segment_n", s.segment_n);
    s.disk_n = c.get_int("disk_n", s.disk_n);
    s.observation[0] = c.get_double("observation_x", s.observation[0]);
    s.observation[1] = c.get_double("observation_y", s.observation[1]);
    return s;
}

std::vector<std::string> sweep_csv_columns() {
    return {"eps",           "cap_value",     "e_value",
            "chi_energy",    "zeta_energy",   "u0_at_x",
            "ueps_at_x",     "predicted_delta", "computed_delta",
            "residual_ratio", "compliance_0",  "compliance_eps",
            "wall_time",     "cap_flat",      "e_flat",
            "op_resid_dirichlet", "op_resid_neumann", "veps_identity_resid",
            "failed"};
}

double record_column(const SweepRecord& r, const std::string& c) {
    if (c == "eps") return r.eps;
    if (c == "cap_value") return r.cap_value;
    if (c == "e_value") return r.e_value;
    if (c == "chi_energy") return r.chi_energy;
    if (c == "zeta_energy") return r.zeta_energy;
    if (c == "u0_at_x") return r.u0_at_x;
    if (c == "ueps_at_x") return r.ueps_at_x;
    if (c == "predicted_delta") return r.predicted_delta;
    if (c == "computed_delta") return r.computed_delta;
    if (c == "residual_ratio") return r.residual_ratio;
    if (c == "compliance_0") return r.compliance_0;
    if (c == "compliance_eps") return r.compliance_eps;
    if (c == "wall_time") return r.wall_time;
    if (c == "cap_flat") return r.cap_flat;
    if (c == "e_flat") return r.e_flat;
    if (c == "op_resid_dirichlet") return r.op_resid_dirichlet;
    if (c == "op_resid_neumann") return r.op_resid_neumann;
    if (c == "veps_identity_resid") return r.veps_identity_resid;
    if (c == "failed") return r.failed ? 1.0 : 0.0;
    throw ConfigError("unknown sweep column " + c);
}

namespace {

Conductivity variable_gamma() {
    Conductivity g;
    g.value = [](Vec2 p) { return 1.5 + 0.4 * p[0]; };
    g.lower = 1.1;
    g.upper = 1.9;
    return g;
}

void run_dirichlet2d_row(const SweepConfig& cfg, double eps, SweepRecord& r) {
    DomainSpec spec;
    spec.gamma = Conductivity::constant(cfg.gamma0);
    const BoundaryPartition part = half_circle_partition(M_PI / 2.0, true);
    const BoundaryPartition pp = make_patch(part, eps);
    const Mesh mesh = generate_mesh(spec, pp, cfg.mesh_h);

    MixedProblem p0;
    p0.coeff = [&spec](Vec2 q) { return spec.gamma(q); };
    p0.source = [](Vec2) { return 1.0; };
    p0.essential.push_back({EdgeLabel::Dirichlet, {}});
    const ScalarField u0 = solve_mixed(mesh, p0);
    MixedProblem pe = p0;
    pe.essential.push_back({EdgeLabel::Patch, {}});
    const ScalarField ue = solve_mixed(mesh, pe);

    const Vec2 pc{std::cos(pp.patch_center), std::sin(pp.patch_center)};
    r.u00 = u0.at(pc);
    const FundamentalSolution nfield =
        fundamental_solution_N(mesh, spec.gamma, pp, cfg.observation);
    r.n_x0 = nfield.eval(pc);

    r.u0_at_x = u0.at(cfg.observation);
    r.ueps_at_x = ue.at(cfg.observation);
    r.computed_delta = r.ueps_at_x - r.u0_at_x;
    r.predicted_delta = predict_dirichlet_patch(eps, r.n_x0, r.u00, spec.gamma(pc), 2);
    if (r.predicted_delta != 0.0)
        r.residual_ratio =
            std::abs(r.computed_delta - r.predicted_delta) / std::abs(r.predicted_delta);

    const ScalarField chi = solve_chi_eps(mesh, pp);
    const double ce = h1_norm(chi);
    r.chi_energy = ce * ce;

    ScalarField rf = ue;
    rf.values -= u0.values;
    r.r_h1 = h1_norm(rf);
    r.r_l2 = l2_norm(rf);

    r.compliance_0 = compliance(u0, p0.source);
    r.compliance_eps = compliance(ue, p0.source);

    const CapacityResult ca = cap(PatchSpec::circle_arc(*pp.patch), 8.0, cfg.arc_h);
    r.cap_value = ca.value;
    r.cap_rich = ca.richardson_estimate;
    const CapacityResult cf = cap(PatchSpec::flat_segment(eps), 4.0, cfg.cap_h);
    r.cap_flat = cf.value;
}

void run_neumann2d_row(const SweepConfig& cfg, double eps, SweepRecord& r) {
    DomainSpec spec;
    spec.gamma = Conductivity::constant(cfg.gamma0);
    const BoundaryPartition part = half_circle_partition(-M_PI / 2.0, false);
    const BoundaryPartition pp = make_patch(part, eps);
    const Mesh mesh = generate_mesh(spec, pp, cfg.mesh_h);

    MixedProblem p0;
    p0.coeff = [&spec](Vec2 q) { return spec.gamma(q); };
    p0.source = [](Vec2) { return 1.0; };
    p0.essential.push_back({EdgeLabel::Dirichlet, {}});
    p0.essential.push_back({EdgeLabel::Patch, {}});
    const ScalarField u0 = solve_mixed(mesh, p0);
    MixedProblem pe = p0;
    pe.essential.pop_back(); // the patch becomes a (homogeneous) natural part
    const ScalarField ue = solve_mixed(mesh, pe);

    const Vec2 pc{std::cos(pp.patch_center), std::sin(pp.patch_center)};
    const BoundaryFlux bf = normal_flux(mesh, p0, u0, EdgeLabel::Patch);
    r.flux0 = flux_at_point(bf, mesh, pc) / spec.gamma(pc); // du0/dn, not gamma du0/dn

    const FundamentalSolution nfield =
        fundamental_solution_N(mesh, spec.gamma, pp, cfg.observation);
    r.dn_x0 = normal_derivative_at_boundary(nfield, pp.patch_center, 0.08);

    r.u0_at_x = u0.at(cfg.observation);
    r.ueps_at_x = ue.at(cfg.observation);
    r.computed_delta = r.ueps_at_x - r.u0_at_x;
    r.predicted_delta = predict_neumann_patch(eps, r.dn_x0, r.flux0, spec.gamma(pc), 2);
    if (r.predicted_delta != 0.0)
        r.residual_ratio =
            std::abs(r.computed_delta - r.predicted_delta) / std::abs(r.predicted_delta);

    const ScalarField zeta = solve_zeta_eps(mesh, pp);
    const double ze = h1_norm(zeta);
    r.zeta_energy = ze * ze;

    ScalarField rf = ue;
    rf.values -= u0.values;
    r.r_h1 = h1_norm(rf);
    r.r_l2 = l2_norm(rf);

    r.compliance_0 = compliance(u0, p0.source);
    r.compliance_eps = compliance(ue, p0.source);

    const NeumannCapacityResult ne =
        neumann_capacity(PatchSpec::circle_arc(*pp.patch), 8.0, cfg.arc_h);
    r.e_value = ne.value;
    r.e_rich = ne.richardson_estimate;
    const NeumannCapacityResult nf =
        neumann_capacity(PatchSpec::flat_segment(eps), 4.0, cfg.cap_h);
    r.e_flat = nf.value;
}

void run_capacity2d_row(const SweepConfig& cfg, double eps, SweepRecord& r) {
    DomainSpec spec;
    const BoundaryPartition partN = make_patch(half_circle_partition(M_PI / 2.0, true), eps);
    const BoundaryPartition partD =
        make_patch(half_circle_partition(-M_PI / 2.0, false), eps);
    const Mesh meshN = generate_mesh(spec, partN, cfg.mesh_h);
    const Mesh meshD = generate_mesh(spec, partD, cfg.mesh_h);

    const ScalarField chi = solve_chi_eps(meshN, partN);
    const double ce = h1_norm(chi);
    r.chi_energy = ce * ce;
    const ScalarField zeta = solve_zeta_eps(meshD, partD);
    const double ze = h1_norm(zeta);
    r.zeta_energy = ze * ze;

    const CapacityResult ca = cap(PatchSpec::circle_arc(*partN.patch), 8.0, cfg.arc_h);
    r.cap_value = ca.value;
    r.cap_rich = ca.richardson_estimate;
    const CapacityResult cf = cap(PatchSpec::flat_segment(eps), 4.0, cfg.cap_h);
    r.cap_flat = cf.value;

    const NeumannCapacityResult na =
        neumann_capacity(PatchSpec::circle_arc(*partD.patch), 8.0, cfg.arc_h);
    r.e_value = na.value;
    r.e_rich = na.richardson_estimate;
    const NeumannCapacityResult nf =
        neumann_capacity(PatchSpec::flat_segment(eps), 4.0, cfg.cap_h);
    r.e_flat = nf.value;

    const PatchSpec arc = PatchSpec::circle_arc(*partN.patch);
    r.d_surr = d_surrogate(arc);
    r.dist_int = dist_integral(arc);
}

double equilibrium_defect(RefGeometry g, int n) {
    const KernelMatrix s1 = op_S1(g, n);
    const KernelMatrix r1 = op_R1(g, n);
    BoundaryDensity one;
    one.values = Eigen::VectorXd::Ones(s1.size());
    const double ms = solve_S1(s1, one).pair_with_one();
    const double mr = solve_R1(r1, one).pair_with_one();
    const bool seg = (g == RefGeometry::Segment);
    const double ref_s = seg ? 2.0 * M_PI / std::log(2.0) : 8.0;
    const double ref_r = seg ? -M_PI : -2.0 / 3.0;
    return std::max(std::abs(ms - ref_s) / std::abs(ref_s),
                    std::abs(mr - ref_r) / std::abs(ref_r));
}

void run_kernels2d_row(const SweepConfig& cfg, double eps, SweepRecord& r) {
    const KernelMatrix veps = op_Veps(eps, 1.7, cfg.segment_n);
    const VepsIdentityReport rep = veps_inverse_identities(veps, cfg.seed);
    r.veps_identity_resid = std::max(rep.inverse_resid, rep.mean_formula_resid);
    r.c1_defect = equilibrium_defect(RefGeometry::Segment, cfg.segment_n);

    DomainSpec spec;
    spec.gamma = variable_gamma();
    const FlatteningMap flat = build_flattening(spec);
    r.op_resid_dirichlet = teps_residual_dirichlet(flat, eps, cfg.segment_n, 2);
    r.op_resid_neumann = teps_residual_neumann(flat, eps, cfg.segment_n, 2);
}

void run_kernels3d_row(const SweepConfig& cfg, double eps, SweepRecord& r) {
    DomainSpec spec;
    spec.gamma = variable_gamma();
    const FlatteningMap flat = build_flattening(spec);
    r.c1_defect = equilibrium_defect(RefGeometry::Disk, cfg.disk_n);
    r.op_resid_dirichlet = teps_residual_dirichlet(flat, eps, cfg.disk_n, 3);
    r.op_resid_neumann = teps_residual_neumann(flat, eps, cfg.disk_n, 3);
}

} // namespace

std::vector<SweepRecord> run_sweep(const SweepConfig& cfg) {
    const std::vector<std::string> known = {"dirichlet2d", "neumann2d", "capacity2d",
                                            "kernels2d", "kernels3d"};
    if (std::find(known.begin(), known.end(), cfg.scenario) == known.end())
        throw ConfigError("unknown scenario " + cfg.scenario);
    for (std::size_t i = 1; i < cfg.eps_list.size(); ++i)
        if (!(cfg.eps_list[i] < cfg.eps_list[i - 1]))
            throw ConfigError("eps list must be strictly decreasing");
    set_thread_count(cfg.threads);

    std::vector<SweepRecord> records(cfg.eps_list.size());
    if (records.empty()) return records;

    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream partial(cfg.out_dir + "/" + cfg.scenario + ".csv.partial");
    std::mutex flush_mutex;
    std::vector<char> done(records.size(), 0);
    std::size_t flushed = 0;

    auto flush_ready = [&]() {
        // append completed rows in order so a crash keeps a valid prefix
        while (flushed < records.size() && done[flushed]) {
            const SweepRecord& r = records[flushed];
            partial.precision(17);
            partial << r.eps;
            for (const auto& c : sweep_csv_columns())
                if (c != "eps") partial << "," << record_column(r, c);
            partial << "\n" << std::flush;
            ++flushed;
        }
    };

    parallel_for(records.size(), [&](std::size_t i) {
        SweepRecord& r = records[i];
        r.eps = cfg.eps_list[i];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (cfg.scenario == "dirichlet2d")
                run_dirichlet2d_row(cfg, r.eps, r);
            else if (cfg.scenario == "neumann2d")
                run_neumann2d_row(cfg, r.eps, r);
            else if (cfg.scenario == "capacity2d")
                run_capacity2d_row(cfg, r.eps, r);
            else if (cfg.scenario == "kernels2d")
                run_kernels2d_row(cfg, r.eps, r);
            else
                run_kernels3d_row(cfg, r.eps, r);
        } catch (const std::exception& e) {
            r.failed = true;
            r.message = e.what();
        }
        r.wall_time =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::lock_guard<std::mutex> lock(flush_mutex);
        done[i] = 1;
        flush_ready();
    });
    return records;
}

FitResult fit_rate(const std::vector<SweepRecord>& records, const std::string& column,
                   FitResult::Model model, bool include_coarsest) {
    std::vector<double> xs, ys;
    int first = include_coarsest ? 0 : 1;
    int first_used = -1, last_used = -1;
    for (std::size_t i = first; i < records.size(); ++i) {
        const double v = record_column(records[i], column);
        if (records[i].failed || !std::isfinite(v) || v == 0.0) continue;
        if (first_used < 0) first_used = static_cast<int>(i);
        last_used = static_cast<int>(i);
        xs.push_back(records[i].eps);
        ys.push_back(v);
    }
    if (xs.size() < 3) throw InsufficientData("fit_rate needs at least 3 usable rows");

    FitResult f;
    f.model = model;
    f.first_row = first_used;
    f.last_row = last_used;
    if (model == FitResult::Model::PowerLaw) {
        // least squares on log|v| = log c + p log eps
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int n = static_cast<int>(xs.size());
        for (int i = 0; i < n; ++i) {
            const double lx = std::log(xs[i]), ly = std::log(std::abs(ys[i]));
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        f.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        f.coefficient = std::exp((sy - f.exponent * sx) / n);
        for (int i = 0; i < n; ++i) {
            const double m = f.coefficient * std::pow(xs[i], f.exponent);
            f.goodness = std::max(f.goodness, std::abs(m - std::abs(ys[i])) /
                                                  std::abs(ys[i]));
        }
    } else {
        // v = c / |log eps|
        double num = 0, den = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double t = 1.0 / std::abs(std::log(xs[i]));
            num += ys[i] * t;
            den += t * t;
        }
        f.coefficient = num / den;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double m = f.coefficient / std::abs(std::log(xs[i]));
            f.goodness = std::max(f.goodness, std::abs(m - ys[i]) / std::abs(ys[i]));
        }
    }
    return f;
}

double extrapolate_loglaw(const std::vector<double>& eps,
                          const std::vector<double>& coef) {
    if (eps.size() < 2 || eps.size() != coef.size())
        throw InsufficientData("extrapolate_loglaw needs two rows");
    const std::size_t n = eps.size();
    const double t1 = 1.0 / std::abs(std::log(eps[n - 2]));
    const double t2 = 1.0 / std::abs(std::log(eps[n - 1]));
    return (coef[n - 1] * t1 - coef[n - 2] * t2) / (t1 - t2);
}

} // namespace patchpert
