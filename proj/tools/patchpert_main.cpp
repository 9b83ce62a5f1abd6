#include "patchpert/acceptance.hpp"
#include "patchpert/config.hpp"
#include "patchpert/errors.hpp"
#include "patchpert/report.hpp"
#include "patchpert/sweep.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <vector>

using namespace patchpert;

namespace {

std::vector<FitResult> standard_fits(const std::string& scenario,
                                     const std::vector<SweepRecord>& recs) {
    std::vector<FitResult> fits;
    auto try_fit = [&](const std::string& col, FitResult::Model m) {
        try {
            fits.push_back(fit_rate(recs, col, m));
        } catch (const std::exception&) {
        }
    };
    if (scenario == "dirichlet2d") {
        try_fit("computed_delta", FitResult::Model::LogLaw);
        try_fit("cap_flat", FitResult::Model::LogLaw);
        try_fit("chi_energy", FitResult::Model::LogLaw);
    } else if (scenario == "neumann2d") {
        try_fit("computed_delta", FitResult::Model::PowerLaw);
        try_fit("e_flat", FitResult::Model::PowerLaw);
        try_fit("zeta_energy", FitResult::Model::PowerLaw);
    } else if (scenario == "capacity2d") {
        try_fit("cap_flat", FitResult::Model::LogLaw);
        try_fit("e_flat", FitResult::Model::PowerLaw);
        try_fit("chi_energy", FitResult::Model::LogLaw);
        try_fit("zeta_energy", FitResult::Model::PowerLaw);
    } else {
        try_fit("op_resid_dirichlet", FitResult::Model::PowerLaw);
        try_fit("op_resid_neumann", FitResult::Model::PowerLaw);
    }
    return fits;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "patchpert: conductivity boundary-condition patch perturbation toolkit"};
    std::string config_path, scenario, eps_list_str, out_dir;
    double mesh_h = -1.0;
    int threads = -1;
    int seed = -1;
    app.add_option("--config", config_path, "flat key = value configuration file");
    app.add_option("--scenario", scenario,
                   "dirichlet2d | neumann2d | capacity2d | kernels2d | kernels3d | "
                   "acceptance | all");
    app.add_option("--eps-list", eps_list_str, "comma separated, strictly decreasing");
    app.add_option("--mesh-h", mesh_h, "far-field FEM mesh size");
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--threads", threads, "worker threads (0 = library default)");
    app.add_option("--seed", seed, "seed for randomized checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        Config file_cfg;
        if (!config_path.empty()) file_cfg = Config::from_file(config_path);
        // flags override the config file
        if (!scenario.empty()) file_cfg.kv["scenario"] = scenario;
        if (!eps_list_str.empty()) file_cfg.kv["eps_list"] = eps_list_str;
        if (mesh_h > 0.0) file_cfg.kv["mesh_h"] = std::to_string(mesh_h);
        if (!out_dir.empty()) file_cfg.kv["out_dir"] = out_dir;
        if (threads >= 0) file_cfg.kv["threads"] = std::to_string(threads);
        if (seed >= 0) file_cfg.kv["seed"] = std::to_string(seed);

        SweepConfig cfg = SweepConfig::from_config(file_cfg);
        const std::string what = file_cfg.get("scenario", cfg.scenario);

        if (what == "acceptance") {
            const auto results = run_acceptance(cfg);
            write_acceptance_report(results, cfg.out_dir);
            bool all = true;
            for (const auto& r : results) {
                std::printf("%s | %2d. %s | %s\n", r.passed ? "PASS" : "FAIL", r.id,
                            r.name.c_str(), r.detail.c_str());
                all = all && r.passed;
            }
            return all ? 0 : 1;
        }

        std::vector<std::string> scenarios;
        if (what == "all")
            scenarios = {"dirichlet2d", "neumann2d", "capacity2d", "kernels2d",
                         "kernels3d"};
        else
            scenarios = {what};

        bool row_failure = false;
        for (const auto& sc : scenarios) {
            cfg.scenario = sc;
            const auto recs = run_sweep(cfg);
            emit_report(recs, standard_fits(sc, recs), cfg.out_dir, sc);
            for (const auto& r : recs) {
                std::printf("%s eps=%g wall=%.2fs%s%s\n", sc.c_str(), r.eps, r.wall_time,
                            r.failed ? " FAILED: " : "",
                            r.failed ? r.message.c_str() : "");
                row_failure = row_failure || r.failed;
            }
            std::printf("%s: wrote %s/%s.{csv,svg,md}\n", sc.c_str(),
                        cfg.out_dir.c_str(), sc.c_str());
        }
        return row_failure ? 1 : 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
