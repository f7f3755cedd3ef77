#include "safewb/cli_commands.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "safewb/scene.hpp"
#include "safewb/svg_plot.hpp"
#include "safewb/trajectory_io.hpp"

namespace safewb {

namespace {

bool ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory '" << dir << "': " << ec.message()
                  << "\n";
        return false;
    }
    return true;
}

std::string joined(const std::string& dir, const char* name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

int cmd_simulate(const std::string& scene_path, const std::string& out_dir) {
    SimConfig config;
    try {
        config = parse_scene_file(scene_path);
    } catch (const ConfigError& e) {
        std::cerr << "scene error: " << e.what() << "\n";
        return 2;
    }
    if (!ensure_dir(out_dir)) return 2;

    const auto [log, metrics] = run(config);

    try {
        write_trajectory_csv_file(joined(out_dir, "trajectory.csv"), config, log);
        write_metrics_json_file(joined(out_dir, "metrics.json"), metrics, log.termination);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    std::printf("simulate: %s after %zu steps, goal_error %.3e, e in [%.3e, %.3e], "
                "hprime_min %.3e\n",
                termination_name(log.termination), metrics.steps, metrics.goal_error,
                metrics.e_min, metrics.e_max, metrics.hprime_min);

    // A crossed margin outranks a downstream solver failure: penetration
    // destabilizes everything after it.
    if (metrics.hprime_min <= 0.0) {
        std::cerr << "safety violation: hprime reached " << metrics.hprime_min << "\n";
        return 4;
    }
    if (log.termination == Termination::SolverFailure) {
        std::cerr << "solver failure: " << log.failure_reason << "\n";
        return 3;
    }
    return log.termination == Termination::GoalReached ? 0 : 1;
}

int cmd_fuzz(const FuzzConfig& cfg, const std::string& out_dir) {
    if (cfg.m_max > 12 || cfg.m_max < 1 || cfg.n_max < 1) {
        std::cerr << "error: fuzz bounds must satisfy 1 <= m_max <= 12, n_max >= 1\n";
        return 2;
    }
    if (!ensure_dir(out_dir)) return 2;

    const FuzzReport report = fuzz_equivalence(cfg);
    try {
        write_fuzz_report_json_file(joined(out_dir, "fuzz_report.json"), cfg, report);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    std::printf("fuzz: %zu instances (seed %llu), %zu oracle-checked, %zu infeasible, "
                "max solver gap %.3e, max oracle gap %.3e, %zu disagreements\n",
                report.instances_run, static_cast<unsigned long long>(cfg.seed),
                report.oracle_checked, report.infeasible_count, report.max_solver_discrepancy,
                report.max_oracle_discrepancy, report.status_disagreements);

    if (report.generator_contract_violation) {
        std::cerr << "generator contract violation: a degenerate row reached the harness\n";
        return 2;
    }
    return report.success ? 0 : 1;
}

int cmd_plot(const std::string& csv_path, const std::string& out_dir) {
    TrajectoryData data;
    try {
        data = read_trajectory_csv_file(csv_path);
    } catch (const ConfigError& e) {
        std::cerr << "trajectory error: " << e.what() << "\n";
        return 2;
    }
    if (!ensure_dir(out_dir)) return 2;

    try {
        plot_scene_svg_file(joined(out_dir, "scene.svg"), data);
        plot_curves_svg_file(joined(out_dir, "curves.svg"), data);
    } catch (const ConfigError& e) {
        std::cerr << "trajectory error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::printf("plot: wrote scene.svg and curves.svg to %s\n", out_dir.c_str());
    return 0;
}

}  // namespace safewb
