#include <string>

#include "CLI11.hpp"
#include "safewb/cli_commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Safe whole-body velocity control: equivalent CBF-QP and "
                 "complementarity controllers for a planar arm"};
    app.require_subcommand(1);

    std::string scene_path, out_dir = "out";
    auto* sim = app.add_subcommand("simulate", "Run a scene under both controllers");
    sim->add_option("scene", scene_path, "scene file")->required();
    sim->add_option("--out", out_dir, "output directory (trajectory.csv, metrics.json)");

    safewb::FuzzConfig fuzz_cfg;
    std::string fuzz_out = ".";
    auto* fuzz = app.add_subcommand("fuzz", "Randomized solver-equivalence check");
    fuzz->add_option("--seed", fuzz_cfg.seed, "generator seed");
    fuzz->add_option("--count", fuzz_cfg.instances, "number of instances");
    fuzz->add_option("--m-max", fuzz_cfg.m_max, "max constraint count (<= 12)");
    fuzz->add_option("--n-max", fuzz_cfg.n_max, "max dimension");
    fuzz->add_option("--tol", fuzz_cfg.tol, "relative agreement tolerance");
    fuzz->add_option("--oracle-m-max", fuzz_cfg.oracle_m_max,
                     "enumeration oracle engaged up to this m");
    fuzz->add_option("--min-row-norm", fuzz_cfg.min_row_norm,
                     "row rejection threshold; values below 1e-12 make the "
                     "generator emit exact zero rows to exercise the contract check");
    fuzz->add_option("--out", fuzz_out, "output directory (fuzz_report.json)");

    std::string csv_path, plot_out = "out";
    auto* plot = app.add_subcommand("plot", "Render SVG plots from a trajectory.csv");
    plot->add_option("csv", csv_path, "trajectory.csv written by simulate")->required();
    plot->add_option("--out", plot_out, "output directory (scene.svg, curves.svg)");

    CLI11_PARSE(app, argc, argv);

    if (sim->parsed()) return safewb::cmd_simulate(scene_path, out_dir);
    if (fuzz->parsed()) return safewb::cmd_fuzz(fuzz_cfg, fuzz_out);
    if (plot->parsed()) return safewb::cmd_plot(csv_path, plot_out);
    return 2;
}
