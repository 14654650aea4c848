// Command-line driver: traveling-front solves, combustion speed sweeps and
// diagnostics for the nonlocal generalized Fisher-KPP equation.
#include <CLI11.hpp>
#include <iostream>

#include "fkpp/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fkpp: traveling fronts for the generalized Fisher-KPP equation "
                 "with nonlocal diffusion"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string front_csv;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "path to key=value config file")->required();
        cmd->add_option("--out", out_dir, "output directory (default: .)");
    };

    CLI::App* op_test = app.add_subcommand("op-test", "operator self-checks (spectral oracle, "
                                                      "constant annihilation, refinement rate)");
    add_common(op_test);
    CLI::App* solve_front =
        app.add_subcommand("solve-front", "viscous continuation front solve at fixed mu");
    add_common(solve_front);
    CLI::App* comb =
        app.add_subcommand("combustion-speed", "unique speed of one combustion cutoff");
    add_common(comb);
    CLI::App* crit = app.add_subcommand("critical-speed",
                                        "sigma sweep plus extrapolation of the critical speed");
    add_common(crit);
    CLI::App* diag = app.add_subcommand("diagnose", "diagnostics report for a stored front.csv");
    add_common(diag);
    diag->add_option("--front", front_csv, "path to front.csv")->required();
    CLI::App* sweep = app.add_subcommand("sweep", "cartesian sweep over mu/sigma/epsilon lists");
    add_common(sweep);

    CLI11_PARSE(app, argc, argv);

    fkpp::RunConfig cfg;
    try {
        cfg = fkpp::parse_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (op_test->parsed()) return fkpp::cmd_op_test(cfg, out_dir);
        if (solve_front->parsed()) return fkpp::cmd_solve_front(cfg, out_dir);
        if (comb->parsed()) return fkpp::cmd_combustion_speed(cfg, out_dir);
        if (crit->parsed()) return fkpp::cmd_critical_speed(cfg, out_dir);
        if (diag->parsed()) return fkpp::cmd_diagnose(cfg, out_dir, front_csv);
        if (sweep->parsed()) return fkpp::cmd_sweep(cfg, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
