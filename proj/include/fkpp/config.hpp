#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fkpp/model.hpp"

namespace fkpp {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key=value run configuration ('#' comments, one pair per line).
/// Unknown keys are rejected and every numeric range is validated at parse
/// time by constructing the domain objects once.
struct RunConfig {
    std::string kind = "kpp";  // kpp | combustion
    double p = 3.0;
    double scale = 1.0;
    double sigma = 0.1;  // combustion only
    double theta = 0.5;
    double s = 0.8;

    double left_end = -400.0;
    double right_end = 60.0;
    int n_points = 1841;

    double epsilon = 0.25;
    double mu = 6.0;
    std::optional<double> lambda_shift;
    double tol_iter = 1e-10;
    double tol_norm = 1e-8;
    double tol_mono = 1e-9;
    double tol_right = 1e-3;
    double mu_tol = 1e-4;
    int max_iters = 20000;
    int max_right_extends = 4;

    std::vector<double> epsilon_schedule = {0.5, 0.25, 0.1, 0.05, 0.02, 0.0};
    std::vector<double> sigma_schedule = {0.2, 0.1, 0.05, 0.025, 0.0125};
    std::vector<double> mu_list;  // sweep subcommand

    Nonlinearity nonlinearity() const;
    FractionalOrder order() const;
    GridSpec grid() const;  // neutral tails (0 left, 1 right); commands override
    SolveParams solve_params() const;
};

RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace fkpp
