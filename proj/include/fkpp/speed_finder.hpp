#pragma once

#include <vector>

#include "fkpp/bvp_solver.hpp"
#include "fkpp/diagnostics.hpp"
#include "fkpp/model.hpp"

namespace fkpp {

/// Analytic speed bound nu(eps) = 2 s eps + 1/(2s(2s-1)) + (A2+1)/(2s-1);
/// above it the explicit power-law profile is a super-solution.
double nu_bound(FractionalOrder s, double epsilon, double a2);

class BracketError : public std::runtime_error {
  public:
    BracketError(const std::string& what, std::vector<std::pair<double, double>> table)
        : std::runtime_error(what), scan(std::move(table)) {}
    std::vector<std::pair<double, double>> scan;  // (mu, phi(0) - level)
};

class OrderingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CombustionSpeedResult {
    double mu_c = 0.0;
    FrontProfile profile;
    double identity_rel_err = 0.0;
    std::vector<std::pair<double, double>> mu_scan;  // bracket scan table
    long total_inner_iterations = 0;
};

/// Unique speed of the combustion problem: outer bracketed root find in mu
/// on the translation-pinning phase condition phi(0) = (sigma+1)/2, inner
/// monotone solves with boundary data 0 / 1.  The bracket is established by
/// a geometric scan of (1e-3, nu_bound]; the response direction is read off
/// the scan, not assumed.  The returned profile satisfies the speed identity
/// within 2% or the call throws.
CombustionSpeedResult combustion_speed(const Nonlinearity& f_sigma, FractionalOrder s,
                                       double epsilon, const GridSpec& grid,
                                       const SolveParams& params,
                                       const FrontProfile* warm = nullptr);

struct SpeedEstimate {
    std::vector<double> sigma_schedule;
    std::vector<double> mu_values;
    std::vector<double> identity_errs;
    double extrapolated_mu_star = 0.0;
    double fit_exponent_q = 0.0;
    double fit_coefficient = 0.0;
    double fit_residual = 0.0;  // defect at the 4th-last point, when present
    double epsilon = 0.0;
    double nu_bound = 0.0;
};

/// Combustion-speed sweep over a decreasing sigma schedule with the
/// mu(sigma) = mu_star - c sigma^q extrapolation through the last three
/// points.  Ordering violations beyond 1e-6 and a bound-chain violation
/// extrapolated_mu_star > nu_bound raise OrderingError.
SpeedEstimate estimate_mu_star(const Nonlinearity& f_base, FractionalOrder s, double epsilon,
                               const std::vector<double>& sigma_schedule, const GridSpec& grid,
                               const SolveParams& params);

struct ContinuationStage {
    double epsilon = 0.0;
    bool normalized = false;
    double vartheta = 0.0;
    double achieved = 0.0;
    long inner_iterations = 0;
};

class ContinuationError : public std::runtime_error {
  public:
    ContinuationError(const std::string& what, std::vector<ContinuationStage> st,
                      double failing_eps)
        : std::runtime_error(what), stages(std::move(st)), failing_epsilon(failing_eps) {}
    std::vector<ContinuationStage> stages;
    double failing_epsilon = 0.0;
};

struct ContinuationResult {
    FrontProfile front;
    DiagnosticsReport report;
    std::vector<ContinuationStage> stages;
    GridSpec final_grid;
    int right_extensions = 0;
};

/// Viscous continuation: normalize phi(-1) = theta at the largest epsilon,
/// then warm-start every smaller epsilon from the previous stage down to the
/// final (typically 0) stage.  The returned front carries a fitted power-law
/// left tail and has passed run_diagnostics.  A stage that ends in the
/// no-normalization outcome aborts with ContinuationError after probing the
/// remaining stages cold, so the error carries the full per-stage signature.
ContinuationResult epsilon_continuation_front(const Nonlinearity& f, FractionalOrder s,
                                              double mu,
                                              const std::vector<double>& epsilon_schedule,
                                              const GridSpec& grid, const SolveParams& params);

}  // namespace fkpp
