#pragma once

#include <string>
#include <vector>

#include "fkpp/model.hpp"

namespace fkpp {

/// Relative defect of the speed identity mu (u(+inf) - u(-inf)) = int F(u):
/// trapezoid over the grid plus analytic tail contributions (power-law left
/// tail integrated in closed form against F ~ scale u^p; right remainder
/// modeled through the F'(1) linearization with |x|^{-2s} saturation decay).
/// Falls back to the absolute defect when the left-hand side vanishes.
/// Contract: left tail must be a power law or a constant with F(value) = 0,
/// right tail constant.
double speed_identity(const FrontProfile& profile, const Nonlinearity& f);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;  // of log phi vs log |x|
    double window_lo = 0.0, window_hi = 0.0;
    int points = 0;
};

/// Least-squares slope of log phi vs log |x| on [left_end, -x_fit].
DecayFit decay_fit(const FrontProfile& profile, double x_fit = 10.0);

struct TailLimit {
    double estimate = 0.0;  // mean of phi(x) |alpha x|^{2s-1} over the window
    double spread = 0.0;    // max - min over the last half-decade
};

TailLimit tail_limit(const FrontProfile& profile, double alpha = 1.0);

struct L2Norms {
    double du = 0.0;
    double d2u = 0.0;
    double fraclap_u = 0.0;
    double one_minus_u_right = 0.0;
    // energy identity pieces: int F(u) u = eps ||u'||^2 + mu/2 [u^2] + 1/2 [u]_s^2
    double fu_u_integral = 0.0;
    double mu_half_term = 0.0;
    double seminorm_sq = 0.0;
    double identity_rel_defect = 0.0;
};

/// Discrete L^2 norms of u', u'', (-Delta)^s u over the grid and of (1-u)
/// over [-r, right_end], plus the energy-identity bookkeeping.  r < 0 means
/// the full grid.
L2Norms l2_tail_norms(const FrontProfile& profile, const Nonlinearity& f, double r = -1.0);

struct GammaResidual {
    double min = 0.0;    // smallest residual over the grid
    double scale = 0.0;  // max |residual| away from the kink at -1
    double argmin = 0.0;
};

/// Residual -eps G'' + (-Delta)^s G + mu G' - F(G) of the explicit
/// power-law super-solution profile G (1/|x|^{2s-1} left of -1, 1 right),
/// evaluated on the given grid.  Nonnegative for mu at or above the
/// analytic speed bound, apart from discretization slack.
GammaResidual gamma_supersolution_residual(FractionalOrder s, double epsilon, double mu,
                                           const Nonlinearity& f, const GridSpec& grid);

/// Max over x < -R/vartheta of (-Delta)^s phi_bar + mu phi_bar' for the
/// four-piece barrier phi_bar = g * Gamma_alpha; negative for alpha, R large
/// enough with the stated parameter ordering.
double barrier_check(FractionalOrder s, double mu, double m, double big_m, double eps0,
                     double eps, double big_r, double vartheta, double alpha, double r_eps0,
                     double phi_at_r_eps0);

/// Power-law left tail |x|^exponent with the coefficient matched over the
/// outermost half-decade of samples; returns the existing tail when the
/// window is too short.  The default exponent -(2s-1) is the front decay;
/// combustion profiles decay one power faster, |x|^{-2s}.
TailModel fit_power_tail(const FrontProfile& front);
TailModel fit_power_tail(const FrontProfile& front, double exponent);

struct SlidingResult {
    double tau_star = 0.0;
    double residual = 0.0;
};

/// Translation alignment: minimizes ||phi1(.+tau) - phi2||_inf by coarse
/// scan plus golden-section refinement, cubic interpolation between samples.
/// Requires equal grid spacing.
SlidingResult uniqueness_sliding(const FrontProfile& phi1, const FrontProfile& phi2);

struct DiagnosticsReport {
    double speed_identity_rel_err = 0.0;
    double decay_slope = 0.0;
    double decay_slope_target = 0.0;
    double tail_limit_estimate = 0.0;
    double tail_limit_spread = 0.0;
    L2Norms l2;
    bool invariants_ok = false;
    bool identity_ok = false;
    bool decay_ok = false;
    bool tail_ok = false;
    bool pass = false;
    std::string fail_reason;  // first failing check, empty when pass
};

/// Full single-profile report: profile invariants, speed identity (< 2%),
/// left-tail decay slope (within 10% of -(2s-1)), tail-limit spread
/// (spread/estimate < 0.1), and the L^2 bookkeeping.
DiagnosticsReport run_diagnostics(const FrontProfile& front, const Nonlinearity& f);

}  // namespace fkpp
