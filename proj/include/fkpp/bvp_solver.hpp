#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "fkpp/linear_solver.hpp"
#include "fkpp/model.hpp"
#include "fkpp/nonlocal_operator.hpp"

namespace fkpp {

struct IterationTrace {
    int iterate_count = 0;
    std::vector<double> sup_diffs;  // ||u_{n+1} - u_n||_inf per step
    bool monotone_in_n = true;      // each iterate above (below, from a super) the previous
    double final_residual = 0.0;    // nonlinear residual at exit
    bool converged = false;
};

class IterationError : public std::runtime_error {
  public:
    IterationError(const std::string& what, IterationTrace t)
        : std::runtime_error(what), trace(std::move(t)) {}
    IterationTrace trace;
};

class InvariantViolationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// How the initial iterate relates to the problem.  FromSub/FromSuper carry
/// the one-sided certification of the iteration (monotone increase resp.
/// decrease); Warm is an uncertified start used inside continuations.
enum class StartMode { FromSub, FromSuper, Warm };

struct MonotoneOptions {
    StartMode mode = StartMode::FromSub;
    /// Certified early exit: (x_probe, level).  From a sub-solution the
    /// iterates only grow, so crossing the level from below certifies the
    /// fixed point exceeds it (mirrored from a super-solution).
    std::optional<std::pair<double, double>> stop_level;
    /// Slow-mode completion: near the pinned speed the contraction rate of
    /// the fixed-point iteration approaches 1 (the translation mode), so the
    /// geometric series is completed along the dominant error mode; the
    /// completed iterate is accepted only when its nonlinear residual drops
    /// below resid_tol (absolute, shifted system), else it restarts the
    /// iteration when it improves the residual.  Disables the certified
    /// sandwich/monotonicity guarantees, so it is reserved for uncertified
    /// inner solves.
    bool aitken_cycles = false;
    double resid_tol = 0.0;
};

struct MonotoneResult {
    FrontProfile profile;
    IterationTrace trace;
    bool sub_check_ok = true;    // discrete sub-solution inequality held at entry
    bool super_check_ok = true;
    double sub_violation = 0.0;
    double super_violation = 0.0;
    bool spatial_monotone = true;
    bool early_stopped = false;
    bool aitken_accepted = false;
};

/// Assembled and factorized lambda-shifted operator on a fixed geometry:
/// the matrix does not depend on the tail values, so one factorization
/// serves every boundary datum and every iteration step.
class PreparedOperator {
  public:
    PreparedOperator(const GridSpec& grid, FractionalOrder s, double epsilon, double mu,
                     double lambda);

    const OperatorMatrix& op() const { return op_; }
    const LinearSystem& system() const { return *lu_; }
    double lambda() const { return op_.lambda; }

    /// Tail load for the stored geometry with substituted tail models.
    Eigen::VectorXd tail_load(const TailModel& left, const TailModel& right) const;

  private:
    GridSpec geometry_;
    FractionalOrder s_;
    OperatorMatrix op_;
    std::unique_ptr<LinearSystem> lu_;
};

/// Spec'd linear solve on an assembled operator: unique solution with
/// residual verification (see LinearSystem).
Eigen::VectorXd solve_linear(const OperatorMatrix& op, const Eigen::VectorXd& load);

/// The lambda-shifted fixed-point iteration
///   (-eps d_xx + (-Delta)^s + mu d_x + lambda) u_{n+1} = F(u_n) + lambda u_n + bc
/// starting from `sub` (or `super`), with boundary data taken from the
/// problem grid's tail models.  Stops when ||u_{n+1}-u_n||_inf < tol_iter or
/// max_iters; throws IterationError on non-convergence and
/// InvariantViolationError when a certified run escapes [sub, super] by more
/// than 1e-6.
MonotoneResult monotone_iterate(const Nonlinearity& f, const SolveParams& params,
                                const GridSpec& grid, const FrontProfile& sub,
                                const FrontProfile& super, const MonotoneOptions& opts = {},
                                const PreparedOperator* prepared = nullptr);

/// Flat profile helpers (the canonical sub/super of the truncated problem).
FrontProfile flat_profile(const GridSpec& geometry, FractionalOrder s, double grid_value,
                          double left_tail_value, double right_tail_value);
inline FrontProfile sub_profile_theta0(const GridSpec& g, FractionalOrder s, double vartheta) {
    return flat_profile(g, s, 0.0, vartheta, 0.0);
}
inline FrontProfile super_profile_one_theta(const GridSpec& g, FractionalOrder s,
                                            double vartheta) {
    return flat_profile(g, s, 1.0, vartheta, 1.0);
}

struct NormalizeResult {
    bool normalized = false;
    FrontProfile profile;
    double vartheta = 0.0;
    double achieved = 0.0;  // phi(normalization point) actually attained
    bool fallback_scan_used = false;
    bool scan_monotone = true;
    std::vector<std::pair<double, double>> scan;  // (vartheta, S(vartheta)) samples
    long total_inner_iterations = 0;
};

/// Enforce the normalization phi(-1) = theta by root finding in the boundary
/// datum vartheta.  A 16-point pre-scan of S: vartheta -> phi(-1) guards the
/// monotonicity assumption (falling back to a denser scan when violated);
/// the bracketed refinement then drives |phi(-1) - theta| below tol_norm.
/// When S stays above theta for every vartheta down to 1e-6 the distinguished
/// no-normalization outcome is returned (normalized = false), never an error:
/// it is the non-existence signature.
NormalizeResult normalize_theta(const Nonlinearity& f, const SolveParams& params,
                                const GridSpec& grid_geometry, FractionalOrder s, double theta,
                                const FrontProfile* warm_hint = nullptr,
                                const PreparedOperator* prepared = nullptr);

}  // namespace fkpp
