#include "fkpp/bvp_solver.hpp"

#include <algorithm>
#include <cmath>

namespace fkpp {

namespace {

double sup_norm(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Largest violation of the one-sided property: L w <= F(w) (sub) resp. >=
// (super) on the grid, evaluated with w's own declared tails, plus the
// boundary comparison w <= problem data (resp. >=) sampled along the tails.
double one_sided_violation(const FrontProfile& w, const Nonlinearity& f, double epsilon,
                           double mu, const GridSpec& problem, bool sub) {
    std::vector<double> lw = operator_apply(w, epsilon, mu, 0.0);
    double worst = 0.0;
    for (size_t i = 0; i < lw.size(); ++i) {
        double gap = lw[i] - f(clamp01(w.values[i]));
        if (!sub) gap = -gap;
        worst = std::max(worst, gap);
    }
    const double h = w.grid.spacing();
    for (double mult : {1.0, 1e1, 1e2, 1e4, 1e6}) {
        double xl = w.grid.left_end() - h * mult;
        double xr = w.grid.right_end() + h * mult;
        double gl = w.grid.left_tail().eval(xl) - problem.left_tail().eval(xl);
        double gr = w.grid.right_tail().eval(xr) - problem.right_tail().eval(xr);
        if (!sub) {
            gl = -gl;
            gr = -gr;
        }
        worst = std::max({worst, gl, gr});
    }
    return worst;
}

}  // namespace

PreparedOperator::PreparedOperator(const GridSpec& grid, FractionalOrder s, double epsilon,
                                   double mu, double lambda)
    : geometry_(grid), s_(s), op_(assemble_operator(grid, s, epsilon, mu, lambda)) {
    lu_ = std::make_unique<LinearSystem>(op_.a);
}

Eigen::VectorXd PreparedOperator::tail_load(const TailModel& left, const TailModel& right) const {
    GridSpec g = geometry_.with_left_tail(left).with_right_tail(right);
    return compute_tail_load(g, s_, op_.epsilon, op_.mu, op_.advection);
}

Eigen::VectorXd solve_linear(const OperatorMatrix& op, const Eigen::VectorXd& load) {
    return LinearSystem(op.a).solve(load);
}

FrontProfile flat_profile(const GridSpec& geometry, FractionalOrder s, double grid_value,
                          double left_tail_value, double right_tail_value) {
    GridSpec g = geometry.with_left_tail(TailModel::constant(left_tail_value))
                     .with_right_tail(TailModel::constant(right_tail_value));
    return FrontProfile(g, std::vector<double>(g.n_points(), grid_value), s);
}

MonotoneResult monotone_iterate(const Nonlinearity& f, const SolveParams& params,
                                const GridSpec& grid, const FrontProfile& sub,
                                const FrontProfile& super, const MonotoneOptions& opts,
                                const PreparedOperator* prepared) {
    const int n = grid.n_points();
    if (static_cast<int>(sub.values.size()) != n || static_cast<int>(super.values.size()) != n)
        throw std::invalid_argument("monotone_iterate: sub/super size mismatch with grid");
    if (sub.s.value() != super.s.value())
        throw std::invalid_argument("monotone_iterate: sub/super fractional order mismatch");

    for (int i = 0; i < n; ++i)
        if (sub.values[i] > super.values[i] + 1e-12)
            throw std::invalid_argument("monotone_iterate: sub must lie below super");

    const double lambda = params.lambda_for(f);
    std::unique_ptr<PreparedOperator> own;
    if (!prepared) {
        own = std::make_unique<PreparedOperator>(grid, sub.s, params.epsilon, params.mu, lambda);
        prepared = own.get();
    }

    MonotoneResult res{FrontProfile(grid, sub.values, sub.s), IterationTrace{}};
    res.profile.mu = params.mu;
    res.profile.epsilon = params.epsilon;

    // discrete sub/super-solution inequalities; violations beyond 1e-8 are
    // reported, and sandwich enforcement is downgraded for uncertified input
    res.sub_violation = one_sided_violation(sub, f, params.epsilon, params.mu, grid, true);
    res.super_violation = one_sided_violation(super, f, params.epsilon, params.mu, grid, false);
    res.sub_check_ok = res.sub_violation <= 1e-8;
    res.super_check_ok = res.super_violation <= 1e-8;
    const bool certified = res.sub_check_ok && res.super_check_ok && opts.mode != StartMode::Warm;

    const Eigen::VectorXd bc = prepared->tail_load(grid.left_tail(), grid.right_tail());

    Eigen::VectorXd u(n);
    const std::vector<double>& start =
        (opts.mode == StartMode::FromSuper) ? super.values : sub.values;
    for (int i = 0; i < n; ++i) u(i) = start[i];

    Eigen::VectorXd rhs(n), next(n);
    Eigen::VectorXd du_prev = Eigen::VectorXd::Zero(n);
    IterationTrace& trace = res.trace;
    const int sign = (opts.mode == StartMode::FromSuper) ? -1 : +1;
    const bool enforce = certified && !opts.aitken_cycles;

    auto shifted_rhs = [&](const Eigen::VectorXd& v, Eigen::VectorXd& out) {
        for (int i = 0; i < n; ++i) out(i) = f(clamp01(v(i))) + lambda * v(i) + bc(i);
    };

    std::vector<double> uv(n);

    for (int k = 0; k < params.max_iters; ++k) {
        shifted_rhs(u, rhs);
        next = prepared->system().solve_fast(rhs);
        Eigen::VectorXd du = next - u;
        double diff = sup_norm(du);
        trace.sup_diffs.push_back(diff);
        ++trace.iterate_count;

        if (opts.mode != StartMode::Warm) {
            double backstep = (sign > 0) ? (-du.minCoeff()) : du.maxCoeff();
            if (backstep > params.tol_mono) trace.monotone_in_n = false;
        }
        double below = 0.0, above = 0.0;
        for (int i = 0; i < n; ++i) {
            below = std::max(below, sub.values[i] - next(i));
            above = std::max(above, next(i) - super.values[i]);
        }
        if (enforce && std::max(below, above) > 1e-6)
            throw InvariantViolationError("monotone_iterate: iterate escaped [sub, super] by " +
                                          std::to_string(std::max(below, above)));

        bool restarted = false;
        if (opts.aitken_cycles && k > 30 && diff < 3e-2 && (k % 100) == 99) {
            double dpp = du_prev.dot(du_prev);
            double rho = dpp > 0.0 ? du.dot(du_prev) / dpp : 0.0;
            if (rho > 0.6 && rho < 0.99995) {
                Eigen::VectorXd star = next + du * (rho / (1.0 - rho));
                for (int i = 0; i < n; ++i) star(i) = clamp01(star(i));
                Eigen::VectorXd rs(n);
                shifted_rhs(star, rs);
                double r_star = sup_norm(prepared->op().a * star - rs);
                if (r_star < opts.resid_tol) {
                    u = star;
                    trace.converged = true;
                    res.aitken_accepted = true;
                    break;
                }
                shifted_rhs(next, rs);
                double r_next = sup_norm(prepared->op().a * next - rs);
                if (r_star < r_next) {
                    u = star;
                    restarted = true;
                    du_prev.setZero();
                }
            }
        }
        if (!restarted) {
            u = next;
            du_prev = du;
        }

        if (opts.stop_level && opts.mode != StartMode::Warm) {
            for (int i = 0; i < n; ++i) uv[i] = u(i);
            double probe = grid_interp(grid, uv, opts.stop_level->first);
            bool crossed = (opts.mode == StartMode::FromSub) ? probe > opts.stop_level->second
                                                             : probe < opts.stop_level->second;
            if (crossed) {
                res.early_stopped = true;
                break;
            }
        }
        if (diff < params.tol_iter) {
            trace.converged = true;
            break;
        }
    }

    if (!trace.converged && !res.early_stopped)
        throw IterationError("monotone_iterate: no convergence after " +
                                 std::to_string(params.max_iters) + " iterations (last diff " +
                                 std::to_string(trace.sup_diffs.back()) + ")",
                             trace);

    res.profile.values.assign(u.data(), u.data() + n);
    for (int i = 0; i < n; ++i) res.profile.values[i] = clamp01(res.profile.values[i]);

    // nonlinear residual of the shifted system at exit
    for (int i = 0; i < n; ++i) rhs(i) = f(res.profile.values[i]) + lambda * u(i) + bc(i);
    trace.final_residual = sup_norm(prepared->op().a * u - rhs);

    for (int i = 1; i < n; ++i)
        if (res.profile.values[i - 1] - res.profile.values[i] > params.tol_mono)
            res.spatial_monotone = false;
    return res;
}

namespace {

struct SEval {
    double value;  // phi(-1), or a certified one-sided bound on it
    FrontProfile profile;
    long iterations;
    bool early = false;
};

// One evaluation of S(vartheta) = phi_r(-1): monotone solve with boundary
// datum vartheta.  `start` is the initial iterate; in FromSuper mode it acts
// as the super-solution, otherwise as the sub.
// One evaluation of S(vartheta) = phi_r(-1) resolved to about s_accuracy.
// The weakly pinned translation mode makes the plain iteration rate approach
// 1 on wide grids, so the inner solve accepts the residual-verified
// completion; the residual threshold is calibrated to the requested
// S-accuracy (measured transfer factor of about 50 from the shifted-system
// residual to the profile error).
SEval eval_S(const Nonlinearity& f, const SolveParams& params, const GridSpec& geometry,
             FractionalOrder s, double vartheta, const FrontProfile& start, StartMode mode,
             const PreparedOperator& prepared, double s_accuracy,
             std::optional<std::pair<double, double>> stop_level = std::nullopt) {
    GridSpec problem = geometry.with_left_tail(TailModel::constant(vartheta))
                           .with_right_tail(TailModel::constant(1.0));
    MonotoneOptions opts;
    opts.mode = mode;
    opts.stop_level = stop_level;
    opts.aitken_cycles = true;
    opts.resid_tol = s_accuracy * (1.0 + params.lambda_for(f)) / 50.0;
    MonotoneResult r =
        (mode == StartMode::FromSuper)
            ? monotone_iterate(f, params, problem, sub_profile_theta0(problem, s, vartheta),
                               start, opts, &prepared)
            : monotone_iterate(f, params, problem, start,
                               super_profile_one_theta(problem, s, vartheta), opts, &prepared);
    double val = r.profile.value_at(-1.0);
    if (r.early_stopped) {
        // keep the certified side of the level so bracketing sees the sign
        val = (mode == StartMode::FromSub) ? std::max(val, stop_level->second)
                                           : std::min(val, stop_level->second);
    }
    return SEval{val, std::move(r.profile), r.trace.iterate_count, r.early_stopped};
}

}  // namespace

NormalizeResult normalize_theta(const Nonlinearity& f, const SolveParams& params,
                                const GridSpec& grid_geometry, FractionalOrder s, double theta,
                                const FrontProfile* warm_hint, const PreparedOperator* prepared) {
    if (!(theta > 0.0) || !(theta < 1.0))
        throw std::invalid_argument("normalize_theta: theta must lie in (0,1)");
    if (!(grid_geometry.left_end() < -1.0) || !(grid_geometry.right_end() > -1.0))
        throw std::invalid_argument("normalize_theta: normalization point -1 outside grid");

    const double lambda = params.lambda_for(f);
    std::unique_ptr<PreparedOperator> own;
    if (!prepared) {
        own = std::make_unique<PreparedOperator>(grid_geometry, s, params.epsilon, params.mu,
                                                 lambda);
        prepared = own.get();
    }

    NormalizeResult res{false, flat_profile(grid_geometry, s, 0.0, 0.0, 1.0), 0.0, 0.0,
                        false, true,
                        {},    0};

    const double vt_min = 1e-6, vt_max = 0.97;
    const double scan_accuracy = 1e-6;
    const double up_level = theta + 10.0 * scan_accuracy;
    const double down_level = theta - 10.0 * scan_accuracy;
    // bracket: lo has S < theta, hi has S > theta; early-stopped samples are
    // one-sided certificates, their values are sign-true but capped
    std::optional<std::pair<double, FrontProfile>> lo, hi;
    double g_lo = 0.0, g_hi = 0.0;
    bool lo_capped = false, hi_capped = false;

    auto record = [&](double vt, const SEval& e) {
        res.scan.emplace_back(vt, e.value);
        res.total_inner_iterations += e.iterations;
        if (e.value < theta) {
            if (!lo || vt > lo->first) {
                lo = {vt, e.profile};
                g_lo = e.value - theta;
                lo_capped = e.early;
            }
        } else {
            if (!hi || vt < hi->first) {
                hi = {vt, e.profile};
                g_hi = e.value - theta;
                hi_capped = e.early;
            }
        }
    };

    if (warm_hint) {
        // trust the prior stage: probe its boundary datum, then walk
        // geometrically; descents reuse the last profile as a certified
        // super-solution, ascents as a certified sub-solution
        double vt = std::clamp(warm_hint->grid.left_tail().value, vt_min, vt_max);
        SEval e = eval_S(f, params, grid_geometry, s, vt, *warm_hint, StartMode::Warm, *prepared,
                         scan_accuracy);
        record(vt, e);
        FrontProfile cur = e.profile;
        double vt_cur = vt;
        // the root barely moves between stages: walk gently first, then
        // escalate geometrically
        double step = 1.05;
        while (!lo && vt > vt_min) {
            vt = std::max(vt_min, vt / step);
            step *= 4.0;
            e = eval_S(f, params, grid_geometry, s, vt, cur, StartMode::FromSuper, *prepared,
                       scan_accuracy, std::pair<double, double>{-1.0, down_level});
            record(vt, e);
            cur = e.profile;
            vt_cur = vt;
        }
        vt = vt_cur;
        step = 1.05;
        while (!hi && vt < vt_max) {
            vt = std::min(vt_max, vt * step);
            step *= 4.0;
            e = eval_S(f, params, grid_geometry, s, vt, cur, StartMode::FromSub, *prepared,
                       scan_accuracy, std::pair<double, double>{-1.0, up_level});
            record(vt, e);
            cur = e.profile;
        }
    } else {
        // 16-point ascending pre-scan; every start is the previous profile,
        // a certified sub-solution for the larger datum, so the chain is
        // cheap and the sampled S values certify the bracket
        const int n_scan = 16;
        FrontProfile start = sub_profile_theta0(grid_geometry, s, vt_min);
        for (int k = 0; k < n_scan; ++k) {
            double vt = std::exp(std::log(vt_min) +
                                 (std::log(vt_max) - std::log(vt_min)) * k / (n_scan - 1.0));
            SEval e = eval_S(f, params, grid_geometry, s, vt, start, StartMode::FromSub, *prepared,
                             scan_accuracy, std::pair<double, double>{-1.0, up_level});
            record(vt, e);
            start = e.profile;
            if (k == 0 && e.value >= theta) {
                // the smallest admissible datum already overshoots; along
                // this certified ascending chain S can only grow, the
                // numerical signature of Xi = (0,1)
                break;
            }
        }
        for (size_t k = 1; k < res.scan.size(); ++k)
            if (res.scan[k].second < res.scan[k - 1].second - 1e-6) res.scan_monotone = false;
        if (!res.scan_monotone && !(lo && hi)) {
            res.fallback_scan_used = true;
            FrontProfile cold = sub_profile_theta0(grid_geometry, s, vt_min);
            for (int k = 0; k < 64 && !(lo && hi); ++k) {
                double vt = vt_min + (vt_max - vt_min) * (k + 0.5) / 64.0;
                SEval e = eval_S(f, params, grid_geometry, s, vt, cold, StartMode::FromSub,
                                 *prepared, scan_accuracy);
                record(vt, e);
            }
        }
    }

    if (!lo || !hi) {
        // no bracket: either S > theta down to 1e-6 (the non-existence
        // signature) or S < theta throughout; report, never throw
        if (hi)
            res.profile = hi->second;
        else if (lo)
            res.profile = lo->second;
        res.achieved = res.profile.value_at(-1.0);
        return res;
    }

    // bracketed false-position (Illinois) refinement of G = S - theta;
    // every candidate starts from the lower-bracket profile, a certified
    // sub-solution inside the bracket
    double a = lo->first, b = hi->first;
    double ga = g_lo, gb = g_hi;
    // capped endpoints never seed the incumbent: their value is only a bound
    double best_g = std::numeric_limits<double>::infinity();
    FrontProfile best = lo->second;
    double best_vt = a;
    if (!lo_capped) {
        best_g = std::abs(ga);
    }
    if (!hi_capped && std::abs(gb) < best_g) {
        best_g = std::abs(gb);
        best = hi->second;
        best_vt = b;
    }
    int side = 0;
    int stagnant = 0;

    for (int it = 0; it < 80 && best_g >= params.tol_norm; ++it) {
        if (b - a < 1e-12 * std::max(1.0, std::abs(a))) break;
        if (stagnant >= 8) break;  // solver noise floor reached
        double m = (gb != ga) ? (a - ga * (b - a) / (gb - ga)) : 0.5 * (a + b);
        if (!(m > a) || !(m < b)) m = 0.5 * (a + b);
        // tighten the evaluation as the bracket values shrink
        double need = std::clamp(0.02 * std::min(std::abs(ga), std::abs(gb)),
                                 0.25 * params.tol_norm, scan_accuracy);
        SEval e = eval_S(f, params, grid_geometry, s, m, lo->second, StartMode::FromSub, *prepared,
                         need);
        res.scan.emplace_back(m, e.value);
        res.total_inner_iterations += e.iterations;
        double gm = e.value - theta;
        if (std::abs(gm) < best_g) {
            best_g = std::abs(gm);
            best = e.profile;
            best_vt = m;
            stagnant = 0;
        } else {
            ++stagnant;
        }
        if (gm < 0.0) {
            a = m;
            ga = gm;
            lo = {m, std::move(e.profile)};
            if (side == -1) gb *= 0.5;
            side = -1;
        } else {
            b = m;
            gb = gm;
            if (side == +1) ga *= 0.5;
            side = +1;
        }
    }

    res.profile = best;
    res.vartheta = best_vt;
    res.achieved = best.value_at(-1.0);
    if (best_g < params.tol_norm) {
        res.normalized = true;
        res.profile.normalization_point = -1.0;
        res.profile.normalization_value = theta;
    }
    return res;
}

}  // namespace fkpp
