#include "fkpp/speed_finder.hpp"

#include <algorithm>
#include <cmath>

namespace fkpp {

double nu_bound(FractionalOrder s, double epsilon, double a2) {
    if (epsilon < 0.0) throw std::invalid_argument("nu_bound: epsilon must be >= 0");
    if (!(a2 > 0.0)) throw std::invalid_argument("nu_bound: A2 must be > 0");
    const double sv = s.value();
    return 2.0 * sv * epsilon + 1.0 / (2.0 * sv * (2.0 * sv - 1.0)) + (a2 + 1.0) / (2.0 * sv - 1.0);
}

namespace {

struct PhaseEval {
    double g = 0.0;  // phi(0) - level (possibly a certified one-sided cap)
    FrontProfile profile;
    double mu = 0.0;
    long iterations = 0;
};

// Inner combustion solve at fixed mu.  First pass on the hard-zero left
// tail with a wide certified early exit; then the left tail is replaced by
// the fitted |x|^{-2s} decay and the solve repeated warm, which removes the
// O(L^{1-2s}) truncation bias of the pinned speed.  `start` may be null
// (cold start from the zero sub-solution).
PhaseEval eval_phase(const Nonlinearity& f, SolveParams params, const GridSpec& problem,
                     FractionalOrder s, double mu, double level, const FrontProfile* start,
                     StartMode mode, bool allow_early, bool need_profile = false) {
    params.mu = mu;
    const double lambda = params.lambda_for(f);
    PreparedOperator prepared(problem, s, params.epsilon, mu, lambda);

    // warm-start the tail model too: with the start's fitted left tail kept
    // in the problem, a larger-mu start remains a genuine sub-solution
    GridSpec pass1 = problem;
    if (start && mode == StartMode::FromSub &&
        start->grid.left_tail().kind == TailModel::Kind::PowerLaw)
        pass1 = problem.with_left_tail(start->grid.left_tail());

    MonotoneOptions opts;
    opts.mode = mode;
    // slow-mode completion: near the pinned speed the plain iteration has a
    // contraction rate close to 1 (translation mode)
    opts.aitken_cycles = true;
    opts.resid_tol = (need_profile ? 1e-9 : 1e-4) * (1.0 + lambda);
    // wide margin: the certified sign survives the tail correction below
    const double margin = 0.05;
    FrontProfile sub = sub_profile_theta0(pass1, s, 0.0);
    FrontProfile super = flat_profile(pass1, s, 1.0, 1.0, 1.0);
    if (start) {
        if (mode == StartMode::FromSuper)
            super = *start;
        else
            sub = *start;  // FromSub or Warm: the start rides in the sub slot
    }
    if (allow_early && mode == StartMode::FromSub) opts.stop_level = {0.0, level + margin};
    if (allow_early && mode == StartMode::FromSuper) opts.stop_level = {0.0, level - margin};

    MonotoneResult r = monotone_iterate(f, params, pass1, sub, super, opts, &prepared);
    long iters = r.trace.iterate_count;
    if (r.early_stopped) {
        double val = r.profile.value_at(0.0);
        val = (mode == StartMode::FromSub) ? std::max(val, level + margin)
                                           : std::min(val, level - margin);
        return PhaseEval{val - level, std::move(r.profile), mu, iters};
    }

    // self-consistent decaying tail (two corrections suffice: the
    // coefficient is stable on the second fit)
    MonotoneOptions warm_opts;
    warm_opts.mode = StartMode::Warm;
    warm_opts.aitken_cycles = true;
    warm_opts.resid_tol = opts.resid_tol;
    FrontProfile cur = std::move(r.profile);
    for (int pass = 0; pass < 2; ++pass) {
        TailModel tail = fit_power_tail(cur, -2.0 * s.value());
        if (tail.kind != TailModel::Kind::PowerLaw) break;
        GridSpec corrected = problem.with_left_tail(tail);
        FrontProfile warm_start(corrected, cur.values, s);
        FrontProfile super1 = flat_profile(corrected, s, 1.0, 1.0, 1.0);
        MonotoneResult rc =
            monotone_iterate(f, params, corrected, warm_start, super1, warm_opts, &prepared);
        iters += rc.trace.iterate_count;
        double change = 0.0;
        for (int i = 0; i < corrected.n_points(); ++i)
            change = std::max(change, std::abs(rc.profile.values[i] - cur.values[i]));
        cur = std::move(rc.profile);
        if (change < 1e-6) break;
    }
    return PhaseEval{cur.value_at(0.0) - level, std::move(cur), mu, iters};
}

}  // namespace

CombustionSpeedResult combustion_speed(const Nonlinearity& f_sigma, FractionalOrder s,
                                       double epsilon, const GridSpec& grid,
                                       const SolveParams& params, const FrontProfile* warm) {
    if (f_sigma.kind() != Nonlinearity::Kind::CombustionCutoff)
        throw std::invalid_argument("combustion_speed: nonlinearity must be a combustion cutoff");
    if (epsilon < 0.0) throw std::invalid_argument("combustion_speed: epsilon must be >= 0");
    if (!(grid.left_end() < 0.0) || !(grid.right_end() > 0.0))
        throw std::invalid_argument("combustion_speed: grid must contain the phase point 0");

    GridSpec problem =
        grid.with_left_tail(TailModel::constant(0.0)).with_right_tail(TailModel::constant(1.0));
    SolveParams sp = params;
    sp.epsilon = epsilon;
    const double level = 0.5 * (f_sigma.sigma() + 1.0);
    const double nu = nu_bound(s, epsilon, f_sigma.a2());

    CombustionSpeedResult out{0.0, flat_profile(problem, s, 0.0, 0.0, 1.0), 0.0, {}, 0};

    // geometric bracket scan of (1e-3, nu], descending; the response
    // direction falls out of the recorded signs rather than being assumed
    std::optional<PhaseEval> scan_prev;
    std::optional<PhaseEval> lo_mu, hi_mu;  // bracket endpoints ordered by mu
    auto scan_probe = [&](double mu) {
        // descending scan: the previous (larger-mu) solution is a sub;
        // a cross-call warm profile is only an uncertified start
        if (scan_prev)
            return eval_phase(f_sigma, sp, problem, s, mu, level, &scan_prev->profile,
                              StartMode::FromSub, true);
        if (warm) return eval_phase(f_sigma, sp, problem, s, mu, level, warm, StartMode::Warm,
                                    false);
        return eval_phase(f_sigma, sp, problem, s, mu, level, nullptr, StartMode::FromSub, false);
    };
    for (double mu = nu; mu >= 1e-3; mu *= 0.5) {
        PhaseEval e = scan_probe(mu);
        out.mu_scan.emplace_back(mu, e.g);
        out.total_inner_iterations += e.iterations;
        if (scan_prev && ((scan_prev->g < 0.0) != (e.g < 0.0))) {
            lo_mu = std::move(e);
            hi_mu = std::move(scan_prev);
            break;
        }
        scan_prev = std::move(e);
    }
    if (!lo_mu)
        throw BracketError("combustion_speed: no bracket for the phase condition in (1e-3, nu]",
                           out.mu_scan);

    // bracketed false-position (Illinois) in mu; every candidate starts from
    // the larger-mu endpoint profile, a certified sub-solution
    PhaseEval lo = std::move(*lo_mu), hi = std::move(*hi_mu);  // lo.mu < hi.mu
    int side = 0;
    while (hi.mu - lo.mu > params.mu_tol) {
        double denom = hi.g - lo.g;
        double m =
            (denom != 0.0) ? lo.mu - lo.g * (hi.mu - lo.mu) / denom : 0.5 * (lo.mu + hi.mu);
        if (!(m > lo.mu) || !(m < hi.mu)) m = 0.5 * (lo.mu + hi.mu);
        PhaseEval e = eval_phase(f_sigma, sp, problem, s, m, level, &hi.profile,
                                 StartMode::FromSub, true);
        out.mu_scan.emplace_back(m, e.g);
        out.total_inner_iterations += e.iterations;
        bool same_sign_as_lo = (e.g < 0.0) == (lo.g < 0.0);
        if (same_sign_as_lo) {
            lo = std::move(e);
            if (side == -1) hi.g *= 0.5;
            side = -1;
        } else {
            hi = std::move(e);
            if (side == +1) lo.g *= 0.5;
            side = +1;
        }
    }

    out.mu_c = 0.5 * (lo.mu + hi.mu);
    PhaseEval final_eval = eval_phase(f_sigma, sp, problem, s, out.mu_c, level, &hi.profile,
                                      StartMode::FromSub, false, true);
    out.total_inner_iterations += final_eval.iterations;
    out.profile = std::move(final_eval.profile);
    out.identity_rel_err = speed_identity(out.profile, f_sigma);
    if (!(out.identity_rel_err < 0.02))
        throw std::runtime_error("combustion_speed: speed identity defect " +
                                 std::to_string(out.identity_rel_err) +
                                 " exceeds 2% (discretization too coarse)");
    return out;
}

SpeedEstimate estimate_mu_star(const Nonlinearity& f_base, FractionalOrder s, double epsilon,
                               const std::vector<double>& sigma_schedule, const GridSpec& grid,
                               const SolveParams& params) {
    if (f_base.kind() != Nonlinearity::Kind::GeneralizedKpp)
        throw std::invalid_argument("estimate_mu_star: base must be generalized KPP");
    if (sigma_schedule.size() < 4)
        throw std::invalid_argument("estimate_mu_star: need at least 4 sigma values");
    for (size_t i = 1; i < sigma_schedule.size(); ++i)
        if (!(sigma_schedule[i] < sigma_schedule[i - 1]))
            throw std::invalid_argument("estimate_mu_star: schedule must be strictly decreasing");

    SpeedEstimate est;
    est.sigma_schedule = sigma_schedule;
    est.epsilon = epsilon;
    est.nu_bound = fkpp::nu_bound(s, epsilon, f_base.a2());

    std::optional<FrontProfile> warm;
    for (double sigma : sigma_schedule) {
        Nonlinearity f_sigma = Nonlinearity::combustion_cutoff(f_base, sigma);
        CombustionSpeedResult r =
            combustion_speed(f_sigma, s, epsilon, grid, params, warm ? &*warm : nullptr);
        est.mu_values.push_back(r.mu_c);
        est.identity_errs.push_back(r.identity_rel_err);
        warm = std::move(r.profile);
    }

    for (size_t i = 1; i < est.mu_values.size(); ++i)
        if (est.mu_values[i] < est.mu_values[i - 1] - 1e-6)
            throw OrderingError("estimate_mu_star: speed ordering violated between sigma=" +
                                std::to_string(sigma_schedule[i - 1]) + " and " +
                                std::to_string(sigma_schedule[i]) +
                                " (discretization too coarse)");

    // fit mu(sigma) = mu_star - c sigma^q through the last three points
    const size_t k = est.mu_values.size();
    double s1 = sigma_schedule[k - 3], s2 = sigma_schedule[k - 2], s3 = sigma_schedule[k - 1];
    double m1 = est.mu_values[k - 3], m2 = est.mu_values[k - 2], m3 = est.mu_values[k - 1];
    double d1 = m2 - m1, d2 = m3 - m2;
    if (d1 > 1e-14 && d2 > 1e-14) {
        auto ratio = [&](double q) {
            return (std::pow(s2, q) - std::pow(s3, q)) / (std::pow(s1, q) - std::pow(s2, q));
        };
        double target = d2 / d1;
        double qa = 0.02, qb = 12.0;
        double fa = ratio(qa) - target, fb = ratio(qb) - target;
        if (fa * fb < 0.0) {
            for (int it = 0; it < 200; ++it) {
                double qm = 0.5 * (qa + qb);
                double fm = ratio(qm) - target;
                if (fa * fm <= 0.0) {
                    qb = qm;
                    fb = fm;
                } else {
                    qa = qm;
                    fa = fm;
                }
            }
            est.fit_exponent_q = 0.5 * (qa + qb);
            est.fit_coefficient =
                d1 / (std::pow(s1, est.fit_exponent_q) - std::pow(s2, est.fit_exponent_q));
            est.extrapolated_mu_star = m3 + est.fit_coefficient * std::pow(s3, est.fit_exponent_q);
        } else {
            est.extrapolated_mu_star = m3;  // no admissible exponent: no extrapolation
        }
    } else {
        est.extrapolated_mu_star = m3;
    }
    double mu_max = *std::max_element(est.mu_values.begin(), est.mu_values.end());
    if (est.extrapolated_mu_star < mu_max) est.extrapolated_mu_star = mu_max;

    if (k >= 4 && est.fit_coefficient > 0.0) {
        double pred = est.extrapolated_mu_star -
                      est.fit_coefficient * std::pow(sigma_schedule[k - 4], est.fit_exponent_q);
        est.fit_residual = std::abs(pred - est.mu_values[k - 4]);
    }

    if (!(est.extrapolated_mu_star <= est.nu_bound + 1e-9))
        throw OrderingError("estimate_mu_star: extrapolated mu_star " +
                            std::to_string(est.extrapolated_mu_star) +
                            " exceeds the analytic bound " + std::to_string(est.nu_bound));
    return est;
}

namespace {

FrontProfile resample(const FrontProfile& src, const GridSpec& geometry) {
    std::vector<double> v(geometry.n_points());
    for (int i = 0; i < geometry.n_points(); ++i)
        v[i] = std::clamp(src.value_at(geometry.point(i)), 0.0, 1.0);
    FrontProfile out(geometry, std::move(v), src.s);
    out.mu = src.mu;
    out.epsilon = src.epsilon;
    return out;
}

}  // namespace

ContinuationResult epsilon_continuation_front(const Nonlinearity& f, FractionalOrder s,
                                              double mu,
                                              const std::vector<double>& epsilon_schedule,
                                              const GridSpec& grid, const SolveParams& params) {
    if (epsilon_schedule.empty())
        throw std::invalid_argument("epsilon_continuation_front: empty schedule");
    for (size_t i = 1; i < epsilon_schedule.size(); ++i)
        if (!(epsilon_schedule[i] < epsilon_schedule[i - 1]))
            throw std::invalid_argument("epsilon_continuation_front: schedule must decrease");
    if (epsilon_schedule.back() < 0.0)
        throw std::invalid_argument("epsilon_continuation_front: epsilon must be >= 0");
    if (!(mu > 0.0)) throw std::invalid_argument("epsilon_continuation_front: mu must be > 0");

    GridSpec geometry = grid;
    const double theta = f.theta();
    std::vector<ContinuationStage> stages;
    std::optional<FrontProfile> current;
    int extensions = 0;

    for (size_t stage = 0; stage < epsilon_schedule.size(); ++stage) {
        SolveParams sp = params;
        sp.epsilon = epsilon_schedule[stage];
        sp.mu = mu;

        NormalizeResult nr =
            normalize_theta(f, sp, geometry, s, theta, current ? &*current : nullptr);
        if (nr.normalized && stage == 0) {
            // saturation guard: the constant-1 right tail must be a faithful
            // model over the last tenth of the grid, else extend and redo
            while (extensions < params.max_right_extends) {
                double worst = 0.0;
                for (int i = 0; i < geometry.n_points(); ++i)
                    if (geometry.point(i) >= geometry.right_end() -
                                                 0.1 * (geometry.right_end() - geometry.left_end()))
                        worst = std::max(worst, 1.0 - nr.profile.values[i]);
                if (worst <= params.tol_right) break;
                ++extensions;
                double h = geometry.spacing();
                double new_right = geometry.right_end() * 2.0;
                int n = static_cast<int>(std::lround((new_right - geometry.left_end()) / h)) + 1;
                geometry = GridSpec(geometry.left_end(), geometry.left_end() + h * (n - 1), n,
                                    geometry.left_tail(), geometry.right_tail());
                // the seed keeps the normalized stage's boundary datum so the
                // redo can walk from it
                FrontProfile seed =
                    resample(nr.profile, geometry.with_left_tail(nr.profile.grid.left_tail())
                                             .with_right_tail(TailModel::constant(1.0)));
                nr = normalize_theta(f, sp, geometry, s, theta, &seed);
                if (!nr.normalized) break;
            }
        }

        ContinuationStage info;
        info.epsilon = sp.epsilon;
        info.normalized = nr.normalized;
        info.vartheta = nr.vartheta;
        info.achieved = nr.achieved;
        info.inner_iterations = nr.total_inner_iterations;
        stages.push_back(info);

        if (!nr.normalized) {
            // probe the remaining stages cold so the error carries the full
            // per-stage signature
            for (size_t rest = stage + 1; rest < epsilon_schedule.size(); ++rest) {
                SolveParams sq = params;
                sq.epsilon = epsilon_schedule[rest];
                sq.mu = mu;
                NormalizeResult probe = normalize_theta(f, sq, geometry, s, theta);
                ContinuationStage pi;
                pi.epsilon = sq.epsilon;
                pi.normalized = probe.normalized;
                pi.vartheta = probe.vartheta;
                pi.achieved = probe.achieved;
                pi.inner_iterations = probe.total_inner_iterations;
                stages.push_back(pi);
            }
            throw ContinuationError("epsilon_continuation_front: no-normalization at eps=" +
                                        std::to_string(sp.epsilon) + " (mu below mu_star?)",
                                    stages, sp.epsilon);
        }
        current = nr.profile;
    }

    FrontProfile front = *current;
    GridSpec tagged = front.grid.with_left_tail(fit_power_tail(front));
    FrontProfile final_front(tagged, front.values, front.s);
    final_front.mu = front.mu;
    final_front.epsilon = front.epsilon;
    final_front.normalization_point = -1.0;
    final_front.normalization_value = theta;

    ContinuationResult out{final_front, run_diagnostics(final_front, f), stages, tagged,
                           extensions};
    return out;
}

}  // namespace fkpp
