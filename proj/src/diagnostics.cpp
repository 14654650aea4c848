#include "fkpp/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "fkpp/nonlocal_operator.hpp"
#include "fkpp/quadrature.hpp"

namespace fkpp {

namespace {

double trapezoid(const std::vector<double>& v, double h) {
    double acc = 0.5 * (v.front() + v.back());
    for (size_t i = 1; i + 1 < v.size(); ++i) acc += v[i];
    return acc * h;
}

// points of the left log window [left_end, -x_fit]
std::vector<int> left_window(const FrontProfile& p, double x_fit) {
    std::vector<int> idx;
    for (int i = 0; i < p.grid.n_points(); ++i)
        if (p.grid.point(i) <= -x_fit) idx.push_back(i);
    return idx;
}

}  // namespace

double speed_identity(const FrontProfile& profile, const Nonlinearity& f) {
    const GridSpec& grid = profile.grid;
    if (grid.right_tail().kind != TailModel::Kind::Constant)
        throw std::invalid_argument("speed_identity: right tail must be constant");
    double left_limit;
    if (grid.left_tail().kind == TailModel::Kind::PowerLaw) {
        if (!(grid.left_tail().exponent < 0.0))
            throw std::invalid_argument("speed_identity: left power tail must decay");
        left_limit = 0.0;
    } else {
        left_limit = grid.left_tail().value;
        if (std::abs(f(std::clamp(left_limit, 0.0, 1.0))) > 1e-14)
            throw std::invalid_argument(
                "speed_identity: constant left tail must sit at a zero of F");
    }

    const int n = grid.n_points();
    std::vector<double> fu(n);
    for (int i = 0; i < n; ++i) fu[i] = f(std::clamp(profile.values[i], 0.0, 1.0));
    double integral = trapezoid(fu, grid.spacing());

    // analytic left tail: F ~ scale u^p for u -> 0
    if (grid.left_tail().kind == TailModel::Kind::PowerLaw) {
        double c = grid.left_tail().coefficient;
        double e = grid.left_tail().exponent;
        double ep = e * f.p();
        if (ep < -1.0) {
            double L = std::abs(grid.left_end());
            double tail_val = c * std::pow(L, e);
            if (f.kind() == Nonlinearity::Kind::CombustionCutoff && tail_val <= f.sigma()) {
                // cutoff vanishes below sigma: the whole tail contributes 0
            } else {
                integral += f.scale() * std::pow(c, f.p()) * std::pow(L, ep + 1.0) / (-ep - 1.0);
            }
        }
    }
    // analytic right remainder: F ~ |F'(1)| (1-u), with (1-u) saturating
    // like |x|^{-2s} beyond the grid
    {
        double w_end = grid.right_tail().value - profile.values.back();
        double x_end = grid.right_end();
        if (w_end > 0.0 && x_end > 0.0) {
            double two_s = 2.0 * profile.s.value();
            integral += std::abs(f.fprime_at_one()) * w_end * x_end / (two_s - 1.0);
        }
    }

    double lhs = profile.mu * (grid.right_tail().value - left_limit);
    if (std::abs(lhs) < 1e-12) return std::abs(lhs - integral);
    return std::abs(lhs - integral) / std::abs(lhs);
}

DecayFit decay_fit(const FrontProfile& profile, double x_fit) {
    std::vector<int> idx = left_window(profile, x_fit);
    DecayFit fit;
    fit.window_lo = profile.grid.left_end();
    fit.window_hi = -x_fit;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (int i : idx) {
        double v = profile.values[i];
        if (!(v > 0.0)) continue;
        double lx = std::log(std::abs(profile.grid.point(i)));
        double ly = std::log(v);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    if (m < 8) throw std::runtime_error("decay_fit: fewer than 8 usable points in the window");
    fit.points = m;
    double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

TailLimit tail_limit(const FrontProfile& profile, double alpha) {
    std::vector<int> idx = left_window(profile, 10.0);
    if (static_cast<int>(idx.size()) < 8)
        throw std::runtime_error("tail_limit: fewer than 8 points in the window");
    const double expo = 2.0 * profile.s.value() - 1.0;
    TailLimit out;
    double mean = 0.0;
    for (int i : idx)
        mean += profile.values[i] * std::pow(alpha * std::abs(profile.grid.point(i)), expo);
    out.estimate = mean / idx.size();
    // spread over the last half-decade |x| in [|left|/sqrt(10), |left|]
    double cut = std::abs(profile.grid.left_end()) / std::sqrt(10.0);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i : idx) {
        double ax = std::abs(profile.grid.point(i));
        if (ax < cut) continue;
        double v = profile.values[i] * std::pow(alpha * ax, expo);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    out.spread = hi - lo;
    return out;
}

L2Norms l2_tail_norms(const FrontProfile& profile, const Nonlinearity& f, double r) {
    const GridSpec& grid = profile.grid;
    const int n = grid.n_points();
    const double h = grid.spacing();
    const std::vector<double>& u = profile.values;
    const double gl = profile.ghost_left(), gr = profile.ghost_right();

    auto at = [&](int i) { return (i < 0) ? gl : (i >= n ? gr : u[i]); };

    std::vector<double> du(n), d2u(n);
    for (int i = 0; i < n; ++i) {
        du[i] = (at(i + 1) - at(i - 1)) / (2.0 * h);
        d2u[i] = (at(i + 1) - 2.0 * u[i] + at(i - 1)) / (h * h);
    }
    std::vector<double> lap = frac_laplacian_apply(profile);

    auto l2 = [&](const std::vector<double>& v, double from_x) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            if (grid.point(i) < from_x) continue;
            double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            acc += w * v[i] * v[i];
        }
        return std::sqrt(acc * h);
    };

    L2Norms out;
    out.du = l2(du, -std::numeric_limits<double>::infinity());
    out.d2u = l2(d2u, -std::numeric_limits<double>::infinity());
    out.fraclap_u = l2(lap, -std::numeric_limits<double>::infinity());
    std::vector<double> omu(n);
    for (int i = 0; i < n; ++i) omu[i] = 1.0 - u[i];
    double from = (r > 0.0) ? -r : grid.left_end();
    out.one_minus_u_right = l2(omu, from);

    // energy identity: int F(u) u = eps ||u'||^2 + mu/2 [u^2] + 1/2 [u]_s^2
    std::vector<double> fuu(n);
    for (int i = 0; i < n; ++i) fuu[i] = f(std::clamp(u[i], 0.0, 1.0)) * u[i];
    out.fu_u_integral = trapezoid(fuu, h);
    double left_limit =
        grid.left_tail().kind == TailModel::Kind::PowerLaw ? 0.0 : grid.left_tail().value;
    out.mu_half_term =
        profile.mu * 0.5 *
        (grid.right_tail().value * grid.right_tail().value - left_limit * left_limit);

    const double s = profile.s.value();
    const double two_s = 2.0 * s;
    double semi = 0.0;
    std::vector<double> kern(n, 0.0);
    for (int d = 1; d < n; ++d) kern[d] = std::pow(d * h, -1.0 - two_s);
    for (int i = 0; i < n; ++i) {
        double inner = 0.0;
        for (int j = 0; j < n; ++j) {
            int d = std::abs(i - j);
            if (d < 1) continue;
            double w = (d == 1 || j == 0 || j == n - 1) ? 0.5 * h : h;
            double diff = u[i] - u[j];
            inner += w * diff * diff * kern[d];
        }
        // near-field: (u(x+z)-u(x))^2 ~ u'(x)^2 z^2
        inner += du[i] * du[i] * 2.0 * std::pow(h, 2.0 - two_s) / (2.0 - two_s);
        double w_out = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        semi += w_out * inner;
    }
    out.seminorm_sq = 0.5 * semi * h;

    double rhs = profile.epsilon * out.du * out.du + out.mu_half_term + out.seminorm_sq;
    double scale = std::max({std::abs(out.fu_u_integral), std::abs(out.mu_half_term),
                             profile.epsilon * out.du * out.du, out.seminorm_sq, 1e-300});
    out.identity_rel_defect = std::abs(out.fu_u_integral - rhs) / scale;
    return out;
}

GammaResidual gamma_supersolution_residual(FractionalOrder s, double epsilon, double mu,
                                           const Nonlinearity& f, const GridSpec& grid) {
    const double sv = s.value();
    const double expo = 1.0 - 2.0 * sv;  // Gamma = |x|^{-(2s-1)} left of -1
    GridSpec g = grid.with_left_tail(TailModel::power_law(1.0, expo))
                     .with_right_tail(TailModel::constant(1.0));
    const int n = g.n_points();
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) {
        double x = g.point(i);
        vals[i] = (x <= -1.0) ? std::pow(-x, expo) : 1.0;
    }
    FrontProfile gamma(g, vals, s);
    std::vector<double> lap = frac_laplacian_apply(gamma);

    GammaResidual out;
    out.min = std::numeric_limits<double>::infinity();
    const double h = g.spacing();
    for (int i = 0; i < n; ++i) {
        double x = g.point(i);
        double d1 = 0.0, d2 = 0.0;
        if (x < -1.0) {
            d1 = (2.0 * sv - 1.0) * std::pow(-x, -2.0 * sv);
            d2 = 2.0 * sv * (2.0 * sv - 1.0) * std::pow(-x, -1.0 - 2.0 * sv);
        }
        double resid = -epsilon * d2 + lap[i] + mu * d1 - f(std::clamp(vals[i], 0.0, 1.0));
        if (resid < out.min) {
            out.min = resid;
            out.argmin = x;
        }
        if (std::abs(x + 1.0) > 2.0 * h) out.scale = std::max(out.scale, std::abs(resid));
    }
    return out;
}

double barrier_check(FractionalOrder s, double mu, double m, double big_m, double eps0,
                     double eps, double big_r, double vartheta, double alpha, double r_eps0,
                     double phi_at_r_eps0) {
    const double sv = s.value();
    const double two_s = 2.0 * sv;
    if (!(eps > 0.0) || !(eps < eps0) || !(eps0 < 0.25 * (big_m - m)))
        throw std::invalid_argument("barrier_check: need 0 < eps < eps0 < (M-m)/4");
    if (!(alpha > 1.0) || !(big_r > 1.0))
        throw std::invalid_argument("barrier_check: need alpha, R > 1");
    if (!(vartheta > 0.0) || !(vartheta < 1.0))
        throw std::invalid_argument("barrier_check: need vartheta in (0,1)");
    if (!(r_eps0 > 1.0) || !(r_eps0 < big_r))
        throw std::invalid_argument("barrier_check: need 1 < R_eps0 < R");
    if (!(phi_at_r_eps0 > 0.0) || !(phi_at_r_eps0 <= 1.0))
        throw std::invalid_argument("barrier_check: need phi(-R_eps0) in (0,1]");
    if (!(m > 0.0) || !(big_m > m)) throw std::invalid_argument("barrier_check: need 0 < m < M");

    const double b1 = -big_r / std::sqrt(vartheta);
    const double b2 = -big_r;
    const double b3 = -r_eps0;
    const double g1 = m + eps, g2 = 0.5 * (big_m + m), g3 = m - eps0, g4 = phi_at_r_eps0;
    const double a_pref = std::pow(alpha, 1.0 - two_s);

    auto gamma_alpha = [&](double y) {
        return (y <= -1.0) ? std::pow(alpha * (-y), 1.0 - two_s) : 1.0;
    };
    auto phibar = [&](double y) {
        double g = (y < b1) ? g1 : (y < b2) ? g2 : (y < b3) ? g3 : g4;
        return g * gamma_alpha(y);
    };
    // kernel mass of [a,b] seen from x < a
    auto kmass = [&](double x, double a, double b) {
        return (std::pow(a - x, -two_s) - std::pow(b - x, -two_s)) / two_s;
    };

    auto eval_w = [&](double x) {
        const double px = phibar(x);
        const double tol = 1e-6 * std::pow(-1.0 - x, -two_s) / two_s;

        // same-piece region (-inf, b1), principal value at y = x
        double delta = 0.25 * (b1 - x);
        auto f_same = [&](double y) {
            return (px - g1 * a_pref * std::pow(-y, 1.0 - two_s)) *
                   std::pow(std::abs(x - y), -1.0 - two_s);
        };
        double acc = quad::principal_value(f_same, x - delta, b1, x, tol);
        auto f_far = [&](double t) {
            return (px - g1 * a_pref * std::pow(t - x, 1.0 - two_s)) *
                   std::pow(t, -1.0 - two_s);
        };
        acc += quad::semi_infinite(f_far, delta, tol, 1e9 * std::max(1.0, -x));

        // bounded middle pieces
        auto piece = [&](double a, double b, double gk) {
            double v = px * kmass(x, a, b);
            auto fp = [&](double y) {
                return gk * a_pref * std::pow(-y, 1.0 - two_s) *
                       std::pow(y - x, -1.0 - two_s);
            };
            v -= quad::adaptive(fp, a, b, tol, 40);
            return v;
        };
        acc += piece(b1, b2, g2);
        acc += piece(b2, b3, g3);
        acc += piece(b3, -1.0, g4);

        // constant piece [-1, inf)
        acc += (px - g4) * std::pow(-1.0 - x, -two_s) / two_s;

        // drift term on the first piece
        acc += mu * g1 * a_pref * (two_s - 1.0) * std::pow(-x, -two_s);
        return acc;
    };

    const double x_start = -big_r / vartheta;
    double worst = -std::numeric_limits<double>::infinity();
    const int n_samples = 40;
    for (int k = 0; k < n_samples; ++k) {
        double factor = 1.02 * std::pow(1000.0 / 1.02, static_cast<double>(k) / (n_samples - 1));
        worst = std::max(worst, eval_w(x_start * factor));
    }
    return worst;
}

TailModel fit_power_tail(const FrontProfile& front) {
    return fit_power_tail(front, -(2.0 * front.s.value() - 1.0));
}

TailModel fit_power_tail(const FrontProfile& front, double exponent) {
    double cut = std::abs(front.grid.left_end()) / std::sqrt(10.0);
    double acc = 0.0;
    int m = 0;
    for (int i = 0; i < front.grid.n_points(); ++i) {
        double x = front.grid.point(i);
        if (x > -cut) break;
        acc += front.values[i] * std::pow(-x, -exponent);
        ++m;
    }
    if (m < 4 || !(acc > 0.0)) return front.grid.left_tail();
    return TailModel::power_law(acc / m, exponent);
}

SlidingResult uniqueness_sliding(const FrontProfile& phi1, const FrontProfile& phi2) {
    if (std::abs(phi1.grid.spacing() - phi2.grid.spacing()) >
        1e-12 * std::max(phi1.grid.spacing(), phi2.grid.spacing()))
        throw std::invalid_argument("uniqueness_sliding: incompatible grid spacings");

    const GridSpec& g2 = phi2.grid;
    auto objective = [&](double tau) {
        double worst = 0.0;
        for (int i = 0; i < g2.n_points(); ++i) {
            double d = std::abs(phi1.value_at(g2.point(i) + tau) - phi2.values[i]);
            worst = std::max(worst, d);
        }
        return worst;
    };

    double span1 = phi1.grid.right_end() - phi1.grid.left_end();
    double span2 = g2.right_end() - g2.left_end();
    double S = 0.5 * std::min(span1, span2);

    // coarse scan, then golden-section on the bracketing interval
    const int n_scan = 129;
    double best_tau = 0.0, best_val = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_scan; ++k) {
        double tau = -S + 2.0 * S * k / (n_scan - 1.0);
        double v = objective(tau);
        if (v < best_val) {
            best_val = v;
            best_tau = tau;
        }
    }
    double step = 2.0 * S / (n_scan - 1.0);
    double a = best_tau - step, b = best_tau + step;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    while (b - a > 1e-9) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = objective(x2);
        }
    }
    SlidingResult out;
    out.tau_star = 0.5 * (a + b);
    out.residual = objective(out.tau_star);
    return out;
}

DiagnosticsReport run_diagnostics(const FrontProfile& front, const Nonlinearity& f) {
    DiagnosticsReport rep;
    rep.decay_slope_target = -(2.0 * front.s.value() - 1.0);

    FrontProfile::InvariantReport inv = front.check_invariants();
    rep.invariants_ok = inv.all();

    rep.speed_identity_rel_err = speed_identity(front, f);
    rep.identity_ok = rep.speed_identity_rel_err < 0.02;

    try {
        DecayFit fit = decay_fit(front);
        rep.decay_slope = fit.slope;
        rep.decay_ok =
            std::abs(fit.slope - rep.decay_slope_target) <= 0.1 * std::abs(rep.decay_slope_target);
    } catch (const std::exception&) {
        rep.decay_ok = false;
    }
    try {
        TailLimit tl = tail_limit(front);
        rep.tail_limit_estimate = tl.estimate;
        rep.tail_limit_spread = tl.spread;
        rep.tail_ok = tl.estimate > 0.0 && tl.spread / tl.estimate < 0.1;
    } catch (const std::exception&) {
        rep.tail_ok = false;
    }

    rep.l2 = l2_tail_norms(front, f);

    rep.pass = rep.invariants_ok && rep.identity_ok && rep.decay_ok && rep.tail_ok;
    if (!rep.invariants_ok)
        rep.fail_reason = "profile_invariants";
    else if (!rep.identity_ok)
        rep.fail_reason = "speed_identity";
    else if (!rep.decay_ok)
        rep.fail_reason = "decay_slope";
    else if (!rep.tail_ok)
        rep.fail_reason = "tail_limit";
    return rep;
}

}  // namespace fkpp
