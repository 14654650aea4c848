#include "fkpp/model.hpp"

#include <algorithm>
#include <cmath>

namespace fkpp {

double TailModel::eval(double x) const {
    if (kind == Kind::Constant) return value;
    return coefficient * std::pow(std::abs(x), exponent);
}

GridSpec::GridSpec(double left_end, double right_end, int n_points, TailModel left_tail,
                   TailModel right_tail)
    : left_(left_end),
      right_(right_end),
      n_(n_points),
      left_tail_(left_tail),
      right_tail_(right_tail) {
    if (n_points < 2) throw std::invalid_argument("GridSpec: n_points must be >= 2");
    h_ = (right_ - left_) / (n_ - 1);
    if (!(h_ > 0.0)) throw std::invalid_argument("GridSpec: right_end must exceed left_end");
    if (left_tail_.kind == TailModel::Kind::PowerLaw && !(left_ < 0.0))
        throw std::invalid_argument("GridSpec: power-law left tail requires left_end < 0");
    if (right_tail_.kind != TailModel::Kind::Constant)
        throw std::invalid_argument("GridSpec: right tail must be a constant model");
}

std::vector<double> GridSpec::points() const {
    std::vector<double> x(n_);
    for (int i = 0; i < n_; ++i) x[i] = point(i);
    return x;
}

GridSpec GridSpec::with_left_tail(TailModel t) const {
    return GridSpec(left_, right_, n_, t, right_tail_);
}

GridSpec GridSpec::with_right_tail(TailModel t) const {
    return GridSpec(left_, right_, n_, left_tail_, t);
}

namespace {

// Quintic smoothstep on [0,1]: C^2, exact 0/1 at the ends.
double smoothstep5(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
double smoothstep5_deriv(double t) {
    double u = t * (1.0 - t);
    return 30.0 * u * u;
}

double sample_lipschitz(const Nonlinearity& f) {
    const int n = 100000;
    double sup = 0.0;
    for (int i = 0; i <= n; ++i) {
        double tau = static_cast<double>(i) / n;
        sup = std::max(sup, std::abs(f.derivative(tau)));
    }
    return 1.05 * sup;
}

}  // namespace

Nonlinearity Nonlinearity::generalized_kpp(double p, double scale, double theta) {
    if (!(p > 0.0)) throw std::invalid_argument("Nonlinearity: p must be > 0");
    if (!(scale > 0.0)) throw std::invalid_argument("Nonlinearity: scale must be > 0");
    if (!(theta > 0.0) || !(theta < 1.0))
        throw std::invalid_argument("Nonlinearity: theta must lie in (0,1)");
    Nonlinearity f;
    f.kind_ = Kind::GeneralizedKpp;
    f.p_ = p;
    f.scale_ = scale;
    f.theta_ = theta;
    f.a1_ = scale * (1.0 - theta);
    f.a2_ = scale;
    f.lipschitz_ = sample_lipschitz(f);
    return f;
}

Nonlinearity Nonlinearity::combustion_cutoff(double p, double scale, double sigma) {
    return combustion_cutoff(generalized_kpp(p, scale), sigma);
}

Nonlinearity Nonlinearity::combustion_cutoff(const Nonlinearity& base, double sigma) {
    if (base.kind_ != Kind::GeneralizedKpp)
        throw std::invalid_argument("Nonlinearity: cutoff base must be generalized KPP");
    if (!(sigma > 0.0) || !(sigma < 0.5))
        throw std::invalid_argument("Nonlinearity: sigma must lie in (0, 1/2)");
    Nonlinearity f = base;
    f.kind_ = Kind::CombustionCutoff;
    f.sigma_ = sigma;
    f.lipschitz_ = sample_lipschitz(f);
    return f;
}

double Nonlinearity::operator()(double tau) const {
    if (!(tau >= 0.0) || !(tau <= 1.0))
        throw std::domain_error("Nonlinearity: tau outside [0,1]: " + std::to_string(tau));
    if (tau == 0.0 || tau == 1.0) return 0.0;
    double base = scale_ * std::pow(tau, p_) * (1.0 - tau);
    if (kind_ == Kind::GeneralizedKpp) return base;
    if (tau <= sigma_) return 0.0;
    if (tau >= 2.0 * sigma_) return base;
    return smoothstep5((tau - sigma_) / sigma_) * base;
}

double Nonlinearity::derivative(double tau) const {
    if (!(tau >= 0.0) || !(tau <= 1.0))
        throw std::domain_error("Nonlinearity: tau outside [0,1]: " + std::to_string(tau));
    double base = scale_ * std::pow(tau, p_) * (1.0 - tau);
    double dbase = scale_ * std::pow(tau, p_ - 1.0) * (p_ - (p_ + 1.0) * tau);
    if (kind_ == Kind::GeneralizedKpp) return dbase;
    if (tau <= sigma_) return 0.0;
    if (tau >= 2.0 * sigma_) return dbase;
    double t = (tau - sigma_) / sigma_;
    return smoothstep5(t) * dbase + smoothstep5_deriv(t) / sigma_ * base;
}

double Nonlinearity::fprime_at_one() const {
    // F' (1) = -scale for the base; the cutoff equals the base near 1.
    return -scale_;
}

HypothesesReport validate_hypotheses(const Nonlinearity& f, int samples) {
    HypothesesReport rep;
    rep.a1 = f.a1();
    rep.a2 = f.a2();
    rep.theta = f.theta();
    rep.rho = f.rho();
    rep.ok = true;
    samples = std::max(samples, 10000);

    if (f.kind() == Nonlinearity::Kind::GeneralizedKpp) {
        // iii) A1 tau^p <= F(tau) <= A2 tau^p  and  iv) F'(tau) >= A1 tau^{p-1}
        // on [0, theta], checked on a dense sample.
        for (int i = 0; i <= samples; ++i) {
            double tau = f.theta() * i / samples;
            double tp = std::pow(tau, f.p());
            double v = f(tau);
            double tol = 1e-12 * (1.0 + std::abs(v));
            if (v < rep.a1 * tp - tol || v > rep.a2 * tp + tol) {
                rep.ok = false;
                rep.first_violation_tau = tau;
                rep.violated_condition = "iii";
                return rep;
            }
            if (tau > 0.0 && f.derivative(tau) < rep.a1 * std::pow(tau, f.p() - 1.0) - tol) {
                rep.ok = false;
                rep.first_violation_tau = tau;
                rep.violated_condition = "iv";
                return rep;
            }
        }
        return rep;
    }

    // Combustion conditions: 1) F(1) = 0 and F == 0 on [0, rho],
    // 2) F > 0 on (rho, 1), 3) F'(1) < 0.
    if (f(1.0) != 0.0) {
        rep.ok = false;
        rep.first_violation_tau = 1.0;
        rep.violated_condition = "1";
        return rep;
    }
    for (int i = 0; i <= samples; ++i) {
        double tau = static_cast<double>(i) / samples;
        double v = f(tau);
        if (tau <= rep.rho && v != 0.0) {
            rep.ok = false;
            rep.first_violation_tau = tau;
            rep.violated_condition = "1";
            return rep;
        }
        if (tau > rep.rho && tau < 1.0 && !(v > 0.0)) {
            rep.ok = false;
            rep.first_violation_tau = tau;
            rep.violated_condition = "2";
            return rep;
        }
    }
    if (!(f.fprime_at_one() < 0.0)) {
        rep.ok = false;
        rep.first_violation_tau = 1.0;
        rep.violated_condition = "3";
        return rep;
    }
    return rep;
}

double critical_order(double p) {
    if (!(p > 2.0)) throw std::domain_error("critical_order: requires p > 2");
    return p / (2.0 * (p - 1.0));
}

FrontProfile::FrontProfile(GridSpec g, std::vector<double> v, FractionalOrder order)
    : grid(std::move(g)), values(std::move(v)), s(order) {
    if (static_cast<int>(values.size()) != grid.n_points())
        throw std::invalid_argument("FrontProfile: values length must equal n_points");
}

double grid_interp(const GridSpec& grid, const std::vector<double>& values, double x) {
    const int n = grid.n_points();
    if (x < grid.left_end()) return grid.left_tail().eval(x);
    if (x > grid.right_end()) return grid.right_tail().eval(x);
    const double h = grid.spacing();
    double t = (x - grid.left_end()) / h;
    int j = static_cast<int>(std::floor(t));
    j = std::clamp(j, 0, n - 2);
    double u = t - j;
    // Catmull-Rom with clamped end stencils; interpolates node values exactly.
    double ym = values[std::max(j - 1, 0)];
    double y0 = values[j];
    double y1 = values[j + 1];
    double y2 = values[std::min(j + 2, n - 1)];
    double a = -0.5 * ym + 1.5 * y0 - 1.5 * y1 + 0.5 * y2;
    double b = ym - 2.5 * y0 + 2.0 * y1 - 0.5 * y2;
    double c = 0.5 * (y1 - ym);
    return ((a * u + b) * u + c) * u + y0;
}

double FrontProfile::value_at(double x) const { return grid_interp(grid, values, x); }

FrontProfile::InvariantReport FrontProfile::check_invariants(double tol_mono,
                                                             double tol_match) const {
    InvariantReport rep;
    for (double v : values) {
        double viol = std::max(-v, v - 1.0);
        if (viol > rep.worst_bound_violation) rep.worst_bound_violation = viol;
    }
    rep.bounds_ok = rep.worst_bound_violation <= 1e-12;
    for (size_t i = 1; i < values.size(); ++i) {
        double drop = values[i - 1] - values[i];
        if (drop > rep.worst_monotonicity_violation) rep.worst_monotonicity_violation = drop;
    }
    rep.monotone_ok = rep.worst_monotonicity_violation <= tol_mono;
    double left_gap = std::abs(values.front() - grid.left_tail().eval(grid.left_end()));
    double right_gap = std::abs(values.back() - grid.right_tail().eval(grid.right_end()));
    rep.worst_tail_mismatch = std::max(left_gap, right_gap);
    rep.tail_match_ok = rep.worst_tail_mismatch <= tol_match;
    return rep;
}

}  // namespace fkpp
