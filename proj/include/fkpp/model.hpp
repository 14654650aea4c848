#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fkpp {

/// Fractional order s of the nonlocal operator, restricted to (1/2, 1).
/// Boundary values are rejected: the kernel convention and all tail
/// formulas degenerate at s = 1/2 and s = 1.
class FractionalOrder {
  public:
    explicit FractionalOrder(double s) : s_(s) {
        if (!(s > 0.5) || !(s < 1.0))
            throw std::domain_error("FractionalOrder: s must lie strictly in (1/2, 1), got " +
                                    std::to_string(s));
    }
    double value() const { return s_; }

  private:
    double s_;
};

/// Analytic model for a profile outside the computational grid.
/// Constant: u(x) = value.  PowerLaw: u(x) = coefficient * |x|^exponent.
struct TailModel {
    enum class Kind { Constant, PowerLaw };

    Kind kind = Kind::Constant;
    double value = 0.0;        // Constant
    double coefficient = 0.0;  // PowerLaw
    double exponent = 0.0;     // PowerLaw, negative for decaying tails

    static TailModel constant(double v) {
        TailModel t;
        t.kind = Kind::Constant;
        t.value = v;
        return t;
    }
    static TailModel power_law(double coeff, double expo) {
        if (!(coeff > 0.0))
            throw std::invalid_argument("TailModel: power-law coefficient must be > 0");
        TailModel t;
        t.kind = Kind::PowerLaw;
        t.coefficient = coeff;
        t.exponent = expo;
        return t;
    }

    double eval(double x) const;
};

/// Truncated uniform 1-D grid with analytic tail models on both sides.
/// Points are x_i = left_end + i h, h = (right_end - left_end)/(n_points - 1).
/// The left tail model applies on (-inf, left_end), the right tail on
/// (right_end, +inf); boundary data of truncated problems lives in the tails.
class GridSpec {
  public:
    GridSpec(double left_end, double right_end, int n_points, TailModel left_tail,
             TailModel right_tail);

    double left_end() const { return left_; }
    double right_end() const { return right_; }
    int n_points() const { return n_; }
    double spacing() const { return h_; }
    double point(int i) const { return left_ + h_ * i; }
    std::vector<double> points() const;

    const TailModel& left_tail() const { return left_tail_; }
    const TailModel& right_tail() const { return right_tail_; }

    GridSpec with_left_tail(TailModel t) const;
    GridSpec with_right_tail(TailModel t) const;

  private:
    double left_, right_, h_;
    int n_;
    TailModel left_tail_, right_tail_;
};

/// Report of validate_hypotheses.
struct HypothesesReport {
    double a1 = 0.0;
    double a2 = 0.0;
    double theta = 0.0;
    double rho = 0.0;  // ignition threshold (combustion family), 0 otherwise
    bool ok = false;
    double first_violation_tau = 0.0;
    std::string violated_condition;  // empty when ok
};

/// Reaction term family.
///
/// GeneralizedKpp evaluates to scale * tau^p * (1 - tau), which is pinched
/// between A1 tau^p and A2 tau^p on [0, theta] with A1 = scale (1 - theta),
/// A2 = scale.  CombustionCutoff multiplies the base by a C^2 quintic
/// smoothstep that vanishes identically on [0, sigma] and equals 1 on
/// [2 sigma, 1].
class Nonlinearity {
  public:
    enum class Kind { GeneralizedKpp, CombustionCutoff };

    static Nonlinearity generalized_kpp(double p, double scale = 1.0, double theta = 0.5);
    static Nonlinearity combustion_cutoff(double p, double scale, double sigma);
    static Nonlinearity combustion_cutoff(const Nonlinearity& base, double sigma);

    Kind kind() const { return kind_; }
    double p() const { return p_; }
    double scale() const { return scale_; }
    double sigma() const { return sigma_; }
    double theta() const { return theta_; }
    double a1() const { return a1_; }
    double a2() const { return a2_; }
    double rho() const { return kind_ == Kind::CombustionCutoff ? sigma_ : 0.0; }
    /// Dense-sampled sup of |F'| over [0,1] with a 5% safety margin.
    double lipschitz_bound() const { return lipschitz_; }
    /// Analytic F'(1) (< 0 for both families).
    double fprime_at_one() const;

    /// F(tau); exact 0 at tau in {0, 1} and, for the cutoff family, on [0, sigma].
    /// Throws std::domain_error outside [0, 1].
    double operator()(double tau) const;
    /// Analytic F'(tau), same domain contract.
    double derivative(double tau) const;

  private:
    Nonlinearity() = default;

    Kind kind_ = Kind::GeneralizedKpp;
    double p_ = 0.0, scale_ = 0.0, sigma_ = 0.0, theta_ = 0.0;
    double a1_ = 0.0, a2_ = 0.0, lipschitz_ = 0.0;
};

inline double eval_nonlinearity(const Nonlinearity& f, double tau) { return f(tau); }

/// Certify conditions iii)-iv) of the generalized-KPP family, or conditions
/// 1)-3) of the combustion family, by dense sampling (>= `samples` points).
/// Never throws: violations are reported through ok=false plus the first
/// offending sample.
HypothesesReport validate_hypotheses(const Nonlinearity& f, int samples = 10000);

/// Threshold order s(p) = p / (2(p - 1)); valid for p > 2 only.
double critical_order(double p);

/// Tail-aware evaluation of grid samples at arbitrary x: tail models outside
/// the span, cubic (Catmull-Rom) interpolation inside; exact at the nodes.
double grid_interp(const GridSpec& grid, const std::vector<double>& values, double x);

/// Grid samples of a candidate front plus the metadata needed to evaluate
/// the nonlocal operator on it.
struct FrontProfile {
    GridSpec grid;
    std::vector<double> values;  // length grid.n_points()
    FractionalOrder s;
    double mu = 0.0;
    double epsilon = 0.0;
    double normalization_point = -1.0;
    double normalization_value = 0.5;

    FrontProfile(GridSpec g, std::vector<double> v, FractionalOrder order);

    /// Value at arbitrary x: tail models outside the span, cubic
    /// (Catmull-Rom) interpolation of grid samples inside.
    double value_at(double x) const;

    /// Tail-model values one spacing beyond each end (ghost points of the
    /// finite-difference stencils).
    double ghost_left() const { return grid.left_tail().eval(grid.left_end() - grid.spacing()); }
    double ghost_right() const {
        return grid.right_tail().eval(grid.right_end() + grid.spacing());
    }

    struct InvariantReport {
        bool bounds_ok = true;
        bool monotone_ok = true;
        bool tail_match_ok = true;
        double worst_bound_violation = 0.0;
        double worst_monotonicity_violation = 0.0;
        double worst_tail_mismatch = 0.0;
        bool all() const { return bounds_ok && monotone_ok && tail_match_ok; }
    };
    InvariantReport check_invariants(double tol_mono = 1e-9, double tol_match = 1e-2) const;
};

/// Solver controls and continuation schedules.  Tolerance defaults follow
/// the project-wide conventions; every field is config-overridable.
struct SolveParams {
    double epsilon = 0.25;
    double mu = 6.0;
    std::optional<double> lambda_shift;  // default: 1.05 * lipschitz_bound + 1
    double r = 20.0;                     // truncation radius, grid left end = -r
    double tol_iter = 1e-10;
    double tol_norm = 1e-8;
    double tol_mono = 1e-9;
    int max_iters = 20000;
    std::vector<double> epsilon_schedule = {0.5, 0.25, 0.1, 0.05, 0.02, 0.0};
    std::vector<double> sigma_schedule = {0.2, 0.1, 0.05, 0.025, 0.0125};
    double tol_right = 1e-3;  // right-end saturation threshold for auto-extension
    int max_right_extends = 4;
    double mu_tol = 1e-4;  // combustion speed bisection width

    /// Effective lambda for the active nonlinearity; must exceed the
    /// Lipschitz bound or the monotone map T is not increasing.
    double lambda_for(const Nonlinearity& f) const {
        double lam = lambda_shift ? *lambda_shift : 1.05 * f.lipschitz_bound() + 1.0;
        if (!(lam > f.lipschitz_bound()))
            throw std::invalid_argument("SolveParams: lambda_shift must exceed lipschitz_bound");
        return lam;
    }
};

}  // namespace fkpp
