#include "fkpp/nonlocal_operator.hpp"

#include <cmath>

#include "fkpp/quadrature.hpp"

namespace fkpp {

namespace {

// Trapezoid weight of grid node j in the mid-field sum of row i, or 0 when
// the node lies outside the mid-field pieces [x_0, x_{i-1}] and
// [x_{i+1}, x_{n-1}].  Piece endpoints carry h/2; zero-length pieces vanish.
double midfield_weight(int i, int j, int n, double h) {
    if (j < i) {
        if (i < 2) return 0.0;  // empty or zero-length left piece
        return (j == 0 || j == i - 1) ? 0.5 * h : h;
    }
    if (j > i) {
        if (i > n - 3) return 0.0;
        return (j == n - 1 || j == i + 1) ? 0.5 * h : h;
    }
    return 0.0;
}

// Integral over the far region (one side) of tail(y) |x-y|^{-(1+2s)} dy,
// where t0 is the distance from x to the region boundary.  `left` selects
// the side; power-law tails only occur on the left.
double tail_integral(const TailModel& tail, double x, double t0, double s, bool left) {
    const double two_s = 2.0 * s;
    if (tail.kind == TailModel::Kind::Constant)
        return tail.value * std::pow(t0, -two_s) / two_s;
    if (!left) throw std::invalid_argument("tail_integral: power-law right tail unsupported");
    // y = x - t, |y| = t - x for y < 0; integrand decays like t^{expo-1-2s}
    auto f = [&](double t) { return std::pow(t - x, tail.exponent) * std::pow(t, -1.0 - two_s); };
    return tail.coefficient * quad::semi_infinite(f, t0, 1e-12, 1e8 * std::max(1.0, std::abs(x)));
}

struct Geometry {
    int n;
    double h, two_s, beta;
    std::vector<double> x;
    std::vector<double> kernel;  // kernel[d] = (d h)^{-(1+2s)}

    Geometry(const GridSpec& grid, double s)
        : n(grid.n_points()), h(grid.spacing()), two_s(2.0 * s), beta(near_field_weight(s, h)) {
        x = grid.points();
        kernel.assign(n, 0.0);
        for (int d = 1; d < n; ++d) kernel[d] = std::pow(d * h, -1.0 - two_s);
    }

    double far_dist_left(int i) const { return (i == 0) ? h : x[i] - x[0]; }
    double far_dist_right(int i) const { return (i == n - 1) ? h : x[n - 1] - x[i]; }
    double far_mass(double t0) const { return std::pow(t0, -two_s) / two_s; }
};

}  // namespace

OperatorMatrix assemble_operator(const GridSpec& grid, FractionalOrder order, double epsilon,
                                 double mu, double lambda, AdvectionScheme advection) {
    if (grid.n_points() < 16)
        throw std::invalid_argument("assemble_operator: n_points must be >= 16");
    if (!(grid.spacing() > 0.0)) throw std::invalid_argument("assemble_operator: h must be > 0");
    if (epsilon < 0.0) throw std::invalid_argument("assemble_operator: epsilon must be >= 0");
    if (lambda < 0.0) throw std::invalid_argument("assemble_operator: lambda must be >= 0");

    const double s = order.value();
    Geometry g(grid, s);
    const int n = g.n;
    const double h = g.h;

    OperatorMatrix op;
    op.s = s;
    op.epsilon = epsilon;
    op.mu = mu;
    op.lambda = lambda;
    op.h = h;
    op.n = n;
    op.advection = advection;
    op.a = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd& a = op.a;

    const double visc = epsilon / (h * h);
    const double near = g.beta / (h * h);

    for (int i = 0; i < n; ++i) {
        double diag = lambda + 2.0 * near + 2.0 * visc;

        // mid-field kernel row
        for (int j = 0; j < n; ++j) {
            double w = midfield_weight(i, j, n, h);
            if (w == 0.0) continue;
            double wk = w * g.kernel[std::abs(i - j)];
            a(i, j) -= wk;
            diag += wk;
        }
        // far-field kernel mass of both tails multiplies u_i
        diag += g.far_mass(g.far_dist_left(i)) + g.far_mass(g.far_dist_right(i));

        // near-field and viscosity stencils
        if (i > 0) a(i, i - 1) -= near + visc;
        if (i < n - 1) a(i, i + 1) -= near + visc;

        // advection
        if (mu != 0.0) {
            if (advection == AdvectionScheme::Upwind) {
                double adv = std::abs(mu) / h;
                diag += adv;
                if (mu > 0.0) {
                    if (i > 0) a(i, i - 1) -= adv;
                } else {
                    if (i < n - 1) a(i, i + 1) -= adv;
                }
            } else {
                double adv = mu / (2.0 * h);
                if (i > 0) a(i, i - 1) -= adv;
                if (i < n - 1) a(i, i + 1) += adv;
            }
        }
        a(i, i) = diag;
    }

    op.tail_load = compute_tail_load(grid, order, epsilon, mu, advection);
    return op;
}

Eigen::VectorXd compute_tail_load(const GridSpec& grid, FractionalOrder order, double epsilon,
                                  double mu, AdvectionScheme advection) {
    const double s = order.value();
    Geometry g(grid, s);
    const int n = g.n;
    const double h = g.h;
    const double visc = epsilon / (h * h);
    const double near = g.beta / (h * h);
    const double ghost_l = grid.left_tail().eval(grid.left_end() - h);
    const double ghost_r = grid.right_tail().eval(grid.right_end() + h);

    Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        t(i) += tail_integral(grid.left_tail(), g.x[i], g.far_dist_left(i), s, true);
        t(i) += tail_integral(grid.right_tail(), g.x[i], g.far_dist_right(i), s, false);
    }
    // finite-difference ghosts
    t(0) += (near + visc) * ghost_l;
    t(n - 1) += (near + visc) * ghost_r;
    if (mu != 0.0) {
        if (advection == AdvectionScheme::Upwind) {
            if (mu > 0.0)
                t(0) += mu / h * ghost_l;
            else
                t(n - 1) += -mu / h * ghost_r;
        } else {
            t(0) += mu / (2.0 * h) * ghost_l;
            t(n - 1) -= mu / (2.0 * h) * ghost_r;
        }
    }
    return t;
}

std::vector<double> operator_apply(const FrontProfile& profile, double epsilon, double mu,
                                   double lambda, AdvectionScheme advection) {
    const GridSpec& grid = profile.grid;
    const double s = profile.s.value();
    Geometry g(grid, s);
    const int n = g.n;
    const double h = g.h;
    const std::vector<double>& u = profile.values;
    const double ghost_l = profile.ghost_left();
    const double ghost_r = profile.ghost_right();

    std::vector<double> out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double ui = u[i];
        const double um = (i > 0) ? u[i - 1] : ghost_l;
        const double up = (i < n - 1) ? u[i + 1] : ghost_r;

        // kernel: near-field Taylor correction + mid-field trapezoid
        double upp = (up - 2.0 * ui + um) / (h * h);
        double acc = -g.beta * upp;
        for (int j = 0; j < n; ++j) {
            double w = midfield_weight(i, j, n, h);
            if (w == 0.0) continue;
            acc += w * (ui - u[j]) * g.kernel[std::abs(i - j)];
        }
        // far field, grouped so constant data cancels exactly
        double t0l = g.far_dist_left(i), t0r = g.far_dist_right(i);
        if (grid.left_tail().kind == TailModel::Kind::Constant)
            acc += (ui - grid.left_tail().value) * g.far_mass(t0l);
        else
            acc += ui * g.far_mass(t0l) - tail_integral(grid.left_tail(), g.x[i], t0l, s, true);
        acc += (ui - grid.right_tail().value) * g.far_mass(t0r);

        // local terms
        acc += -epsilon * upp + lambda * ui;
        if (mu != 0.0) {
            if (advection == AdvectionScheme::Upwind)
                acc += (mu > 0.0) ? mu * (ui - um) / h : mu * (up - ui) / h;
            else
                acc += mu * (up - um) / (2.0 * h);
        }
        out[i] = acc;
    }
    return out;
}

std::vector<double> frac_laplacian_apply(const FrontProfile& profile) {
    return operator_apply(profile, 0.0, 0.0, 0.0);
}

MMatrixReport mmatrix_check(const OperatorMatrix& op) {
    const int n = op.n;
    MMatrixReport rep;
    rep.sign_pattern_ok = true;
    rep.diagonally_dominant = true;
    rep.worst_dominance = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        double rowsum = 0.0, absrow = 0.0;
        for (int j = 0; j < n; ++j) {
            double v = op.a(i, j);
            rowsum += v;
            absrow += std::abs(v);
            if (j != i && v > rep.worst_offdiag) {
                rep.worst_offdiag = v;
                if (v > 0.0) {
                    rep.sign_pattern_ok = false;
                    rep.worst_row = i;
                }
            }
        }
        if (op.a(i, i) <= 0.0) {
            rep.sign_pattern_ok = false;
            rep.worst_row = i;
        }
        if (rowsum < rep.worst_dominance) rep.worst_dominance = rowsum;
        if (rowsum < -1e-12 * absrow) {
            rep.diagonally_dominant = false;
            rep.worst_row = i;
        }
    }
    rep.is_m_matrix = rep.sign_pattern_ok && rep.diagonally_dominant;
    return rep;
}

}  // namespace fkpp
