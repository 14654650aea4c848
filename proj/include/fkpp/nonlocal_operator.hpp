#pragma once

#include <Eigen/Dense>

#include "fkpp/model.hpp"

namespace fkpp {

enum class AdvectionScheme { Upwind, Central };

/// Weight of the near-field correction -u''(x) * near_field_weight(s,h) that
/// replaces the principal-value integral over |y-x| < h.  The leading term
/// 1/(2-2s) integrates the second-order Taylor expansion against the kernel;
/// the 1/12 and 1/720 terms compensate the Euler-Maclaurin endpoint error of
/// the trapezoid sum over |y-x| >= h, whose integrand behaves like
/// -u'' |y-x|^{1-2s} near the cut.
inline double near_field_weight(double s, double h) {
    double em = (2.0 * s - 1.0) / 12.0 - 2.0 * s * (2.0 * s - 1.0) * (2.0 * s + 1.0) / 720.0;
    return std::pow(h, 2.0 - 2.0 * s) * (1.0 / (2.0 - 2.0 * s) - em);
}

/// Dense discretization of u -> -eps u'' + (-Delta)^s u + mu u' + lambda u on
/// a GridSpec, with the unnormalized kernel |x-y|^{-(1+2s)}.  The action on
/// grid samples of a profile with the grid's declared tails is
/// a * u - tail_load; tail contributions (far-field kernel integrals and
/// finite-difference ghosts) sit in the load so the matrix itself is
/// tail-value independent.
struct OperatorMatrix {
    Eigen::MatrixXd a;
    Eigen::VectorXd tail_load;
    double s = 0.0, epsilon = 0.0, mu = 0.0, lambda = 0.0, h = 0.0;
    int n = 0;
    AdvectionScheme advection = AdvectionScheme::Upwind;
};

OperatorMatrix assemble_operator(const GridSpec& grid, FractionalOrder s, double epsilon,
                                 double mu, double lambda,
                                 AdvectionScheme advection = AdvectionScheme::Upwind);

/// Tail-load vector alone (used to re-derive loads for new boundary data on
/// an already-assembled geometry).
Eigen::VectorXd compute_tail_load(const GridSpec& grid, FractionalOrder s, double epsilon,
                                  double mu, AdvectionScheme advection = AdvectionScheme::Upwind);

/// (-Delta)^s u at every grid point by direct quadrature: near-field Taylor
/// correction, trapezoid mid-field on the grid, closed-form or adaptive
/// far-field integrals of the declared tails.
std::vector<double> frac_laplacian_apply(const FrontProfile& profile);

/// Full pointwise operator -eps u'' + (-Delta)^s u + mu u' + lambda u with
/// the same quadrature; grouped differences keep constants annihilated to
/// machine precision.
std::vector<double> operator_apply(const FrontProfile& profile, double epsilon, double mu,
                                   double lambda,
                                   AdvectionScheme advection = AdvectionScheme::Upwind);

struct MMatrixReport {
    bool is_m_matrix = false;
    bool sign_pattern_ok = false;
    bool diagonally_dominant = false;
    int worst_row = -1;
    double worst_offdiag = 0.0;      // most positive off-diagonal entry
    double worst_dominance = 0.0;    // smallest row sum (dominance margin)
};

/// Sign pattern and weak diagonal dominance, row by row.
MMatrixReport mmatrix_check(const OperatorMatrix& op);

}  // namespace fkpp
