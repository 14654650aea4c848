#pragma once

#include <functional>

namespace fkpp::quad {

using Fn = std::function<double(double)>;

/// 15-point Gauss-Legendre on [a, b].
double gauss15(const Fn& f, double a, double b);

/// Adaptive bisection built on gauss15/gauss7 error estimates.
double adaptive(const Fn& f, double a, double b, double abs_tol, int max_depth = 48);

/// Integral over [a, +inf) of a decaying integrand, by adaptive octave
/// panels; stops once a panel contributes less than abs_tol, hard cutoff
/// at a + cutoff.
double semi_infinite(const Fn& f, double a, double abs_tol, double cutoff = 1e8);

/// Integral over [a, b] with an integrable singularity at the endpoint
/// `a` (geometric panel shrink toward it).
double with_left_singularity(const Fn& f, double a, double b, double abs_tol);

/// Principal value of integral over [lo, hi] of f with an odd-type
/// singularity at c in (lo, hi): symmetric-difference rule pairs
/// f(c + t) + f(c - t) on a t-neighbourhood, regular quadrature outside.
double principal_value(const Fn& f, double lo, double hi, double c, double abs_tol);

}  // namespace fkpp::quad
