#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace fkpp {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense LU with partial pivoting behind the discrete Lax-Milgram contract:
/// unique solve with residual verification and a condition estimate.
/// Factor once, back-substitute per load.
class LinearSystem {
  public:
    explicit LinearSystem(Eigen::MatrixXd a);

    /// Reciprocal-condition based estimate of cond_inf(A).
    double condition_estimate() const { return condition_; }

    /// Solves A u = load; throws SolverError when the factorization is
    /// unusable (condition estimate > 1e14) or the residual check
    /// ||A u - load||_inf < 1e-10 ||load||_inf fails.
    Eigen::VectorXd solve(const Eigen::VectorXd& load) const;

    /// Back-substitution only, no refinement or residual verification; for
    /// inner loops that validate their own fixed-point residual at exit.
    Eigen::VectorXd solve_fast(const Eigen::VectorXd& load) const { return lu_.solve(load); }

    const Eigen::MatrixXd& matrix() const { return a_; }

  private:
    Eigen::MatrixXd a_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
    double condition_ = 0.0;
};

/// One-shot convenience wrapper.
Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& load);

}  // namespace fkpp
