#include "fkpp/linear_solver.hpp"

#include <cmath>

namespace fkpp {

LinearSystem::LinearSystem(Eigen::MatrixXd a) : a_(std::move(a)), lu_(a_) {
    if (a_.rows() != a_.cols()) throw std::invalid_argument("LinearSystem: matrix must be square");
    double rcond = lu_.rcond();
    condition_ = (rcond > 0.0) ? 1.0 / rcond : std::numeric_limits<double>::infinity();
}

Eigen::VectorXd LinearSystem::solve(const Eigen::VectorXd& load) const {
    if (load.size() != a_.rows())
        throw std::invalid_argument("LinearSystem: load size mismatch");
    if (!load.allFinite()) throw std::invalid_argument("LinearSystem: load must be finite");
    if (condition_ > 1e14)
        throw SolverError("LinearSystem: condition estimate " + std::to_string(condition_) +
                          " exceeds 1e14");
    if (load.lpNorm<Eigen::Infinity>() == 0.0) return Eigen::VectorXd::Zero(load.size());
    Eigen::VectorXd u = lu_.solve(load);
    // one step of iterative refinement keeps the residual at working precision
    Eigen::VectorXd resid = load - a_ * u;
    u += lu_.solve(resid);
    resid = load - a_ * u;
    double rel = resid.lpNorm<Eigen::Infinity>() / load.lpNorm<Eigen::Infinity>();
    if (!(rel < 1e-10))
        throw SolverError("LinearSystem: residual check failed, rel = " + std::to_string(rel));
    return u;
}

Eigen::VectorXd solve_linear(const Eigen::MatrixXd& a, const Eigen::VectorXd& load) {
    return LinearSystem(a).solve(load);
}

}  // namespace fkpp
