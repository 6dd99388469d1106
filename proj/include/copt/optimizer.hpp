#pragma once

#include <Eigen/Dense>
#include <vector>

namespace copt {

// Additional linear equality: sum of weights over `indices` equals `target`.
struct GroupConstraint {
    std::vector<int> indices;
    double target = 0.0;
};

// min_w  -w'E[R] + alpha * w' Lambda w
// s.t.   sum(w) = 1,  group sums,  lower <= w <= upper
struct QpProblem {
    Eigen::VectorXd expected_returns;
    Eigen::MatrixXd lambda;
    double alpha = 0.0;
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::vector<GroupConstraint> groups;

    Eigen::Index size() const { return expected_returns.size(); }

    // Shape/domain checks (std::invalid_argument) and bound/budget arithmetic
    // feasibility (InfeasibleError). Groups must be disjoint index sets.
    void validate() const;
};

struct PortfolioWeights {
    Eigen::VectorXd weights;
    double gamma = 0.0;         // budget multiplier
    double kkt_residual = 0.0;  // max-norm of the stacked KKT residual
};

// Budget-only problem solved through the KKT system
//   w = Lambda^{-1}(E[R] - gamma 1) / (2 alpha),
//   gamma = (1' Lambda^{-1} E[R] - 2 alpha) / (1' Lambda^{-1} 1),
// via factorisation plus one step of iterative refinement. Requires
// alpha > 0 and an invertible (PSD-repaired with delta > 0) matrix.
PortfolioWeights closed_form_weights(const Eigen::VectorXd& expected_returns,
                                     const Eigen::MatrixXd& lambda, double alpha);

// Primal active-set solver for the box-constrained convex QP. Handles
// alpha = 0 (pure return maximisation) through null-space descent rays.
// Deterministic for fixed input; returns a KKT point with feasibility 1e-8,
// stationarity and complementarity 1e-6.
PortfolioWeights solve_box_qp(const QpProblem& p);

// Max-norm KKT residual of an arbitrary candidate point: stationarity with
// least-squares multipliers, feasibility violations, complementarity products.
double kkt_residual(const QpProblem& p, const Eigen::VectorXd& w);

double qp_objective(const QpProblem& p, const Eigen::VectorXd& w);

}  // namespace copt
