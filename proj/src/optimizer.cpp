#include "copt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "copt/errors.hpp"

namespace copt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Equalities {
    Eigen::MatrixXd a;  // rows: budget, then one per group
    Eigen::VectorXd b;
};

Equalities equality_constraints(const QpProblem& p) {
    const auto n = p.size();
    const auto m = static_cast<Eigen::Index>(1 + p.groups.size());
    Equalities eq;
    eq.a = Eigen::MatrixXd::Zero(m, n);
    eq.b = Eigen::VectorXd::Zero(m);
    eq.a.row(0).setOnes();
    eq.b[0] = 1.0;
    for (std::size_t k = 0; k < p.groups.size(); ++k) {
        for (int idx : p.groups[k].indices) eq.a(1 + k, idx) = 1.0;
        eq.b[1 + k] = p.groups[k].target;
    }
    return eq;
}

// Fills `budget` across [lo, hi] starting from lo, in index order.
void waterfill(Eigen::VectorXd& w, const std::vector<int>& idx, const Eigen::VectorXd& lo,
               const Eigen::VectorXd& hi, double budget) {
    double remaining = budget;
    for (int i : idx) {
        w[i] = lo[i];
        remaining -= lo[i];
    }
    for (int i : idx) {
        const double add = std::min(remaining, hi[i] - lo[i]);
        if (add <= 0.0) continue;
        w[i] += add;
        remaining -= add;
    }
}

}  // namespace

void QpProblem::validate() const {
    const auto n = size();
    if (n < 1) throw std::invalid_argument("QpProblem: empty problem");
    if (lambda.rows() != n || lambda.cols() != n) {
        throw std::invalid_argument("QpProblem: lambda shape mismatch");
    }
    if (lower.size() != n || upper.size() != n) {
        throw std::invalid_argument("QpProblem: bound shape mismatch");
    }
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw std::invalid_argument("QpProblem: alpha must be finite and >= 0");
    }
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    double group_total = 0.0;
    for (const GroupConstraint& g : groups) {
        double lo_sum = 0.0, hi_sum = 0.0;
        for (int i : g.indices) {
            if (i < 0 || i >= n) throw std::invalid_argument("QpProblem: group index out of range");
            if (used[static_cast<std::size_t>(i)]) {
                throw std::invalid_argument("QpProblem: groups must be disjoint");
            }
            used[static_cast<std::size_t>(i)] = 1;
            lo_sum += lower[i];
            hi_sum += upper[i];
        }
        if (g.target < lo_sum - 1e-12 || g.target > hi_sum + 1e-12) {
            throw InfeasibleError("group target " + std::to_string(g.target) +
                                  " outside bound range [" + std::to_string(lo_sum) + ", " +
                                  std::to_string(hi_sum) + "]");
        }
        group_total += g.target;
    }
    double rest_lo = 0.0, rest_hi = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(lower[i] <= upper[i])) {
            throw InfeasibleError("bounds crossed at index " + std::to_string(i));
        }
        if (!used[static_cast<std::size_t>(i)]) {
            rest_lo += lower[i];
            rest_hi += upper[i];
        }
    }
    const double rest_budget = 1.0 - group_total;
    if (rest_budget < rest_lo - 1e-12 || rest_budget > rest_hi + 1e-12) {
        throw InfeasibleError("budget of " + std::to_string(rest_budget) +
                              " for ungrouped weights outside bound range [" +
                              std::to_string(rest_lo) + ", " + std::to_string(rest_hi) + "]");
    }
}

PortfolioWeights closed_form_weights(const Eigen::VectorXd& expected_returns,
                                     const Eigen::MatrixXd& lambda, double alpha) {
    const auto n = expected_returns.size();
    if (lambda.rows() != n || lambda.cols() != n) {
        throw std::invalid_argument("closed_form_weights: shape mismatch");
    }
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("closed_form_weights: alpha must be > 0");
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(lambda);
    const double dmax = ldlt.vectorD().maxCoeff();
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, dmax)) {
        throw std::runtime_error(
            "closed_form_weights: lambda is singular; repair it with delta > 0 first");
    }
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd x = ldlt.solve(expected_returns);
    const Eigen::VectorXd y = ldlt.solve(ones);
    double gamma = (ones.dot(x) - 2.0 * alpha) / ones.dot(y);
    Eigen::VectorXd w = (x - gamma * y) / (2.0 * alpha);

    // One refinement pass on the stacked KKT system.
    const Eigen::VectorXd rs = expected_returns - (2.0 * alpha) * (lambda * w) - gamma * ones;
    const double rb = 1.0 - w.sum();
    const Eigen::VectorXd xs = ldlt.solve(rs);
    const double dgamma = (ones.dot(xs) - 2.0 * alpha * rb) / ones.dot(y);
    w += (xs - dgamma * y) / (2.0 * alpha);
    gamma += dgamma;

    PortfolioWeights out;
    out.weights = w;
    out.gamma = gamma;
    const double stat =
        ((2.0 * alpha) * (lambda * w) + gamma * ones - expected_returns).cwiseAbs().maxCoeff();
    out.kkt_residual = std::max(stat, std::abs(w.sum() - 1.0));
    return out;
}

namespace {

enum class BoundState : char { Free, AtLower, AtUpper, Fixed };

struct ActiveSetWork {
    const QpProblem& p;
    Equalities eq;
    Eigen::MatrixXd hess;  // 2 alpha Lambda
    Eigen::VectorXd w;
    std::vector<BoundState> state;
    double scale = 1.0;

    explicit ActiveSetWork(const QpProblem& prob) : p(prob), eq(equality_constraints(prob)) {
        const auto n = prob.size();
        hess = 2.0 * prob.alpha * prob.lambda;
        // symmetrise to guard against asymmetric input noise
        hess = ((hess + hess.transpose()) * 0.5).eval();
        state.assign(static_cast<std::size_t>(n), BoundState::Free);
        scale = std::max({1.0, prob.expected_returns.cwiseAbs().maxCoeff(),
                          hess.cwiseAbs().maxCoeff()});
        initial_point();
    }

    void initial_point() {
        const auto n = p.size();
        w = Eigen::VectorXd::Zero(n);
        std::vector<char> grouped(static_cast<std::size_t>(n), 0);
        for (const GroupConstraint& g : p.groups) {
            waterfill(w, g.indices, p.lower, p.upper, g.target);
            for (int i : g.indices) grouped[static_cast<std::size_t>(i)] = 1;
        }
        double group_total = 0.0;
        for (const GroupConstraint& g : p.groups) group_total += g.target;
        std::vector<int> rest;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!grouped[static_cast<std::size_t>(i)]) rest.push_back(static_cast<int>(i));
        }
        waterfill(w, rest, p.lower, p.upper, 1.0 - group_total);
        for (Eigen::Index i = 0; i < n; ++i) classify(i);
    }

    void classify(Eigen::Index i) {
        if (p.lower[i] == p.upper[i]) {
            state[static_cast<std::size_t>(i)] = BoundState::Fixed;
            w[i] = p.lower[i];
        } else if (w[i] <= p.lower[i]) {
            state[static_cast<std::size_t>(i)] = BoundState::AtLower;
            w[i] = p.lower[i];
        } else if (w[i] >= p.upper[i]) {
            state[static_cast<std::size_t>(i)] = BoundState::AtUpper;
            w[i] = p.upper[i];
        } else {
            state[static_cast<std::size_t>(i)] = BoundState::Free;
        }
    }

    std::vector<int> free_indices() const {
        std::vector<int> f;
        for (std::size_t i = 0; i < state.size(); ++i) {
            if (state[i] == BoundState::Free) f.push_back(static_cast<int>(i));
        }
        return f;
    }

    Eigen::VectorXd gradient() const { return hess * w - p.expected_returns; }
};

}  // namespace

PortfolioWeights solve_box_qp(const QpProblem& p) {
    p.validate();
    ActiveSetWork work(p);
    const auto n = p.size();
    const auto m = work.eq.a.rows();

    const double tol_dir = 1e-11 * work.scale;
    const double tol_mult = 1e-9 * work.scale;
    const int max_iter = 200 + 50 * static_cast<int>(n);
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(m);

    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::VectorXd g = work.gradient();
        const std::vector<int> free = work.free_indices();
        const auto nf = static_cast<Eigen::Index>(free.size());

        Eigen::VectorXd step = Eigen::VectorXd::Zero(n);
        bool ray = false;

        if (nf > 0) {
            Eigen::MatrixXd af(m, nf);
            Eigen::VectorXd gf(nf);
            for (Eigen::Index k = 0; k < nf; ++k) {
                af.col(k) = work.eq.a.col(free[static_cast<std::size_t>(k)]);
                gf[k] = g[free[static_cast<std::size_t>(k)]];
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(af);
            const Eigen::MatrixXd z = lu.kernel();  // nf x dim(null)
            if (z.cols() > 0 && z.squaredNorm() > 0.0) {
                Eigen::MatrixXd hf(nf, nf);
                for (Eigen::Index r = 0; r < nf; ++r) {
                    for (Eigen::Index c = 0; c < nf; ++c) {
                        hf(r, c) = work.hess(free[static_cast<std::size_t>(r)],
                                             free[static_cast<std::size_t>(c)]);
                    }
                }
                const Eigen::MatrixXd hz = (z.transpose() * hf * z).eval();
                const Eigen::VectorXd gz = z.transpose() * gf;
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hz);
                const Eigen::VectorXd evals = es.eigenvalues();
                const Eigen::MatrixXd q = es.eigenvectors();
                const double thresh = std::max(evals.cwiseAbs().maxCoeff(), 1.0) * 1e-12;

                Eigen::VectorXd reduced_null = Eigen::VectorXd::Zero(z.cols());
                Eigen::VectorXd reduced_newton = Eigen::VectorXd::Zero(z.cols());
                for (Eigen::Index k = 0; k < evals.size(); ++k) {
                    const double proj = q.col(k).dot(gz);
                    if (evals[k] > thresh) {
                        reduced_newton -= (proj / evals[k]) * q.col(k);
                    } else {
                        reduced_null -= proj * q.col(k);
                    }
                }
                Eigen::VectorXd pf;
                if (reduced_null.lpNorm<Eigen::Infinity>() > tol_dir) {
                    pf = z * reduced_null;  // descent ray; objective linear along it
                    ray = true;
                } else {
                    pf = z * reduced_newton;
                }
                for (Eigen::Index k = 0; k < nf; ++k) step[free[static_cast<std::size_t>(k)]] = pf[k];
            }
        }

        const double step_norm = step.lpNorm<Eigen::Infinity>();
        if (step_norm > 1e-13 * std::max(1.0, work.w.lpNorm<Eigen::Infinity>())) {
            // Step length: 1 reaches the subproblem optimum (Newton case);
            // rays run until a bound blocks them.
            double tau = ray ? kInf : 1.0;
            int blocker = -1;
            bool blocker_upper = false;
            for (int i : work.free_indices()) {
                if (step[i] > 0.0) {
                    const double t = (p.upper[i] - work.w[i]) / step[i];
                    if (t < tau) {
                        tau = t;
                        blocker = i;
                        blocker_upper = true;
                    }
                } else if (step[i] < 0.0) {
                    const double t = (p.lower[i] - work.w[i]) / step[i];
                    if (t < tau) {
                        tau = t;
                        blocker = i;
                        blocker_upper = false;
                    }
                }
            }
            if (ray && blocker < 0) {
                throw std::runtime_error("solve_box_qp: unbounded descent ray (invalid bounds)");
            }
            tau = std::max(tau, 0.0);
            work.w += tau * step;
            if (blocker >= 0 && (ray || tau < 1.0)) {
                work.w[blocker] = blocker_upper ? p.upper[blocker] : p.lower[blocker];
                work.state[static_cast<std::size_t>(blocker)] =
                    blocker_upper ? BoundState::AtUpper : BoundState::AtLower;
            }
            if (tau > 0.0) continue;
            // zero-length step: fall through to the multiplier check
        }

        // Stationary on the working set: recover multipliers, drop or stop.
        const Eigen::VectorXd g_now = work.gradient();
        const std::vector<int> free_now = work.free_indices();
        if (!free_now.empty()) {
            Eigen::MatrixXd aft(static_cast<Eigen::Index>(free_now.size()), m);
            Eigen::VectorXd gf(static_cast<Eigen::Index>(free_now.size()));
            for (std::size_t k = 0; k < free_now.size(); ++k) {
                aft.row(static_cast<Eigen::Index>(k)) =
                    work.eq.a.col(free_now[k]).transpose();
                gf[static_cast<Eigen::Index>(k)] = g_now[free_now[k]];
            }
            nu = aft.completeOrthogonalDecomposition().solve(-gf);
        } else {
            nu.setZero();
        }
        const Eigen::VectorXd lagr = g_now + work.eq.a.transpose() * nu;

        // Drop the most negative multiplier; after long stalls fall back to the
        // lowest violating index (Bland) to rule out cycling on degenerate data.
        const bool bland = iter > max_iter / 2;
        int worst = -1;
        double worst_val = -tol_mult;
        for (Eigen::Index i = 0; i < n; ++i) {
            const BoundState s = work.state[static_cast<std::size_t>(i)];
            double mult = 0.0;
            if (s == BoundState::AtLower) {
                mult = lagr[i];
            } else if (s == BoundState::AtUpper) {
                mult = -lagr[i];
            } else {
                continue;  // Free or Fixed (l == u absorbs any multiplier sign)
            }
            if (mult < worst_val) {
                worst_val = mult;
                worst = static_cast<int>(i);
                if (bland) break;
            }
        }
        if (worst < 0) {
            PortfolioWeights out;
            out.weights = work.w;
            out.gamma = nu[0];
            out.kkt_residual = kkt_residual(p, work.w);
            return out;
        }
        work.state[static_cast<std::size_t>(worst)] = BoundState::Free;
    }
    throw std::runtime_error("solve_box_qp: active-set iteration limit reached");
}

double kkt_residual(const QpProblem& p, const Eigen::VectorXd& w) {
    if (w.size() != p.size()) {
        throw std::invalid_argument("kkt_residual: weight vector shape mismatch");
    }
    const auto n = p.size();
    const Equalities eq = equality_constraints(p);
    const Eigen::VectorXd g = 2.0 * p.alpha * (p.lambda * w) - p.expected_returns;

    const double btol = 1e-8 * std::max({1.0, p.lower.cwiseAbs().maxCoeff(),
                                         p.upper.cwiseAbs().maxCoeff()});
    std::vector<int> free;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w[i] > p.lower[i] + btol && w[i] < p.upper[i] - btol) {
            free.push_back(static_cast<int>(i));
        }
    }
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(eq.a.rows());
    if (!free.empty()) {
        Eigen::MatrixXd aft(static_cast<Eigen::Index>(free.size()), eq.a.rows());
        Eigen::VectorXd gf(static_cast<Eigen::Index>(free.size()));
        for (std::size_t k = 0; k < free.size(); ++k) {
            aft.row(static_cast<Eigen::Index>(k)) = eq.a.col(free[k]).transpose();
            gf[static_cast<Eigen::Index>(k)] = g[free[k]];
        }
        nu = aft.completeOrthogonalDecomposition().solve(-gf);
    }

    const Eigen::VectorXd lagr = g + eq.a.transpose() * nu;
    double stationarity = 0.0;
    double complementarity = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool at_lower = w[i] <= p.lower[i] + btol;
        const bool at_upper = w[i] >= p.upper[i] - btol;
        double mu_lower = 0.0, mu_upper = 0.0;
        if (at_lower) mu_lower = std::max(0.0, lagr[i]);
        if (at_upper) mu_upper = std::max(0.0, -lagr[i]);
        stationarity = std::max(stationarity, std::abs(lagr[i] - mu_lower + mu_upper));
        complementarity = std::max(complementarity, mu_lower * std::abs(w[i] - p.lower[i]));
        complementarity = std::max(complementarity, mu_upper * std::abs(p.upper[i] - w[i]));
    }

    double feasibility = (eq.a * w - eq.b).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
        feasibility = std::max(feasibility, p.lower[i] - w[i]);
        feasibility = std::max(feasibility, w[i] - p.upper[i]);
    }
    return std::max({stationarity, feasibility, complementarity});
}

double qp_objective(const QpProblem& p, const Eigen::VectorXd& w) {
    return -p.expected_returns.dot(w) + p.alpha * w.dot(p.lambda * w);
}

}  // namespace copt
