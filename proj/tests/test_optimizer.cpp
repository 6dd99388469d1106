#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "copt/errors.hpp"
#include "copt/optimizer.hpp"

using namespace copt;

namespace {

Eigen::MatrixXd random_pd(int n, std::mt19937_64& eng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd b(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) b(i, j) = normal(eng);
    }
    return b * b.transpose() + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
}

QpProblem box_problem(const Eigen::VectorXd& er, const Eigen::MatrixXd& lambda, double alpha,
                      double lo, double hi) {
    QpProblem p;
    p.expected_returns = er;
    p.lambda = lambda;
    p.alpha = alpha;
    p.lower = Eigen::VectorXd::Constant(er.size(), lo);
    p.upper = Eigen::VectorXd::Constant(er.size(), hi);
    return p;
}

// 1e-5-step brute force over the budget segment for n = 2.
double brute_force_2d(const QpProblem& p) {
    const double lo = std::max(p.lower[0], 1.0 - p.upper[1]);
    const double hi = std::min(p.upper[0], 1.0 - p.lower[1]);
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd w(2);
    const int steps = static_cast<int>((hi - lo) / 1e-5);
    for (int i = 0; i <= steps; ++i) {
        w[0] = std::min(lo + i * 1e-5, hi);
        w[1] = 1.0 - w[0];
        best = std::min(best, qp_objective(p, w));
    }
    return best;
}

}  // namespace

TEST_CASE("closed form: fully symmetric problem gives equal weights") {
    const int n = 4;
    const PortfolioWeights w = closed_form_weights(Eigen::VectorXd::Constant(n, 0.3),
                                                   Eigen::MatrixXd::Identity(n, n), 1.0);
    for (int i = 0; i < n; ++i) CHECK(w.weights[i] == doctest::Approx(0.25));
    CHECK(w.kkt_residual <= 1e-10);
}

TEST_CASE("closed form: digital-option variance example") {
    Eigen::MatrixXd lambda(2, 2);
    lambda << 0.25, 0.0, 0.0, 0.09;
    for (double alpha : {0.5, 1.0, 7.0}) {
        const PortfolioWeights w =
            closed_form_weights(Eigen::VectorXd::Zero(2), lambda, alpha);
        CHECK(std::abs(w.weights[0] - 0.265) < 5e-4);
        CHECK(std::abs(w.weights[1] - 0.735) < 5e-4);
    }
}

TEST_CASE("closed form: KKT residuals on random problems") {
    std::mt19937_64 eng(41);
    std::normal_distribution<double> normal(0.0, 0.5);
    for (int rep = 0; rep < 50; ++rep) {
        const int n = 2 + rep % 9;
        const Eigen::MatrixXd lambda = random_pd(n, eng);
        Eigen::VectorXd er(n);
        for (int i = 0; i < n; ++i) er[i] = normal(eng);
        const PortfolioWeights w = closed_form_weights(er, lambda, 2.0);

        const Eigen::VectorXd stat = 4.0 * (lambda * w.weights) +
                                     Eigen::VectorXd::Constant(n, w.gamma) - er;
        CHECK(stat.cwiseAbs().maxCoeff() <=
              1e-8 * std::max(1.0, er.cwiseAbs().maxCoeff()));
        CHECK(std::abs(w.weights.sum() - 1.0) <= 1e-10);
    }
}

TEST_CASE("closed form rejects bad inputs") {
    CHECK_THROWS_AS(closed_form_weights(Eigen::VectorXd::Zero(2),
                                        Eigen::MatrixXd::Identity(2, 2), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(closed_form_weights(Eigen::VectorXd::Zero(2),
                                        Eigen::MatrixXd::Zero(2, 2), 1.0),
                    std::runtime_error);
}

TEST_CASE("box solver matches the closed form when no bound binds") {
    std::mt19937_64 eng(43);
    std::normal_distribution<double> normal(0.0, 0.5);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 2 + rep % 7;
        const Eigen::MatrixXd lambda = random_pd(n, eng);
        Eigen::VectorXd er(n);
        for (int i = 0; i < n; ++i) er[i] = normal(eng);

        const PortfolioWeights exact = closed_form_weights(er, lambda, 1.5);
        const QpProblem p = box_problem(er, lambda, 1.5, -100.0, 100.0);
        const PortfolioWeights boxed = solve_box_qp(p);
        CHECK((boxed.weights - exact.weights).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK(boxed.kkt_residual <= 1e-6);
    }
}

TEST_CASE("box solver: binding upper bound example") {
    Eigen::VectorXd er(2);
    er << 1.0, 0.0;
    QpProblem p = box_problem(er, Eigen::MatrixXd::Identity(2, 2), 1.0, 0.0, 1.0);
    p.upper[0] = 0.4;
    const PortfolioWeights w = solve_box_qp(p);
    CHECK(w.weights[0] == doctest::Approx(0.4));
    CHECK(w.weights[1] == doctest::Approx(0.6));
    CHECK(qp_objective(p, w.weights) <= brute_force_2d(p) + 1e-3);
    CHECK(w.kkt_residual <= 1e-6);
}

TEST_CASE("box solver: degenerate box forces equal weights") {
    const int n = 5;
    QpProblem p = box_problem(Eigen::VectorXd::Random(n), random_pd(n, *[] {
                                  static std::mt19937_64 eng(3);
                                  return &eng;
                              }()),
                              2.0, 1.0 / n, 1.0 / n);
    const PortfolioWeights w = solve_box_qp(p);
    for (int i = 0; i < n; ++i) CHECK(w.weights[i] == doctest::Approx(1.0 / n));
    CHECK(w.kkt_residual <= 1e-6);
}

TEST_CASE("alpha = 0 maximises return greedily up to bound saturation") {
    Eigen::VectorXd er(4);
    er << 0.1, 0.5, 0.3, 0.2;
    QpProblem p = box_problem(er, Eigen::MatrixXd::Zero(4, 4), 0.0, 0.0, 0.4);
    const PortfolioWeights w = solve_box_qp(p);
    // greedy oracle: fill best returns first (0.4, 0.4, then 0.2 in third best)
    CHECK(w.weights[1] == doctest::Approx(0.4));
    CHECK(w.weights[2] == doctest::Approx(0.4));
    CHECK(w.weights[3] == doctest::Approx(0.2));
    CHECK(w.weights[0] == doctest::Approx(0.0));
    CHECK(w.kkt_residual <= 1e-6);

    SUBCASE("scaling expected returns leaves the argmax unchanged") {
        QpProblem scaled = p;
        scaled.expected_returns *= 37.0;
        const PortfolioWeights ws = solve_box_qp(scaled);
        CHECK((ws.weights - w.weights).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("box solver beats 1000 random feasible points") {
    std::mt19937_64 eng(47);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 3 + rep % 5;
        Eigen::VectorXd er(n);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int i = 0; i < n; ++i) er[i] = normal(eng);
        const QpProblem p = box_problem(er, random_pd(n, eng), 1.0, 0.0, 1.0);
        const PortfolioWeights w = solve_box_qp(p);
        const double best = qp_objective(p, w.weights);
        for (int k = 0; k < 1000; ++k) {
            Eigen::VectorXd x(n);
            double total = 0.0;
            for (int i = 0; i < n; ++i) {
                x[i] = -std::log(unif(eng));
                total += x[i];
            }
            x /= total;  // random point on the simplex
            CHECK(best <= qp_objective(p, x) + 1e-9);
        }
    }
}

TEST_CASE("n=2 and n=3 brute-force agreement in objective") {
    std::mt19937_64 eng(53);
    std::normal_distribution<double> normal(0.0, 1.0);

    SUBCASE("n=2 full 1e-5 grid") {
        for (int rep = 0; rep < 10; ++rep) {
            Eigen::VectorXd er(2);
            er << normal(eng), normal(eng);
            const QpProblem p = box_problem(er, random_pd(2, eng), 1.0, 0.0, 0.8);
            const PortfolioWeights w = solve_box_qp(p);
            CHECK(qp_objective(p, w.weights) <= brute_force_2d(p) + 1e-3);
        }
    }

    SUBCASE("n=3 coarse-to-fine grid") {
        for (int rep = 0; rep < 5; ++rep) {
            Eigen::VectorXd er(3);
            er << normal(eng), normal(eng), normal(eng);
            const QpProblem p = box_problem(er, random_pd(3, eng), 1.0, 0.0, 1.0);
            const PortfolioWeights w = solve_box_qp(p);

            // coarse scan then 1e-5 refinement around the coarse optimum
            double best = std::numeric_limits<double>::infinity();
            double b1 = 0.0, b2 = 0.0;
            Eigen::VectorXd x(3);
            for (double w1 = 0.0; w1 <= 1.0; w1 += 1e-3) {
                for (double w2 = 0.0; w2 <= 1.0 - w1; w2 += 1e-3) {
                    x << w1, w2, 1.0 - w1 - w2;
                    const double f = qp_objective(p, x);
                    if (f < best) {
                        best = f;
                        b1 = w1;
                        b2 = w2;
                    }
                }
            }
            for (double w1 = std::max(0.0, b1 - 2e-3); w1 <= std::min(1.0, b1 + 2e-3);
                 w1 += 1e-5) {
                for (double w2 = std::max(0.0, b2 - 2e-3);
                     w2 <= std::min(1.0 - w1, b2 + 2e-3); w2 += 1e-5) {
                    x << w1, w2, 1.0 - w1 - w2;
                    best = std::min(best, qp_objective(p, x));
                }
            }
            CHECK(qp_objective(p, w.weights) <= best + 1e-3);
        }
    }
}

TEST_CASE("group constraints are honoured") {
    std::mt19937_64 eng(59);
    Eigen::VectorXd er(5);
    er << 0.5, 0.1, 0.4, 0.2, 0.3;
    QpProblem p = box_problem(er, random_pd(5, eng), 1.0, 0.0, 1.0);
    p.groups.push_back({{0, 1}, 0.3});
    const PortfolioWeights w = solve_box_qp(p);
    CHECK(w.weights[0] + w.weights[1] == doctest::Approx(0.3).epsilon(1e-8));
    CHECK(w.weights.sum() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(w.kkt_residual <= 1e-6);

    SUBCASE("overlapping groups rejected") {
        QpProblem bad = p;
        bad.groups.push_back({{1, 2}, 0.5});
        CHECK_THROWS_AS(solve_box_qp(bad), std::invalid_argument);
    }
}

TEST_CASE("infeasible problems are reported") {
    QpProblem p = box_problem(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3), 1.0,
                              0.0, 0.2);  // sum of uppers = 0.6 < 1
    CHECK_THROWS_AS(solve_box_qp(p), InfeasibleError);

    QpProblem q = box_problem(Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3), 1.0,
                              0.0, 1.0);
    q.groups.push_back({{0}, 2.0});  // target beyond the bound
    CHECK_THROWS_AS(solve_box_qp(q), InfeasibleError);
}

TEST_CASE("kkt residual grades candidate points") {
    std::mt19937_64 eng(61);
    Eigen::VectorXd er(4);
    er << 0.9, -0.2, 0.4, 0.05;
    const QpProblem p = box_problem(er, random_pd(4, eng), 1.0, 0.0, 1.0);

    const PortfolioWeights w = solve_box_qp(p);
    CHECK(kkt_residual(p, w.weights) <= 1e-6);

    const Eigen::VectorXd equal = Eigen::VectorXd::Constant(4, 0.25);
    CHECK((w.weights - equal).cwiseAbs().maxCoeff() > 1e-3);  // optimum differs
    CHECK(kkt_residual(p, equal) > 1e-3);

    const Eigen::VectorXd infeasible = Eigen::VectorXd::Constant(4, 0.5);  // sums to 2
    CHECK(kkt_residual(p, infeasible) >= 1.0);
}
