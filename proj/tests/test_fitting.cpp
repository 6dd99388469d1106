#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "copt/errors.hpp"
#include "copt/fitting.hpp"

using namespace copt;

TEST_CASE("theta recovery on seeded samples") {
    const PseudoObservations obs = sample_pair({CopulaFamily::Clayton, 2.0}, 5000, 101);
    const FittedCopula fit = fit_semiparametric(obs, CopulaFamily::Clayton);
    CHECK(fit.param.theta >= 1.8);
    CHECK(fit.param.theta <= 2.2);
    CHECK(std::isfinite(fit.loglik));
    CHECK(fit.l2 >= 0.0);
}

TEST_CASE("negative Frank dependence is recovered from the lower bracket") {
    const PseudoObservations obs = sample_pair({CopulaFamily::Frank, -5.0}, 5000, 314);
    const FittedCopula fit = fit_semiparametric(obs, CopulaFamily::Frank);
    CHECK(fit.param.theta >= -6.0);
    CHECK(fit.param.theta <= -4.0);
}

TEST_CASE("l2 quadrature matches a naive per-point evaluation") {
    // oracle: evaluate the empirical copula point by point on the same grid
    const PseudoObservations obs = sample_pair({CopulaFamily::Gumbel, 2.0}, 500, 88);
    const CopulaParam c{CopulaFamily::Clayton, 1.5};
    double sum = 0.0;
    for (int i = 0; i < kL2GridSize; ++i) {
        const double u = (i + 0.5) / kL2GridSize;
        for (int j = 0; j < kL2GridSize; ++j) {
            const double v = (j + 0.5) / kL2GridSize;
            const double diff = empirical_copula(obs, u, v) - copula_cdf(c, u, v);
            sum += diff * diff;
        }
    }
    const double naive = std::sqrt(sum / (kL2GridSize * kL2GridSize));
    CHECK(l2_distance(c, obs) == doctest::Approx(naive).epsilon(1e-14));
}

TEST_CASE("independence data drives Gumbel to theta ~ 1 with loglik ~ 0") {
    const PseudoObservations obs = sample_pair({CopulaFamily::Independence}, 5000, 55);
    const FittedCopula fit = fit_semiparametric(obs, CopulaFamily::Gumbel);
    CHECK(fit.param.theta >= 1.0);
    CHECK(fit.param.theta <= 1.1);
    CHECK(std::abs(fit.loglik) <= 5.0);
}

TEST_CASE("comonotone data pins theta at the bracket cap") {
    PseudoObservations diag;
    for (int i = 1; i <= 10; ++i) {
        diag.pairs.emplace_back(i / 11.0, i / 11.0);
    }
    const FittedCopula fit = fit_semiparametric(diag, CopulaFamily::Gumbel);
    CHECK(fit.param.theta >= kGumbelThetaMax - 1e-3);
}

TEST_CASE("theta is a stationary or boundary point of the pseudo-likelihood") {
    for (const CopulaParam truth : {CopulaParam{CopulaFamily::Frank, 4.0},
                                    CopulaParam{CopulaFamily::Gumbel, 2.5},
                                    CopulaParam{CopulaFamily::Clayton, 0.8}}) {
        const PseudoObservations obs = sample_pair(truth, 2000, 7);
        const FittedCopula fit = fit_semiparametric(obs, truth.family);
        const double at = pseudo_loglik(obs, fit.param);
        for (double d : {-1e-4, 1e-4}) {
            const double theta = fit.param.theta + d;
            CopulaParam probe{truth.family, theta};
            try {
                probe.validate();
            } catch (const std::invalid_argument&) {
                continue;
            }
            if (theta > kFrankThetaMax || theta < -kFrankThetaMax) continue;
            CHECK(at >= pseudo_loglik(obs, probe) - 1e-6 * std::abs(at));
        }
    }
}

TEST_CASE("fit preconditions") {
    PseudoObservations small;
    for (int i = 1; i <= 5; ++i) small.pairs.emplace_back(i / 6.0, i / 6.0);
    CHECK_THROWS_AS(fit_semiparametric(small, CopulaFamily::Clayton), FitError);
    CHECK_THROWS_AS(fit_semiparametric(sample_pair({CopulaFamily::Independence}, 100, 1),
                                       CopulaFamily::Independence),
                    FitError);
}

TEST_CASE("l2 distance") {
    const PseudoObservations obs = sample_pair({CopulaFamily::Independence}, 10000, 23);

    SUBCASE("independence close to its own sample") {
        CHECK(l2_distance({CopulaFamily::Independence}, obs) <= 0.02);
    }

    SUBCASE("single pair is finite") {
        PseudoObservations one;
        one.pairs.emplace_back(0.5, 0.5);
        const double d = l2_distance({CopulaFamily::Independence}, one);
        CHECK(std::isfinite(d));
        CHECK(d >= 0.0);
    }

    SUBCASE("deterministic") {
        const CopulaParam c{CopulaFamily::Gumbel, 3.0};
        CHECK(l2_distance(c, obs) == l2_distance(c, obs));
    }

    SUBCASE("mismatched copula is farther than the generator") {
        const PseudoObservations s = sample_pair({CopulaFamily::Clayton, 4.0}, 5000, 3);
        CHECK(l2_distance({CopulaFamily::Clayton, 4.0}, s) <
              l2_distance({CopulaFamily::Independence}, s));
    }
}

TEST_CASE("model selection recovers the generating family") {
    const std::vector<CopulaFamily> all = {CopulaFamily::Clayton, CopulaFamily::Frank,
                                           CopulaFamily::Gumbel};

    const PseudoObservations gum = sample_pair({CopulaFamily::Gumbel, 3.0}, 5000, 201);
    CHECK(select_copula(gum, all).param.family == CopulaFamily::Gumbel);

    const PseudoObservations cla = sample_pair({CopulaFamily::Clayton, 3.0}, 5000, 202);
    CHECK(select_copula(cla, all).param.family == CopulaFamily::Clayton);

    SUBCASE("single candidate wins by default") {
        const FittedCopula fit = select_copula(gum, {CopulaFamily::Clayton});
        CHECK(fit.param.family == CopulaFamily::Clayton);
    }

    SUBCASE("permutation invariance") {
        std::vector<CopulaFamily> reversed = all;
        std::reverse(reversed.begin(), reversed.end());
        const FittedCopula a = select_copula(cla, all);
        const FittedCopula b = select_copula(cla, reversed);
        CHECK(a.param.family == b.param.family);
        CHECK(a.param.theta == b.param.theta);
    }

    SUBCASE("empty family list rejected") {
        CHECK_THROWS_AS(select_copula(gum, {}), std::invalid_argument);
    }
}
