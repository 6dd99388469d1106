#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "copt/copulas.hpp"

using namespace copt;

namespace {

const std::vector<CopulaParam> kGridParams = {
    {CopulaFamily::Clayton, 0.5},  {CopulaFamily::Clayton, 2.0}, {CopulaFamily::Clayton, 10.0},
    {CopulaFamily::Frank, -5.0},   {CopulaFamily::Frank, 0.7},   {CopulaFamily::Frank, 5.0},
    {CopulaFamily::Gumbel, 1.5},   {CopulaFamily::Gumbel, 3.0},  {CopulaFamily::Gumbel, 8.0},
    {CopulaFamily::Independence},  {CopulaFamily::Comonotone},
};

// Central mixed second difference of the CDF: independent oracle for the
// closed-form densities.
double fd_density(const CopulaParam& c, double u, double v, double h) {
    return (copula_cdf(c, u + h, v + h) - copula_cdf(c, u + h, v - h) -
            copula_cdf(c, u - h, v + h) + copula_cdf(c, u - h, v - h)) /
           (4.0 * h * h);
}

double sample_corr(const PseudoObservations& obs) {
    double mu = 0.0, mv = 0.0;
    for (const auto& [u, v] : obs.pairs) {
        mu += u;
        mv += v;
    }
    mu /= obs.size();
    mv /= obs.size();
    double suv = 0.0, suu = 0.0, svv = 0.0;
    for (const auto& [u, v] : obs.pairs) {
        suv += (u - mu) * (v - mv);
        suu += (u - mu) * (u - mu);
        svv += (v - mv) * (v - mv);
    }
    return suv / std::sqrt(suu * svv);
}

}  // namespace

TEST_CASE("table values and uniform margins") {
    // Clayton theta=1 at (.5,.5): (2 + 2 - 1)^(-1) = 1/3
    CHECK(copula_cdf({CopulaFamily::Clayton, 1.0}, 0.5, 0.5) == doctest::Approx(1.0 / 3.0));

    // Gumbel theta=1 degenerates to the product copula
    for (double u = 0.1; u < 1.0; u += 0.2) {
        for (double v = 0.1; v < 1.0; v += 0.2) {
            CHECK(copula_cdf({CopulaFamily::Gumbel, 1.0}, u, v) ==
                  doctest::Approx(u * v).epsilon(1e-12));
        }
    }

    for (const CopulaParam& c : kGridParams) {
        for (double t = 0.05; t < 1.0; t += 0.1) {
            CHECK(copula_cdf(c, 1.0, t) == doctest::Approx(t).epsilon(1e-12));
            CHECK(copula_cdf(c, t, 1.0) == doctest::Approx(t).epsilon(1e-12));
            CHECK(copula_cdf(c, 0.0, t) == 0.0);
            CHECK(copula_cdf(c, t, 0.0) == 0.0);
        }
    }
}

TEST_CASE("Frechet-Hoeffding bounds and symmetry on a grid") {
    for (const CopulaParam& c : kGridParams) {
        for (int i = 1; i < 50; ++i) {
            for (int j = 1; j < 50; ++j) {
                const double u = i / 50.0;
                const double v = j / 50.0;
                const double value = copula_cdf(c, u, v);
                CHECK(value >= std::max(u + v - 1.0, 0.0) - 1e-12);
                CHECK(value <= std::min(u, v) + 1e-12);
                CHECK(value == doctest::Approx(copula_cdf(c, v, u)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("2-increasing property on random rectangles") {
    std::mt19937_64 eng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (const CopulaParam& c : kGridParams) {
        for (int rep = 0; rep < 500; ++rep) {
            double u1 = dist(eng), u2 = dist(eng), v1 = dist(eng), v2 = dist(eng);
            if (u1 > u2) std::swap(u1, u2);
            if (v1 > v2) std::swap(v1, v2);
            const double mass = copula_cdf(c, u2, v2) - copula_cdf(c, u1, v2) -
                                copula_cdf(c, u2, v1) + copula_cdf(c, u1, v1);
            CHECK(mass >= -1e-12);
        }
    }
}

TEST_CASE("closed-form densities") {
    // Product copula density is 1 everywhere
    CHECK(copula_density({CopulaFamily::Gumbel, 1.0}, 0.3, 0.8) == doctest::Approx(1.0));
    CHECK(copula_density({CopulaFamily::Independence}, 0.3, 0.8) == 1.0);

    // Clayton theta=1 at (.5,.5): symbolic differentiation gives 32/27
    CHECK(copula_density({CopulaFamily::Clayton, 1.0}, 0.5, 0.5) ==
          doctest::Approx(32.0 / 27.0).epsilon(1e-12));

    SUBCASE("matches central finite differences of the CDF") {
        for (const CopulaParam& c : kGridParams) {
            if (c.family == CopulaFamily::Comonotone) continue;
            for (double u = 0.15; u < 0.95; u += 0.2) {
                for (double v = 0.15; v < 0.95; v += 0.2) {
                    const double exact = copula_density(c, u, v);
                    const double approx = fd_density(c, u, v, 1e-4);
                    CHECK(exact == doctest::Approx(approx).epsilon(1e-5));
                }
            }
        }
    }

    SUBCASE("grid integral of the density recovers the box mass") {
        const double a = 0.01, b = 0.99;
        for (const CopulaParam& c : {CopulaParam{CopulaFamily::Clayton, 2.0},
                                     CopulaParam{CopulaFamily::Frank, -4.0},
                                     CopulaParam{CopulaFamily::Gumbel, 2.5}}) {
            const int g = 400;
            const double step = (b - a) / g;
            double integral = 0.0;
            for (int i = 0; i < g; ++i) {
                for (int j = 0; j < g; ++j) {
                    integral += copula_density(c, a + (i + 0.5) * step, a + (j + 0.5) * step);
                }
            }
            integral *= step * step;
            const double mass = copula_cdf(c, b, b) - copula_cdf(c, a, b) -
                                copula_cdf(c, b, a) + copula_cdf(c, a, a);
            CHECK(integral == doctest::Approx(mass).epsilon(2e-3));
        }
    }

    CHECK_THROWS_AS(copula_density({CopulaFamily::Clayton, 1.0}, 0.0, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(copula_density({CopulaFamily::Comonotone}, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("parameter domains") {
    CHECK_THROWS_AS(copula_cdf({CopulaFamily::Clayton, -1.0}, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(copula_cdf({CopulaFamily::Clayton, 0.0}, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(copula_cdf({CopulaFamily::Frank, 0.0}, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(copula_cdf({CopulaFamily::Gumbel, 0.5}, 0.5, 0.5), std::invalid_argument);
    CHECK_NOTHROW(copula_cdf({CopulaFamily::Gumbel, 1.0}, 0.5, 0.5));
}

TEST_CASE("conditional cdf and inversion") {
    for (const CopulaParam& c : {CopulaParam{CopulaFamily::Clayton, 3.0},
                                 CopulaParam{CopulaFamily::Frank, -7.0},
                                 CopulaParam{CopulaFamily::Gumbel, 2.0}}) {
        // dC/du via finite differences of the CDF in u
        for (double u = 0.2; u < 1.0; u += 0.3) {
            for (double v = 0.2; v < 1.0; v += 0.3) {
                const double h = 1e-6;
                const double fd =
                    (copula_cdf(c, u + h, v) - copula_cdf(c, u - h, v)) / (2.0 * h);
                CHECK(conditional_cdf(c, u, v) == doctest::Approx(fd).epsilon(1e-5));
            }
        }
        // inversion round trip
        for (double u = 0.1; u < 1.0; u += 0.2) {
            for (double p = 0.1; p < 1.0; p += 0.2) {
                const double v = invert_conditional(c, u, p);
                CHECK(conditional_cdf(c, u, v) == doctest::Approx(p).epsilon(1e-8));
            }
        }
    }
}

TEST_CASE("sampling is deterministic and has the right law") {
    const CopulaParam indep{CopulaFamily::Gumbel, 1.0};
    const PseudoObservations a = sample_pair(indep, 1000, 42);
    const PseudoObservations b = sample_pair(indep, 1000, 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.u(i) == b.u(i));
        CHECK(a.v(i) == b.v(i));
    }

    SUBCASE("product copula samples are uncorrelated") {
        const PseudoObservations s = sample_pair(indep, 100000, 9);
        CHECK(std::abs(sample_corr(s)) < 0.01);
    }

    SUBCASE("empirical box frequency matches the closed form") {
        const CopulaParam clayton{CopulaFamily::Clayton, 5.0};
        const std::size_t n = 100000;
        const PseudoObservations s = sample_pair(clayton, n, 31);
        const double p = copula_cdf(clayton, 0.2, 0.2);
        const double freq = empirical_copula(s, 0.2, 0.2);
        const double se = std::sqrt(p * (1.0 - p) / n);
        CHECK(std::abs(freq - p) < 3.0 * se);
    }

    SUBCASE("comonotone samples sit on the diagonal") {
        const PseudoObservations s = sample_pair({CopulaFamily::Comonotone}, 100, 1);
        for (const auto& [u, v] : s.pairs) CHECK(u == v);
    }
}

TEST_CASE("empirical copula") {
    PseudoObservations obs;
    std::mt19937_64 eng(17);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < 50; ++i) obs.pairs.emplace_back(dist(eng), dist(eng));

    CHECK(empirical_copula(obs, 1.0, 1.0) == 1.0);
    CHECK(empirical_copula(obs, 0.0, 0.5) == 0.0);
    CHECK(empirical_copula(obs, 0.5, 0.0) == 0.0);

    SUBCASE("converges to the generating copula") {
        const CopulaParam clayton{CopulaFamily::Clayton, 2.0};
        const PseudoObservations s = sample_pair(clayton, 10000, 77);
        double worst = 0.0;
        for (int i = 1; i <= 20; ++i) {
            for (int j = 1; j <= 20; ++j) {
                const double u = i / 20.0;
                const double v = j / 20.0;
                worst = std::max(worst,
                                 std::abs(empirical_copula(s, u, v) - copula_cdf(clayton, u, v)));
            }
        }
        CHECK(worst <= 0.02);
    }
}

TEST_CASE("tail dependence coefficients") {
    const TailCoefficients indep = tail_dependence({CopulaFamily::Gumbel, 1.0});
    CHECK(std::abs(indep.lower) < 1e-6);
    CHECK(std::abs(indep.upper) < 1e-6);

    // Closed forms 2^(-1/theta) and 2 - 2^(1/theta) are the oracle
    const TailCoefficients clayton = tail_dependence({CopulaFamily::Clayton, 2.0});
    CHECK(std::abs(clayton.lower - std::pow(2.0, -0.5)) < 1e-3);
    CHECK(std::abs(clayton.upper) < 1e-3);

    const TailCoefficients gumbel = tail_dependence({CopulaFamily::Gumbel, 2.0});
    CHECK(std::abs(gumbel.upper - (2.0 - std::sqrt(2.0))) < 1e-3);
    CHECK(std::abs(gumbel.lower) < 1e-3);

    for (double theta : {-5.0, 1.0, 5.0}) {
        const TailCoefficients frank = tail_dependence({CopulaFamily::Frank, theta});
        CHECK(std::abs(frank.lower) <= 1e-3);
        CHECK(std::abs(frank.upper) <= 1e-3);
    }

    const TailCoefficients como = tail_dependence({CopulaFamily::Comonotone});
    CHECK(como.lower == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(como.upper == doctest::Approx(1.0).epsilon(1e-6));

    for (const CopulaParam& c : kGridParams) {
        const TailCoefficients t = tail_dependence(c);
        CHECK(t.lower >= 0.0);
        CHECK(t.lower <= 1.0);
        CHECK(t.upper >= 0.0);
        CHECK(t.upper <= 1.0);
    }
}
