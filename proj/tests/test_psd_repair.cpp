#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "copt/psd_repair.hpp"

using namespace copt;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& eng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = normal(eng);
    }
    return 0.5 * (a + a.transpose());
}

}  // namespace

TEST_CASE("spectral decomposition") {
    SUBCASE("identity") {
        const SpectralDecomposition d = spectral_decompose(Eigen::MatrixXd::Identity(3, 3));
        for (int i = 0; i < 3; ++i) CHECK(d.eigenvalues[i] == doctest::Approx(1.0));
    }

    SUBCASE("hand 2x2") {
        Eigen::MatrixXd m(2, 2);
        m << 1.0, 2.0, 2.0, 1.0;
        const SpectralDecomposition d = spectral_decompose(m);
        CHECK(d.eigenvalues[0] == doctest::Approx(3.0));
        CHECK(d.eigenvalues[1] == doctest::Approx(-1.0));
    }

    SUBCASE("reconstruction and orthogonality bounds") {
        std::mt19937_64 eng(13);
        for (int rep = 0; rep < 10; ++rep) {
            const Eigen::MatrixXd m = random_symmetric(8, eng);
            const SpectralDecomposition d = spectral_decompose(m);
            const Eigen::MatrixXd rebuilt =
                d.eigenvectors * d.eigenvalues.asDiagonal() * d.eigenvectors.transpose();
            CHECK((rebuilt - m).cwiseAbs().maxCoeff() <= 1e-8 * m.cwiseAbs().maxCoeff());
            const Eigen::MatrixXd gram = d.eigenvectors.transpose() * d.eigenvectors;
            CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-10);
            for (int i = 1; i < d.eigenvalues.size(); ++i) {
                CHECK(d.eigenvalues[i - 1] >= d.eigenvalues[i]);
            }
        }
    }

    SUBCASE("rejects non-symmetric input") {
        Eigen::MatrixXd m(2, 2);
        m << 1.0, 2.0, 2.1, 1.0;
        CHECK_THROWS_AS(spectral_decompose(m), std::invalid_argument);
    }
}

TEST_CASE("psd repair") {
    SUBCASE("psd input untouched at delta 0") {
        Eigen::MatrixXd m(2, 2);
        m << 2.0, 0.5, 0.5, 1.0;
        const PsdRepair r = repair_psd(m, 0.0);
        CHECK_FALSE(r.changed);
        CHECK(r.frobenius == 0.0);
        CHECK(r.perturbation.cwiseAbs().maxCoeff() == 0.0);
        CHECK((r.repaired - m).cwiseAbs().maxCoeff() == 0.0);
    }

    SUBCASE("hand 2x2 clip") {
        Eigen::MatrixXd m(2, 2);
        m << 1.0, 2.0, 2.0, 1.0;
        const PsdRepair r = repair_psd(m, 0.0);
        CHECK(r.changed);
        CHECK(r.frobenius == doctest::Approx(1.0));
        CHECK(r.repaired(0, 0) == doctest::Approx(1.5));
        CHECK(r.repaired(0, 1) == doctest::Approx(1.5));
        CHECK(r.repaired(1, 0) == doctest::Approx(1.5));
        CHECK(r.repaired(1, 1) == doctest::Approx(1.5));
    }

    SUBCASE("forced negative eigenvalues on random matrices") {
        std::mt19937_64 eng(29);
        const double delta = 1e-6;
        for (int rep = 0; rep < 25; ++rep) {
            Eigen::MatrixXd m = random_symmetric(6, eng);
            m -= 0.5 * Eigen::MatrixXd::Identity(6, 6);  // push spectrum down
            const PsdRepair r = repair_psd(m, delta);

            const SpectralDecomposition d = spectral_decompose(r.repaired);
            CHECK(d.eigenvalues.minCoeff() >= delta - 1e-10);

            // closed-form Frobenius norm vs the matrix norm
            const double direct = r.perturbation.norm();
            if (r.frobenius > 0.0) {
                CHECK(std::abs(direct - r.frobenius) <= 1e-10 * r.frobenius);
            }
            // symmetric within 1e-12 entrywise
            CHECK((r.repaired - r.repaired.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

            // idempotent: repairing the repaired matrix is a no-op
            const PsdRepair again = repair_psd(r.repaired, delta);
            CHECK(again.frobenius <= 1e-10);
            CHECK(again.perturbation.cwiseAbs().maxCoeff() <= 1e-10);
        }
    }

    SUBCASE("closed form equals the clipped-eigenvalue sum") {
        std::mt19937_64 eng(31);
        for (int rep = 0; rep < 10; ++rep) {
            const Eigen::MatrixXd m = random_symmetric(5, eng);
            const double delta = 1e-8;
            const SpectralDecomposition d = spectral_decompose(m);
            double sq = 0.0;
            for (int i = 0; i < 5; ++i) {
                if (d.eigenvalues[i] < delta) {
                    sq += (delta - d.eigenvalues[i]) * (delta - d.eigenvalues[i]);
                }
            }
            const PsdRepair r = repair_psd(m, delta);
            CHECK(r.frobenius == doctest::Approx(std::sqrt(sq)).epsilon(1e-12));
        }
    }
}
