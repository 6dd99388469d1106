#include "copt/psd_repair.hpp"

#include <cmath>
#include <stdexcept>

namespace copt {

SpectralDecomposition spectral_decompose(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("spectral_decompose: matrix must be square");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (((m - m.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale) {
        throw std::invalid_argument("spectral_decompose: matrix not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("spectral_decompose: eigensolver failed");
    }
    // Eigen returns ascending order; flip to descending.
    SpectralDecomposition out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

PsdRepair repair_psd(const Eigen::MatrixXd& m, double delta) {
    if (delta < 0.0 || !std::isfinite(delta)) {
        throw std::invalid_argument("repair_psd: delta must be finite and >= 0");
    }
    const SpectralDecomposition dec = spectral_decompose(m);
    const auto n = dec.eigenvalues.size();

    Eigen::VectorXd tau = Eigen::VectorXd::Zero(n);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (dec.eigenvalues[i] < delta) {
            tau[i] = delta - dec.eigenvalues[i];
            sq += tau[i] * tau[i];
        }
    }

    PsdRepair out;
    out.frobenius = std::sqrt(sq);
    out.changed = sq > 0.0;
    if (!out.changed) {
        out.perturbation = Eigen::MatrixXd::Zero(n, n);
        out.repaired = m;
        return out;
    }
    Eigen::MatrixXd e = dec.eigenvectors * tau.asDiagonal() * dec.eigenvectors.transpose();
    e = ((e + e.transpose()) * 0.5).eval();  // exact symmetry
    out.perturbation = e;
    out.repaired = m + e;
    return out;
}

}  // namespace copt
