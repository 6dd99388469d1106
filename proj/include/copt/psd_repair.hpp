#pragma once

#include <Eigen/Dense>

namespace copt {

struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;   // descending
    Eigen::MatrixXd eigenvectors;  // orthogonal, columns match eigenvalues
};

// Symmetric eigendecomposition (input symmetric within 1e-12 entrywise).
// Reconstruction residual <= 1e-8 * max|m|, orthogonality <= 1e-10.
SpectralDecomposition spectral_decompose(const Eigen::MatrixXd& m);

struct PsdRepair {
    Eigen::MatrixXd repaired;      // m + perturbation, eigenvalues >= delta
    Eigen::MatrixXd perturbation;  // Q diag(tau) Q^T, tau_i = max(delta - lambda_i, 0)
    double frobenius = 0.0;        // closed form (sum_{lambda_i < delta} (delta-lambda_i)^2)^(1/2)
    bool changed = false;
};

// Minimal-Frobenius perturbation clipping eigenvalues below `delta` up to it.
// delta > 0 yields a positive definite (hence invertible) result.
PsdRepair repair_psd(const Eigen::MatrixXd& m, double delta);

}  // namespace copt
