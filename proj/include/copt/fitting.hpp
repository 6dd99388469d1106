#pragma once

#include <string>
#include <utility>
#include <vector>

#include "copt/copulas.hpp"
#include "copt/marginals.hpp"

namespace copt {

// Search brackets for the 1-D pseudo-likelihood maximisation. The caps make
// degenerate comonotone data well-defined (theta pinned at the bound).
inline constexpr double kClaytonThetaMin = 1e-3;
inline constexpr double kClaytonThetaMax = 50.0;
inline constexpr double kFrankThetaAbsMin = 1e-3;
inline constexpr double kFrankThetaMax = 50.0;
inline constexpr double kGumbelThetaMin = 1.0;
inline constexpr double kGumbelThetaMax = 50.0;

// Quadrature grid for the L2 distance to the empirical copula.
inline constexpr int kL2GridSize = 50;

struct FittedCopula {
    CopulaParam param;
    double loglik = 0.0;
    double l2 = 0.0;                        // distance to the empirical copula
    std::pair<std::string, std::string> pair;  // underlier ids, optional
};

// Pseudo-log-likelihood of the sample under the family at theta.
double pseudo_loglik(const PseudoObservations& obs, const CopulaParam& param);

// Semi-parametric MLE for one family: golden-section search over the family
// bracket, refined by bisection on the derivative sign, |theta| tolerance 1e-6.
// Throws FitError when the likelihood is non-finite everywhere or the sample
// is too small (< 10 pairs).
FittedCopula fit_semiparametric(const PseudoObservations& obs, CopulaFamily family);

// Midpoint-rule L2 distance between the copula CDF and the empirical copula
// on a kL2GridSize x kL2GridSize grid.
double l2_distance(const CopulaParam& param, const PseudoObservations& obs);

// Fits every candidate family and returns the one with the smallest L2
// distance; ties broken by higher loglik, then by family order
// (Clayton, Frank, Gumbel). Throws FitError if every family fails; the
// underlier pair, when given, is named in the error.
FittedCopula select_copula(const PseudoObservations& obs,
                           const std::vector<CopulaFamily>& families,
                           const std::pair<std::string, std::string>& pair);
FittedCopula select_copula(const PseudoObservations& obs,
                           const std::vector<CopulaFamily>& families);

}  // namespace copt
