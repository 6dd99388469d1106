#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "copt/marginals.hpp"

namespace copt {

// Clayton/Frank/Gumbel are the fitted Archimedean families. Independence is
// the theta-free product copula. Comonotone is the upper Frechet bound,
// used for option pairs written on the same underlier; it is never fitted.
enum class CopulaFamily { Clayton, Frank, Gumbel, Independence, Comonotone };

std::string family_name(CopulaFamily f);
std::optional<CopulaFamily> family_from_name(std::string_view name);

struct CopulaParam {
    CopulaFamily family = CopulaFamily::Independence;
    double theta = 0.0;

    // Clayton: theta > 0; Frank: theta != 0; Gumbel: theta >= 1.
    // Independence/Comonotone ignore theta.
    void validate() const;
};

// Bivariate copula CDF. u, v in [0,1].
double copula_cdf(const CopulaParam& c, double u, double v);

// Copula density (mixed second partial of the CDF, closed form per family).
// u, v strictly inside (0,1). Comonotone has no density.
double copula_density(const CopulaParam& c, double u, double v);
double log_copula_density(const CopulaParam& c, double u, double v);

// dC/du at (u,v): the conditional CDF P(V <= v | U = u).
double conditional_cdf(const CopulaParam& c, double u, double v);

// Solves conditional_cdf(c, u, v) = p for v by bisection
// (relative tolerance 1e-10 in v).
double invert_conditional(const CopulaParam& c, double u, double p);

// n iid pairs with copula c via conditional-distribution inversion.
// Deterministic for a given seed.
PseudoObservations sample_pair(const CopulaParam& c, std::size_t n, std::uint64_t seed);

// Fraction of pseudo-observation pairs with both coordinates <= (u, v).
double empirical_copula(const PseudoObservations& obs, double u, double v);

struct TailCoefficients {
    double lower = 0.0;  // lambda_L
    double upper = 0.0;  // lambda_U
};

// Numerical limits of the tail-dependence quotients, Richardson-extrapolated
// over u = 10^-k (lower) and u = 1 - 10^-k (upper), k = 1..8.
TailCoefficients tail_dependence(const CopulaParam& c);

}  // namespace copt
