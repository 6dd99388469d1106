#include "copt/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "copt/errors.hpp"

namespace copt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double rank_of(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::Clayton: return 0;
        case CopulaFamily::Frank: return 1;
        case CopulaFamily::Gumbel: return 2;
        case CopulaFamily::Independence: return 3;
        case CopulaFamily::Comonotone: return 4;
    }
    return 5;
}

}  // namespace

double pseudo_loglik(const PseudoObservations& obs, const CopulaParam& param) {
    double sum = 0.0;
    for (const auto& [u, v] : obs.pairs) {
        const double term = log_copula_density(param, u, v);
        if (!std::isfinite(term)) return kNegInf;
        sum += term;
    }
    return sum;
}

namespace {

struct Bracket {
    double lo;
    double hi;
};

std::vector<Bracket> family_brackets(CopulaFamily family) {
    switch (family) {
        case CopulaFamily::Clayton:
            return {{kClaytonThetaMin, kClaytonThetaMax}};
        case CopulaFamily::Frank:
            return {{-kFrankThetaMax, -kFrankThetaAbsMin}, {kFrankThetaAbsMin, kFrankThetaMax}};
        case CopulaFamily::Gumbel:
            return {{kGumbelThetaMin, kGumbelThetaMax}};
        default:
            throw FitError("fit_semiparametric: family " + family_name(family) +
                           " has no free parameter");
    }
}

struct ThetaValue {
    double theta = 0.0;
    double loglik = kNegInf;
};

// Golden-section maximisation on [lo, hi], then bisection on the sign of the
// numerical derivative until the bracket is below `tol`. Assumes a unimodal
// objective on the bracket; the caller narrows around a coarse-scan maximum.
ThetaValue maximise_on(const PseudoObservations& obs, CopulaFamily family, double lo, double hi,
                       double tol) {
    const auto eval = [&](double theta) {
        // probes clamp to the bracket so rounding never leaves the family domain
        return pseudo_loglik(obs, CopulaParam{family, std::clamp(theta, lo, hi)});
    };

    ThetaValue best{lo, eval(lo)};
    const auto consider = [&](double theta, double value) {
        if (value > best.loglik) best = {theta, value};
    };
    consider(hi, eval(hi));

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    consider(x1, f1);
    consider(x2, f2);
    while (b - a > 100.0 * tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = eval(x2);
            consider(x2, f2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = eval(x1);
            consider(x1, f1);
        }
    }

    // Refine on the derivative sign inside the remaining bracket; probes stay
    // clear of the family domain edges.
    const double h = tol * 0.01;
    double da = std::max(a, lo + h);
    double db = std::min(b, hi - h);
    if (da < db) {
        const auto slope_positive = [&](double theta) {
            return eval(theta + h) >= eval(theta - h);
        };
        const bool sa = slope_positive(da);
        const bool sb = slope_positive(db);
        if (sa && !sb) {
            while (db - da > tol) {
                const double mid = 0.5 * (da + db);
                if (slope_positive(mid)) {
                    da = mid;
                } else {
                    db = mid;
                }
            }
            consider(0.5 * (da + db), eval(0.5 * (da + db)));
        } else if (!sa) {
            consider(da, eval(da));
        } else {
            consider(db, eval(db));
        }
    }
    return best;
}

ThetaValue maximise_bracket(const PseudoObservations& obs, CopulaFamily family,
                            const Bracket& br) {
    // Coarse scan locates the basin before the local search.
    constexpr int kScan = 33;
    ThetaValue best;
    int best_idx = -1;
    for (int i = 0; i < kScan; ++i) {
        const double theta = br.lo + (br.hi - br.lo) * i / (kScan - 1);
        const double value = pseudo_loglik(obs, CopulaParam{family, theta});
        if (value > best.loglik) {
            best = {theta, value};
            best_idx = i;
        }
    }
    if (best_idx < 0) return best;  // non-finite everywhere
    const double step = (br.hi - br.lo) / (kScan - 1);
    const double lo = std::max(br.lo, best.theta - step);
    const double hi = std::min(br.hi, best.theta + step);
    ThetaValue refined = maximise_on(obs, family, lo, hi, 1e-6);
    return refined.loglik >= best.loglik ? refined : best;
}

}  // namespace

FittedCopula fit_semiparametric(const PseudoObservations& obs, CopulaFamily family) {
    if (obs.size() < 10) {
        throw FitError("fit_semiparametric: need at least 10 pseudo-observations, have " +
                       std::to_string(obs.size()));
    }
    for (const auto& [u, v] : obs.pairs) {
        if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) {
            throw FitError("fit_semiparametric: pseudo-observation on the unit-square boundary");
        }
    }

    ThetaValue best;
    for (const Bracket& br : family_brackets(family)) {
        const ThetaValue candidate = maximise_bracket(obs, family, br);
        if (candidate.loglik > best.loglik) best = candidate;
    }
    if (!std::isfinite(best.loglik)) {
        throw FitError("fit_semiparametric: non-finite pseudo-likelihood for family " +
                       family_name(family));
    }

    FittedCopula fit;
    fit.param = CopulaParam{family, best.theta};
    fit.loglik = best.loglik;
    fit.l2 = l2_distance(fit.param, obs);
    return fit;
}

namespace {

// Empirical copula evaluated on the midpoint grid via 2-D bin counting;
// O(G^2 + m) instead of O(G^2 m).
std::vector<double> empirical_grid(const PseudoObservations& obs, int g) {
    const int nb = g + 1;  // extra bucket for coordinates beyond the last grid point
    std::vector<int> counts(nb * nb, 0);
    const auto bucket = [g](double x) {
        const int i = static_cast<int>(std::ceil(x * g - 0.5));
        return std::clamp(i, 0, g);
    };
    for (const auto& [a, b] : obs.pairs) {
        ++counts[bucket(a) * nb + bucket(b)];
    }
    // inclusive 2-D prefix sums
    for (int i = 0; i < nb; ++i) {
        for (int j = 1; j < nb; ++j) counts[i * nb + j] += counts[i * nb + j - 1];
    }
    for (int i = 1; i < nb; ++i) {
        for (int j = 0; j < nb; ++j) counts[i * nb + j] += counts[(i - 1) * nb + j];
    }
    std::vector<double> grid(g * g, 0.0);
    const double inv_m = 1.0 / static_cast<double>(obs.size());
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) grid[i * g + j] = counts[i * nb + j] * inv_m;
    }
    return grid;
}

}  // namespace

double l2_distance(const CopulaParam& param, const PseudoObservations& obs) {
    if (obs.pairs.empty()) {
        throw std::invalid_argument("l2_distance: no observations");
    }
    param.validate();
    constexpr int g = kL2GridSize;
    const std::vector<double> emp = empirical_grid(obs, g);
    double sum = 0.0;
    for (int i = 0; i < g; ++i) {
        const double u = (i + 0.5) / g;
        for (int j = 0; j < g; ++j) {
            const double v = (j + 0.5) / g;
            const double diff = emp[i * g + j] - copula_cdf(param, u, v);
            sum += diff * diff;
        }
    }
    return std::sqrt(sum / (g * g));
}

FittedCopula select_copula(const PseudoObservations& obs,
                           const std::vector<CopulaFamily>& families,
                           const std::pair<std::string, std::string>& pair) {
    if (families.empty()) {
        throw std::invalid_argument("select_copula: empty family list");
    }
    bool have_best = false;
    FittedCopula best;
    std::string failures;
    for (CopulaFamily family : families) {
        FittedCopula fit;
        try {
            fit = fit_semiparametric(obs, family);
        } catch (const FitError& e) {
            failures += failures.empty() ? e.what() : std::string("; ") + e.what();
            continue;
        }
        fit.pair = pair;
        const bool better =
            !have_best || fit.l2 < best.l2 ||
            (fit.l2 == best.l2 &&
             (fit.loglik > best.loglik ||
              (fit.loglik == best.loglik && rank_of(family) < rank_of(best.param.family))));
        if (better) {
            best = fit;
            have_best = true;
        }
    }
    if (!have_best) {
        throw FitError("select_copula: every family failed for pair (" + pair.first + ", " +
                       pair.second + "): " + failures);
    }
    return best;
}

FittedCopula select_copula(const PseudoObservations& obs,
                           const std::vector<CopulaFamily>& families) {
    return select_copula(obs, families, {"", ""});
}

}  // namespace copt
