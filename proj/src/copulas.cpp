#include "copt/copulas.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "copt/random.hpp"

namespace copt {

std::string family_name(CopulaFamily f) {
    switch (f) {
        case CopulaFamily::Clayton: return "clayton";
        case CopulaFamily::Frank: return "frank";
        case CopulaFamily::Gumbel: return "gumbel";
        case CopulaFamily::Independence: return "independence";
        case CopulaFamily::Comonotone: return "comonotone";
    }
    return "unknown";
}

std::optional<CopulaFamily> family_from_name(std::string_view name) {
    if (name == "clayton") return CopulaFamily::Clayton;
    if (name == "frank") return CopulaFamily::Frank;
    if (name == "gumbel") return CopulaFamily::Gumbel;
    if (name == "independence") return CopulaFamily::Independence;
    if (name == "comonotone") return CopulaFamily::Comonotone;
    return std::nullopt;
}

void CopulaParam::validate() const {
    switch (family) {
        case CopulaFamily::Clayton:
            if (!(theta > 0.0) || !std::isfinite(theta)) {
                throw std::invalid_argument("Clayton requires theta > 0");
            }
            break;
        case CopulaFamily::Frank:
            if (theta == 0.0 || !std::isfinite(theta)) {
                throw std::invalid_argument("Frank requires theta != 0");
            }
            break;
        case CopulaFamily::Gumbel:
            if (!(theta >= 1.0) || !std::isfinite(theta)) {
                throw std::invalid_argument("Gumbel requires theta >= 1");
            }
            break;
        case CopulaFamily::Independence:
        case CopulaFamily::Comonotone:
            break;
    }
}

namespace {

double checked_unit(double x, const char* what) {
    if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) {
        throw std::invalid_argument(std::string(what) + " outside [0,1]");
    }
    return std::clamp(x, 0.0, 1.0);
}

// log(u^-theta + v^-theta - 1) without overflow; theta > 0, u,v in (0,1).
double clayton_log_sum(double theta, double u, double v) {
    const double m = std::min(u, v);
    const double s = std::pow(m / u, theta) + std::pow(m / v, theta) - std::pow(m, theta);
    return -theta * std::log(m) + std::log(s);
}

// h1 - hu*hv with h_z = 1 - exp(-theta z), written as a sum of same-sign
// terms so the near-(1,1) corner does not cancel.
double frank_bracket(double theta, double u, double v) {
    const double eu = std::exp(-theta * u);
    const double ev = std::exp(-theta * v);
    return eu * (1.0 - ev) + ev * (1.0 - std::exp(-theta * (1.0 - v)));
}

// log(x + y) given lx = log x, ly = log y.
double log_add(double lx, double ly) {
    const double hi = std::max(lx, ly);
    const double lo = std::min(lx, ly);
    if (hi == -std::numeric_limits<double>::infinity()) return hi;
    return hi + std::log1p(std::exp(lo - hi));
}

double cdf_interior(const CopulaParam& c, double u, double v) {
    switch (c.family) {
        case CopulaFamily::Clayton:
            return std::exp(-clayton_log_sum(c.theta, u, v) / c.theta);
        case CopulaFamily::Frank: {
            const double h1 = 1.0 - std::exp(-c.theta);
            return -std::log(frank_bracket(c.theta, u, v) / h1) / c.theta;
        }
        case CopulaFamily::Gumbel: {
            const double ls = log_add(c.theta * std::log(-std::log(u)),
                                      c.theta * std::log(-std::log(v)));
            return std::exp(-std::exp(ls / c.theta));
        }
        case CopulaFamily::Independence:
            return u * v;
        case CopulaFamily::Comonotone:
            return std::min(u, v);
    }
    return 0.0;
}

}  // namespace

double copula_cdf(const CopulaParam& c, double u, double v) {
    c.validate();
    u = checked_unit(u, "u");
    v = checked_unit(v, "v");
    if (u == 0.0 || v == 0.0) return 0.0;
    if (u == 1.0) return v;
    if (v == 1.0) return u;
    const double value = cdf_interior(c, u, v);
    return std::clamp(value, 0.0, 1.0);
}

double log_copula_density(const CopulaParam& c, double u, double v) {
    c.validate();
    if (!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0)) {
        throw std::invalid_argument("copula density needs u,v strictly inside (0,1)");
    }
    switch (c.family) {
        case CopulaFamily::Clayton: {
            const double lt = clayton_log_sum(c.theta, u, v);
            return std::log1p(c.theta) - (c.theta + 1.0) * std::log(u * v) -
                   (1.0 / c.theta + 2.0) * lt;
        }
        case CopulaFamily::Frank: {
            const double h1 = 1.0 - std::exp(-c.theta);
            const double b = frank_bracket(c.theta, u, v);
            // c = theta*h1 * exp(-theta(u+v)) / b^2; theta*h1 > 0 for all theta != 0
            return std::log(c.theta * h1) - c.theta * (u + v) - 2.0 * std::log(std::abs(b));
        }
        case CopulaFamily::Gumbel: {
            const double llu = std::log(-std::log(u));
            const double llv = std::log(-std::log(v));
            const double ls = log_add(c.theta * llu, c.theta * llv);
            const double a = std::exp(ls / c.theta);  // S^(1/theta)
            return -a + (c.theta - 1.0) * (llu + llv) - std::log(u * v) +
                   (1.0 / c.theta - 2.0) * ls + std::log(a + c.theta - 1.0);
        }
        case CopulaFamily::Independence:
            return 0.0;
        case CopulaFamily::Comonotone:
            throw std::invalid_argument("comonotone copula has no density");
    }
    return 0.0;
}

double copula_density(const CopulaParam& c, double u, double v) {
    return std::exp(log_copula_density(c, u, v));
}

namespace {

// dC/du with the u-dependent factors precomputed once, so that the bisection
// in invert_conditional pays for a single transcendental per probe.
class ConditionalSlice {
  public:
    ConditionalSlice(const CopulaParam& c, double u) : c_(c), u_(u) {
        switch (c.family) {
            case CopulaFamily::Clayton:
                u_pow_ = std::pow(u, -c.theta);
                pref_ = u_pow_ / u;  // u^(-theta-1)
                break;
            case CopulaFamily::Frank:
                eu_ = std::exp(-c.theta * u);
                eth_ = std::exp(-c.theta);
                break;
            case CopulaFamily::Gumbel:
                lx_ = c.theta * std::log(-std::log(u));
                pref_ = std::pow(-std::log(u), c.theta - 1.0) / u;
                break;
            default:
                break;
        }
    }

    double operator()(double v) const {
        switch (c_.family) {
            case CopulaFamily::Clayton: {
                const double t = u_pow_ + std::pow(v, -c_.theta) - 1.0;
                return std::pow(t, -1.0 / c_.theta - 1.0) * pref_;
            }
            case CopulaFamily::Frank: {
                const double ev = std::exp(-c_.theta * v);
                const double b = eu_ * (1.0 - ev) + ev - eth_;
                return eu_ * (1.0 - ev) / b;
            }
            case CopulaFamily::Gumbel: {
                const double ls = log_add(lx_, c_.theta * std::log(-std::log(v)));
                const double a = std::exp(ls / c_.theta);
                return std::exp(-a + (1.0 / c_.theta - 1.0) * ls) * pref_;
            }
            case CopulaFamily::Independence:
                return v;
            case CopulaFamily::Comonotone:
                return v >= u_ ? 1.0 : 0.0;
        }
        return 0.0;
    }

  private:
    CopulaParam c_;
    double u_ = 0.0;
    double u_pow_ = 0.0, pref_ = 0.0;   // Clayton / Gumbel
    double eu_ = 0.0, eth_ = 0.0;       // Frank
    double lx_ = 0.0;                   // Gumbel
};

double invert_slice(const CopulaParam& c, const ConditionalSlice& h, double u, double p) {
    if (c.family == CopulaFamily::Independence) return p;
    if (c.family == CopulaFamily::Comonotone) return u;
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && (hi - lo) > 1e-10 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double conditional_cdf(const CopulaParam& c, double u, double v) {
    c.validate();
    if (!(u > 0.0 && u < 1.0)) {
        throw std::invalid_argument("conditional_cdf needs u strictly inside (0,1)");
    }
    v = checked_unit(v, "v");
    if (v == 0.0) return 0.0;
    if (v == 1.0) return 1.0;
    return std::clamp(ConditionalSlice(c, u)(v), 0.0, 1.0);
}

double invert_conditional(const CopulaParam& c, double u, double p) {
    c.validate();
    if (!(u > 0.0 && u < 1.0) || !(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("invert_conditional needs u, p strictly inside (0,1)");
    }
    return invert_slice(c, ConditionalSlice(c, u), u, p);
}

PseudoObservations sample_pair(const CopulaParam& c, std::size_t n, std::uint64_t seed) {
    c.validate();
    if (n < 1) throw std::invalid_argument("sample_pair: n must be >= 1");
    Rng rng(seed);
    PseudoObservations obs;
    obs.pairs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        const double p = rng.uniform();
        obs.pairs.emplace_back(u, invert_slice(c, ConditionalSlice(c, u), u, p));
    }
    return obs;
}

double empirical_copula(const PseudoObservations& obs, double u, double v) {
    if (obs.pairs.empty()) {
        throw std::invalid_argument("empirical_copula: no observations");
    }
    std::size_t count = 0;
    for (const auto& [a, b] : obs.pairs) {
        if (a <= u && b <= v) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(obs.pairs.size());
}

namespace {

// Richardson/Neville table for a quotient sampled at h = 10^-k, k = 1..kmax.
double extrapolate_to_zero(const std::array<double, 8>& q) {
    std::array<double, 8> t = q;
    double ratio = 10.0;
    for (std::size_t level = 1; level < t.size(); ++level) {
        for (std::size_t i = t.size() - 1; i >= level; --i) {
            t[i] = (ratio * t[i] - t[i - 1]) / (ratio - 1.0);
        }
        ratio *= 10.0;
    }
    return t.back();
}

}  // namespace

TailCoefficients tail_dependence(const CopulaParam& c) {
    c.validate();
    std::array<double, 8> qlo{};
    std::array<double, 8> qhi{};
    for (int k = 1; k <= 8; ++k) {
        const double h = std::pow(10.0, -k);
        qlo[k - 1] = copula_cdf(c, h, h) / h;
        qhi[k - 1] = (2.0 * h - 1.0 + copula_cdf(c, 1.0 - h, 1.0 - h)) / h;
    }
    TailCoefficients out;
    out.lower = std::clamp(extrapolate_to_zero(qlo), 0.0, 1.0);
    out.upper = std::clamp(extrapolate_to_zero(qhi), 0.0, 1.0);
    return out;
}

}  // namespace copt
