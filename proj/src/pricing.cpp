#include "copt/pricing.hpp"

#include <cmath>
#include <stdexcept>

#include "copt/random.hpp"

namespace copt {

namespace {

void check_inputs(double spot, double strike, double vol, double t_years) {
    if (!(spot > 0.0) || !(strike > 0.0)) {
        throw std::invalid_argument("black_scholes: spot and strike must be positive");
    }
    if (vol < 0.0 || t_years < 0.0) {
        throw std::invalid_argument("black_scholes: vol and maturity must be non-negative");
    }
}

}  // namespace

double black_scholes_call(double spot, double strike, double vol, double t_years, double rate) {
    check_inputs(spot, strike, vol, t_years);
    const double df = std::exp(-rate * t_years);
    const double forward = spot / df;
    const double stdev = vol * std::sqrt(t_years);
    if (stdev <= 0.0) {
        return df * std::max(forward - strike, 0.0);
    }
    const double d1 = (std::log(spot / strike) + (rate + 0.5 * vol * vol) * t_years) / stdev;
    const double d2 = d1 - stdev;
    return spot * normal_cdf(d1) - strike * df * normal_cdf(d2);
}

double black_scholes_put(double spot, double strike, double vol, double t_years, double rate) {
    check_inputs(spot, strike, vol, t_years);
    const double df = std::exp(-rate * t_years);
    const double forward = spot / df;
    const double stdev = vol * std::sqrt(t_years);
    if (stdev <= 0.0) {
        return df * std::max(strike - forward, 0.0);
    }
    const double d1 = (std::log(spot / strike) + (rate + 0.5 * vol * vol) * t_years) / stdev;
    const double d2 = d1 - stdev;
    return strike * df * normal_cdf(-d2) - spot * normal_cdf(-d1);
}

}  // namespace copt
