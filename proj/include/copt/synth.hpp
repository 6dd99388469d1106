#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copt/copulas.hpp"
#include "copt/market.hpp"

namespace copt {

struct SynthUnderlier {
    std::string ticker;
    double spot = 100.0;
    double drift = 0.0;  // annualised
    double vol = 0.2;    // annualised, > 0
};

struct SynthConfig {
    std::vector<SynthUnderlier> underliers;
    std::vector<OptionTemplate> templates;
    int periods = 120;      // price rows = periods + 1
    int period_days = 21;   // trading days per period (dt = days / 252)
    double rate = 0.0;      // annualised risk-free used by the premium model
    double spread = 1.05;   // multiplier on model premiums
    CopulaParam copula;     // cross-underlier coupling
    std::string start_date = "2010-01-15";
    std::uint64_t seed = 1;

    void validate() const;
};

// Deterministic synthetic market: lognormal per-period moves with the given
// marginal parameters, coupled through the configured copula (adjacent
// tickers share the bivariate copula via conditional inversion), premiums
// from the lognormal pricer times the spread.
MarketDataset synth_market(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace copt
