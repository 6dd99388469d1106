#include "copt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "copt/errors.hpp"
#include "copt/pricing.hpp"
#include "copt/random.hpp"

namespace copt {

void SynthConfig::validate() const {
    if (underliers.empty()) throw ConfigError("synth: no underliers");
    if (templates.empty()) throw ConfigError("synth: no option templates");
    if (periods < 2) throw ConfigError("synth: need at least 2 periods");
    if (period_days < 1) throw ConfigError("synth: period_days must be >= 1");
    if (!(spread > 0.0)) throw ConfigError("synth: spread must be positive");
    std::set<std::string> seen;
    for (const SynthUnderlier& u : underliers) {
        if (u.ticker.empty()) throw ConfigError("synth: empty ticker");
        if (!seen.insert(u.ticker).second) throw ConfigError("synth: duplicate ticker " + u.ticker);
        if (!(u.spot > 0.0)) throw ConfigError("synth: non-positive spot for " + u.ticker);
        if (!(u.vol > 0.0)) throw ConfigError("synth: non-positive vol for " + u.ticker);
    }
    for (const OptionTemplate& t : templates) t.validate();
    copula.validate();
}

namespace {

// start_date plus `months` calendar months, day-of-month preserved.
std::string add_months(const std::string& iso, int months) {
    int year = std::stoi(iso.substr(0, 4));
    int month = std::stoi(iso.substr(5, 2));
    const std::string day = iso.substr(8, 2);
    const int total = (year * 12 + month - 1) + months;
    year = total / 12;
    month = total % 12 + 1;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%s", year, month, day.c_str());
    return buf;
}

}  // namespace

MarketDataset synth_market(const SynthConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const std::size_t k = cfg.underliers.size();
    const std::size_t n_dates = static_cast<std::size_t>(cfg.periods) + 1;
    const double dt = cfg.period_days / 252.0;
    const double sqrt_dt = std::sqrt(dt);

    // Ticker columns are sorted; simulation follows the sorted order so the
    // copula chain couples adjacent columns deterministically.
    std::vector<std::size_t> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return cfg.underliers[a].ticker < cfg.underliers[b].ticker;
    });

    MarketDataset data;
    data.dates.resize(n_dates);
    for (std::size_t d = 0; d < n_dates; ++d) {
        data.dates[d] = add_months(cfg.start_date, static_cast<int>(d));
    }
    data.tickers.resize(k);
    for (std::size_t i = 0; i < k; ++i) data.tickers[i] = cfg.underliers[order[i]].ticker;
    data.spots.resize(static_cast<Eigen::Index>(n_dates), static_cast<Eigen::Index>(k));
    data.premiums.assign(n_dates, std::vector<std::vector<PremiumQuote>>(k));

    Rng rng(seed);
    for (std::size_t col = 0; col < k; ++col) {
        data.spots(0, static_cast<Eigen::Index>(col)) = cfg.underliers[order[col]].spot;
    }
    const bool independent = cfg.copula.family == CopulaFamily::Independence;
    for (std::size_t period = 0; period < static_cast<std::size_t>(cfg.periods); ++period) {
        double prev_u = 0.0;
        for (std::size_t col = 0; col < k; ++col) {
            double u;
            if (col == 0 || independent) {
                u = rng.uniform();
            } else {
                u = invert_conditional(cfg.copula, prev_u, rng.uniform());
            }
            prev_u = u;
            const SynthUnderlier& und = cfg.underliers[order[col]];
            const double z = inverse_normal_cdf(u);
            const double lr = (und.drift - 0.5 * und.vol * und.vol) * dt + und.vol * sqrt_dt * z;
            data.spots(static_cast<Eigen::Index>(period + 1), static_cast<Eigen::Index>(col)) =
                data.spots(static_cast<Eigen::Index>(period), static_cast<Eigen::Index>(col)) *
                std::exp(lr);
        }
    }

    for (std::size_t d = 0; d < n_dates; ++d) {
        for (std::size_t col = 0; col < k; ++col) {
            const SynthUnderlier& und = cfg.underliers[order[col]];
            const double s = data.spots(static_cast<Eigen::Index>(d),
                                        static_cast<Eigen::Index>(col));
            for (const OptionTemplate& t : cfg.templates) {
                PremiumQuote q;
                q.kind = t.kind;
                q.strike = t.strike_lo(s);
                q.strike_hi = t.strike_hi(s);
                switch (t.kind) {
                    case OptionKind::Call:
                        q.ask = black_scholes_call(s, q.strike, und.vol, dt, cfg.rate);
                        break;
                    case OptionKind::Put:
                        q.ask = black_scholes_put(s, q.strike, und.vol, dt, cfg.rate);
                        break;
                    case OptionKind::Strangle:
                        q.ask = black_scholes_put(s, q.strike, und.vol, dt, cfg.rate) +
                                black_scholes_call(s, q.strike_hi, und.vol, dt, cfg.rate);
                        break;
                }
                q.ask *= cfg.spread;
                data.premiums[d][col].push_back(q);
            }
        }
    }
    return data;
}

}  // namespace copt
