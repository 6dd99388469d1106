#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "copt/dependence.hpp"

namespace copt {

// A moneyness template, re-struck off the prevailing spot at every trade
// date: Call x% OTM -> K = (1+x) spot; Put x% OTM -> K = (1-x) spot;
// Strangle x% either side -> ((1-x) spot, (1+x) spot).
struct OptionTemplate {
    OptionKind kind = OptionKind::Call;
    double otm = 0.0;

    void validate() const;
    std::string label() const;            // e.g. "C10", "P5", "S10"
    double strike_lo(double spot) const;  // single strike; put side for strangles
    double strike_hi(double spot) const;  // call side for strangles, else 0
};

// Intrinsic value at expiry given the strikes.
double option_payout(OptionKind kind, double strike_lo, double strike_hi, double terminal);

// (payout - premium) / premium; equals -1 exactly when the payout is zero.
double option_return(double premium, double payout);

struct PremiumQuote {
    OptionKind kind = OptionKind::Call;
    double strike = 0.0;
    double strike_hi = 0.0;
    double ask = 0.0;
};

// Rebalance-date panel of spots plus per-date option asks. Terminal prices
// for period j (trade date j, expiry reference j+1) are the next date's
// closes, matching held-to-expiry exercise against the closing print.
struct MarketDataset {
    std::vector<std::string> dates;    // ascending
    std::vector<std::string> tickers;  // sorted
    Eigen::MatrixXd spots;             // dates x tickers
    std::vector<std::vector<std::vector<PremiumQuote>>> premiums;  // [date][ticker]

    std::size_t periods() const { return dates.empty() ? 0 : dates.size() - 1; }
    int ticker_index(const std::string& name) const;  // -1 if absent

    double spot(std::size_t date, std::size_t ticker) const { return spots(date, ticker); }
    double terminal(std::size_t period, std::size_t ticker) const {
        return spots(period + 1, ticker);
    }

    // Ask for the option with these strikes (relative tolerance 1e-6);
    // throws DataError when absent.
    double premium(std::size_t date, std::size_t ticker, OptionKind kind, double strike_lo,
                   double strike_hi) const;

    // Every template priced at every trade date, all prices positive.
    void validate(const std::vector<OptionTemplate>& templates) const;
};

// prices.csv: date,ticker,close. Full panel required; sorted on load.
MarketDataset load_prices_csv(const std::string& path);

// premiums.csv: date,ticker,kind,strike,strike2,ask (strike2 empty unless
// strangle). Rows for dates/tickers outside the prices panel are skipped.
void load_premiums_csv(const std::string& path, MarketDataset& data);

void write_prices_csv(const std::string& path, const MarketDataset& data);
void write_premiums_csv(const std::string& path, const MarketDataset& data);

// Shortest representation that parses back to the same double.
std::string format_double(double x);

}  // namespace copt
