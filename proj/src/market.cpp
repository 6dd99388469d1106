#include "copt/market.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "copt/errors.hpp"

namespace copt {

void OptionTemplate::validate() const {
    if (!std::isfinite(otm)) throw std::invalid_argument("option template: non-finite moneyness");
    if (kind == OptionKind::Strangle && otm <= 0.0) {
        throw std::invalid_argument("option template: strangle needs moneyness > 0");
    }
    if (otm < 0.0 || otm >= 1.0) {
        throw std::invalid_argument("option template: moneyness must be in [0, 1)");
    }
}

std::string OptionTemplate::label() const {
    const char prefix = kind == OptionKind::Call ? 'C' : kind == OptionKind::Put ? 'P' : 'S';
    std::ostringstream out;
    out << prefix << otm * 100.0;
    return out.str();
}

double OptionTemplate::strike_lo(double spot) const {
    switch (kind) {
        case OptionKind::Call: return (1.0 + otm) * spot;
        case OptionKind::Put: return (1.0 - otm) * spot;
        case OptionKind::Strangle: return (1.0 - otm) * spot;
    }
    return 0.0;
}

double OptionTemplate::strike_hi(double spot) const {
    return kind == OptionKind::Strangle ? (1.0 + otm) * spot : 0.0;
}

double option_payout(OptionKind kind, double strike_lo, double strike_hi, double terminal) {
    switch (kind) {
        case OptionKind::Call: return std::max(terminal - strike_lo, 0.0);
        case OptionKind::Put: return std::max(strike_lo - terminal, 0.0);
        case OptionKind::Strangle:
            return std::max(strike_lo - terminal, 0.0) + std::max(terminal - strike_hi, 0.0);
    }
    return 0.0;
}

double option_return(double premium, double payout) {
    if (!(premium > 0.0)) throw std::invalid_argument("option_return: premium must be positive");
    if (payout < 0.0) throw std::invalid_argument("option_return: negative payout");
    if (payout == 0.0) return -1.0;
    return (payout - premium) / premium;
}

int MarketDataset::ticker_index(const std::string& name) const {
    const auto it = std::lower_bound(tickers.begin(), tickers.end(), name);
    if (it == tickers.end() || *it != name) return -1;
    return static_cast<int>(it - tickers.begin());
}

double MarketDataset::premium(std::size_t date, std::size_t ticker, OptionKind kind,
                              double strike_lo, double strike_hi) const {
    const auto close_to = [](double a, double b) {
        return std::abs(a - b) <= 1e-6 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    for (const PremiumQuote& q : premiums.at(date).at(ticker)) {
        if (q.kind != kind || !close_to(q.strike, strike_lo)) continue;
        if (kind == OptionKind::Strangle && !close_to(q.strike_hi, strike_hi)) continue;
        return q.ask;
    }
    throw DataError("missing premium: " + dates.at(date) + " " + tickers.at(ticker) + " " +
                    kind_name(kind) + " strike " + format_double(strike_lo));
}

void MarketDataset::validate(const std::vector<OptionTemplate>& templates) const {
    if (dates.size() < 2) throw DataError("market data needs at least two dates");
    if (spots.rows() != static_cast<Eigen::Index>(dates.size()) ||
        spots.cols() != static_cast<Eigen::Index>(tickers.size())) {
        throw DataError("spot panel shape mismatch");
    }
    if ((spots.array() <= 0.0).any()) throw DataError("non-positive spot price in panel");
    for (std::size_t d = 0; d + 1 < dates.size(); ++d) {
        for (std::size_t k = 0; k < tickers.size(); ++k) {
            for (const OptionTemplate& t : templates) {
                const double s = spot(d, k);
                const double ask = premium(d, k, t.kind, t.strike_lo(s), t.strike_hi(s));
                if (!(ask > 0.0)) {
                    throw DataError("non-positive premium: " + dates[d] + " " + tickers[k] + " " +
                                    t.label());
                }
            }
        }
    }
}

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        std::size_t begin = 0;
        while (begin < field.size() && field[begin] == ' ') ++begin;
        out.push_back(field.substr(begin));
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_number(const std::string& s, const std::string& context) {
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ConfigError("malformed number '" + s + "' in " + context);
    }
    return value;
}

// Maps required column names to their indices; throws naming the first
// missing column.
std::vector<std::size_t> header_indices(const std::vector<std::string>& header,
                                        const std::vector<std::string>& required,
                                        const std::string& path) {
    std::vector<std::size_t> out;
    for (const std::string& name : required) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw ConfigError(path + ": missing column '" + name + "'");
        }
        out.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    return out;
}

}  // namespace

MarketDataset load_prices_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
    const auto cols = header_indices(split_csv_line(line), {"date", "ticker", "close"}, path);

    std::map<std::string, std::map<std::string, double>> panel;  // date -> ticker -> close
    std::set<std::string> ticker_set;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() <= std::max({cols[0], cols[1], cols[2]})) {
            throw ConfigError(path + ": short row '" + line + "'");
        }
        const std::string& date = fields[cols[0]];
        const std::string& ticker = fields[cols[1]];
        const double close = parse_number(fields[cols[2]], path);
        panel[date][ticker] = close;
        ticker_set.insert(ticker);
    }
    if (panel.empty()) throw ConfigError(path + ": no data rows");

    MarketDataset data;
    for (const auto& [date, row] : panel) data.dates.push_back(date);
    data.tickers.assign(ticker_set.begin(), ticker_set.end());
    data.spots.resize(static_cast<Eigen::Index>(data.dates.size()),
                      static_cast<Eigen::Index>(data.tickers.size()));
    for (std::size_t d = 0; d < data.dates.size(); ++d) {
        const auto& row = panel[data.dates[d]];
        for (std::size_t k = 0; k < data.tickers.size(); ++k) {
            const auto it = row.find(data.tickers[k]);
            if (it == row.end()) {
                throw DataError(path + ": missing close for " + data.tickers[k] + " on " +
                                data.dates[d]);
            }
            if (!(it->second > 0.0)) {
                throw DataError(path + ": non-positive close for " + data.tickers[k] + " on " +
                                data.dates[d]);
            }
            data.spots(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) = it->second;
        }
    }
    data.premiums.assign(data.dates.size(), std::vector<std::vector<PremiumQuote>>(
                                                data.tickers.size()));
    return data;
}

void load_premiums_csv(const std::string& path, MarketDataset& data) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
    const auto cols = header_indices(split_csv_line(line),
                                     {"date", "ticker", "kind", "strike", "strike2", "ask"}, path);

    std::map<std::string, std::size_t> date_index;
    for (std::size_t d = 0; d < data.dates.size(); ++d) date_index[data.dates[d]] = d;

    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        std::size_t max_col = 0;
        for (std::size_t c : cols) max_col = std::max(max_col, c);
        if (fields.size() <= max_col) throw ConfigError(path + ": short row '" + line + "'");

        const auto dit = date_index.find(fields[cols[0]]);
        if (dit == date_index.end()) continue;
        const int ticker = data.ticker_index(fields[cols[1]]);
        if (ticker < 0) continue;
        const auto kind = kind_from_name(fields[cols[2]]);
        if (!kind) throw ConfigError(path + ": unknown option kind '" + fields[cols[2]] + "'");

        PremiumQuote q;
        q.kind = *kind;
        q.strike = parse_number(fields[cols[3]], path);
        q.strike_hi = fields[cols[4]].empty() ? 0.0 : parse_number(fields[cols[4]], path);
        q.ask = parse_number(fields[cols[5]], path);
        if (q.kind == OptionKind::Strangle && q.strike_hi <= q.strike) {
            throw ConfigError(path + ": strangle strikes out of order in '" + line + "'");
        }
        data.premiums[dit->second][static_cast<std::size_t>(ticker)].push_back(q);
    }
}

void write_prices_csv(const std::string& path, const MarketDataset& data) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "date,ticker,close\n";
    for (std::size_t d = 0; d < data.dates.size(); ++d) {
        for (std::size_t k = 0; k < data.tickers.size(); ++k) {
            out << data.dates[d] << ',' << data.tickers[k] << ','
                << format_double(data.spots(static_cast<Eigen::Index>(d),
                                            static_cast<Eigen::Index>(k)))
                << '\n';
        }
    }
}

void write_premiums_csv(const std::string& path, const MarketDataset& data) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "date,ticker,kind,strike,strike2,ask\n";
    for (std::size_t d = 0; d < data.dates.size(); ++d) {
        for (std::size_t k = 0; k < data.tickers.size(); ++k) {
            for (const PremiumQuote& q : data.premiums[d][k]) {
                out << data.dates[d] << ',' << data.tickers[k] << ',' << kind_name(q.kind) << ','
                    << format_double(q.strike) << ',';
                if (q.kind == OptionKind::Strangle) out << format_double(q.strike_hi);
                out << ',' << format_double(q.ask) << '\n';
            }
        }
    }
}

}  // namespace copt
