#include "copt/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "copt/errors.hpp"
#include "copt/psd_repair.hpp"

namespace copt {

void BacktestConfig::validate() const {
    if (window < 12) throw ConfigError("backtest: window must be >= 12 periods");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("backtest: alpha must be finite and >= 0");
    }
    if (!(delta >= 0.0)) throw ConfigError("backtest: delta must be >= 0");
    if (families.empty()) throw ConfigError("backtest: no copula families");
    for (CopulaFamily f : families) {
        if (f == CopulaFamily::Independence || f == CopulaFamily::Comonotone) {
            throw ConfigError("backtest: " + family_name(f) + " cannot be fitted");
        }
    }
    if (templates.empty()) throw ConfigError("backtest: no option templates");
    for (const OptionTemplate& t : templates) t.validate();
    if (!(lower <= upper)) throw ConfigError("backtest: lower bound above upper bound");
}

std::vector<OptionSpec> build_option_universe(const std::vector<std::string>& tickers,
                                              const std::vector<OptionTemplate>& templates,
                                              const std::vector<double>& spots,
                                              const std::vector<MarginalModel>& marginals) {
    if (tickers.size() != spots.size() || tickers.size() != marginals.size()) {
        throw std::invalid_argument("build_option_universe: input size mismatch");
    }
    std::vector<OptionSpec> universe;
    universe.reserve(tickers.size() * templates.size());
    for (std::size_t k = 0; k < tickers.size(); ++k) {
        if (!(spots[k] > 0.0)) {
            throw std::invalid_argument("build_option_universe: non-positive spot for " +
                                        tickers[k]);
        }
        const MarginalModel& marginal = marginals[k];
        for (const OptionTemplate& t : templates) {
            t.validate();
            OptionSpec opt;
            opt.id = tickers[k] + "_" + t.label();
            opt.underlier = tickers[k];
            opt.kind = t.kind;
            opt.strike = t.strike_lo(spots[k]);
            opt.q_lo = marginal.cdf(opt.strike);
            switch (t.kind) {
                case OptionKind::Call:
                    opt.support_count =
                        static_cast<int>(marginal.count_strictly_above(opt.strike));
                    break;
                case OptionKind::Put:
                    opt.support_count =
                        static_cast<int>(marginal.count_strictly_below(opt.strike));
                    break;
                case OptionKind::Strangle:
                    opt.strike_hi = t.strike_hi(spots[k]);
                    opt.q_hi = marginal.cdf(opt.strike_hi);
                    opt.support_count =
                        static_cast<int>(marginal.count_strictly_below(opt.strike) +
                                         marginal.count_strictly_above(opt.strike_hi));
                    break;
            }
            opt.validate();
            universe.push_back(std::move(opt));
        }
    }
    return universe;
}

namespace {

Eigen::VectorXd equal_weights(Eigen::Index n) {
    return Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
}

}  // namespace

RebalanceResult rebalance(const MarketDataset& data, std::size_t at, const BacktestConfig& cfg) {
    cfg.validate();
    const std::size_t window = static_cast<std::size_t>(cfg.window);
    if (at < window || at >= data.dates.size()) {
        throw DataError("rebalance: window of " + std::to_string(cfg.window) +
                        " periods does not fit before date index " + std::to_string(at));
    }
    const std::size_t n_tickers = data.tickers.size();

    // Trailing-window simple returns, one row per period.
    std::vector<std::vector<double>> returns(n_tickers, std::vector<double>(window));
    for (std::size_t k = 0; k < n_tickers; ++k) {
        for (std::size_t j = 0; j < window; ++j) {
            const std::size_t period = at - window + j;
            returns[k][j] = data.terminal(period, k) / data.spot(period, k) - 1.0;
        }
    }

    // Terminal-value samples scaled onto the current spot.
    std::vector<double> spots_now(n_tickers);
    std::vector<MarginalModel> marginals;
    marginals.reserve(n_tickers);
    for (std::size_t k = 0; k < n_tickers; ++k) {
        spots_now[k] = data.spot(at, k);
        std::vector<double> samples(window);
        for (std::size_t j = 0; j < window; ++j) samples[j] = spots_now[k] * (1.0 + returns[k][j]);
        marginals.emplace_back(std::move(samples));
    }

    RebalanceResult result;
    result.universe = build_option_universe(data.tickers, cfg.templates, spots_now, marginals);
    const auto n = static_cast<Eigen::Index>(result.universe.size());

    // Window-average realised option returns, re-struck off each period's spot.
    result.expected_returns = Eigen::VectorXd::Zero(n);
    {
        Eigen::Index idx = 0;
        for (std::size_t k = 0; k < n_tickers; ++k) {
            for (const OptionTemplate& t : cfg.templates) {
                double sum = 0.0;
                for (std::size_t j = 0; j < window; ++j) {
                    const std::size_t period = at - window + j;
                    const double s = data.spot(period, k);
                    const double ask =
                        data.premium(period, k, t.kind, t.strike_lo(s), t.strike_hi(s));
                    const double payout =
                        option_payout(t.kind, t.strike_lo(s), t.strike_hi(s),
                                      data.terminal(period, k));
                    sum += option_return(ask, payout);
                }
                result.expected_returns[idx++] = sum / static_cast<double>(window);
            }
        }
    }

    // Zero empirical payout probability anywhere makes Lambda undefined.
    std::vector<std::string> dead;
    for (const OptionSpec& opt : result.universe) {
        if (opt.support_count == 0) dead.push_back(opt.id);
    }
    if (!dead.empty()) {
        if (!cfg.fallback_equal_weight) {
            std::string ids;
            for (const std::string& id : dead) ids += (ids.empty() ? "" : ", ") + id;
            throw DegenerateMatrixError("zero payout probability for: " + ids);
        }
        result.weights = equal_weights(n);
        result.fallback = true;
        return result;
    }

    CopulaMap copulas;
    for (std::size_t a = 0; a < n_tickers; ++a) {
        for (std::size_t b = a + 1; b < n_tickers; ++b) {
            const PseudoObservations obs = pseudo_observations(returns[a], returns[b]);
            const FittedCopula fit =
                select_copula(obs, cfg.families, {data.tickers[a], data.tickers[b]});
            copulas[{data.tickers[a], data.tickers[b]}] = fit.param;
        }
    }

    DependencyMatrix dep = dependency_matrix(result.universe, copulas);
    if (dep.degenerate()) {
        if (!cfg.fallback_equal_weight) {
            std::string ids;
            for (const std::string& id : dep.degenerate_ids) ids += (ids.empty() ? "" : ", ") + id;
            throw DegenerateMatrixError("zero payout probability for: " + ids);
        }
        result.weights = equal_weights(n);
        result.fallback = true;
        return result;
    }

    const PsdRepair repair = repair_psd(dep.values, cfg.delta);
    result.repaired = repair.changed;
    result.frobenius_perturbation = repair.frobenius;

    QpProblem problem;
    problem.expected_returns = result.expected_returns;
    problem.lambda = repair.repaired;
    problem.alpha = cfg.alpha;
    problem.lower = Eigen::VectorXd::Constant(n, cfg.lower);
    problem.upper = Eigen::VectorXd::Constant(n, cfg.upper);
    problem.groups = cfg.groups;
    result.weights = solve_box_qp(problem).weights;
    return result;
}

PerformanceStats performance_stats(const std::vector<double>& returns, double rf) {
    const std::size_t n = returns.size();
    if (n < 2) throw std::invalid_argument("performance_stats: need at least 2 returns");
    PerformanceStats out;
    out.total = std::accumulate(returns.begin(), returns.end(), 0.0);
    out.mean = out.total / static_cast<double>(n);
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double r : returns) {
        const double d = r - out.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    out.stddev = std::sqrt(m2 / static_cast<double>(n - 1));
    m2 /= static_cast<double>(n);
    m3 /= static_cast<double>(n);
    m4 /= static_cast<double>(n);
    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.kurtosis_excess = m4 / (m2 * m2) - 3.0;
    }
    if (out.stddev > 0.0) {
        out.sharpe = (out.mean - rf) / out.stddev;
        out.sharpe_defined = true;
    }
    return out;
}

std::vector<double> BacktestReport::portfolio_returns() const {
    std::vector<double> out;
    out.reserve(periods.size());
    for (const PeriodRecord& p : periods) out.push_back(p.portfolio_return);
    return out;
}

std::vector<double> BacktestReport::benchmark_returns() const {
    std::vector<double> out;
    out.reserve(periods.size());
    for (const PeriodRecord& p : periods) out.push_back(p.benchmark_return);
    return out;
}

BacktestReport run_backtest(const MarketDataset& data, const BacktestConfig& cfg) {
    cfg.validate();
    data.validate(cfg.templates);
    const std::size_t window = static_cast<std::size_t>(cfg.window);
    if (data.periods() < window + 1) {
        throw DataError("backtest needs at least window + 1 = " + std::to_string(window + 1) +
                        " periods, data has " + std::to_string(data.periods()));
    }

    BacktestReport report;
    const std::size_t n_tickers = data.tickers.size();
    for (const std::string& ticker : data.tickers) {
        for (const OptionTemplate& t : cfg.templates) {
            report.option_ids.push_back(ticker + "_" + t.label());
        }
    }
    const auto n = static_cast<Eigen::Index>(report.option_ids.size());

    double pnl = 0.0, bench_pnl = 0.0;
    for (std::size_t at = window; at < data.periods(); ++at) {
        RebalanceResult reb = rebalance(data, at, cfg);

        Eigen::VectorXd realised(n);
        Eigen::Index idx = 0;
        for (std::size_t k = 0; k < n_tickers; ++k) {
            const double s = data.spot(at, k);
            for (const OptionTemplate& t : cfg.templates) {
                const double ask = data.premium(at, k, t.kind, t.strike_lo(s), t.strike_hi(s));
                const double payout =
                    option_payout(t.kind, t.strike_lo(s), t.strike_hi(s), data.terminal(at, k));
                realised[idx++] = option_return(ask, payout);
            }
        }

        PeriodRecord rec;
        rec.date = data.dates[at];
        rec.weights = reb.weights;
        rec.fallback = reb.fallback;
        rec.portfolio_return = reb.weights.dot(realised);
        rec.benchmark_return = realised.mean();
        pnl += rec.portfolio_return;
        bench_pnl += rec.benchmark_return;
        report.pnl.push_back(pnl);
        report.benchmark_pnl.push_back(bench_pnl);
        report.periods.push_back(std::move(rec));
    }

    if (report.periods.size() >= 2) {
        report.summary = performance_stats(report.portfolio_returns(), cfg.risk_free);
        report.benchmark = performance_stats(report.benchmark_returns(), cfg.risk_free);
    }
    return report;
}

}  // namespace copt
