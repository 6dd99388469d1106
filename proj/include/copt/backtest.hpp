#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copt/dependence.hpp"
#include "copt/fitting.hpp"
#include "copt/market.hpp"
#include "copt/optimizer.hpp"

namespace copt {

struct BacktestConfig {
    int window = 96;  // sampling periods (~8 years of monthly data)
    double alpha = 0.0;
    double delta = 1e-8;  // PSD repair floor; > 0 keeps Lambda invertible
    std::vector<CopulaFamily> families = {CopulaFamily::Clayton, CopulaFamily::Frank,
                                          CopulaFamily::Gumbel};
    double lower = 0.0;  // long-only by default
    double upper = 1.0;
    std::vector<GroupConstraint> groups;
    double risk_free = 0.0;  // per period
    bool fallback_equal_weight = true;
    std::uint64_t seed = 0;
    std::vector<OptionTemplate> templates;

    void validate() const;
};

// Universe ordering is ticker-major: for each ticker (sorted), one option per
// template in config order. Ids are "<ticker>_<template label>".
std::vector<OptionSpec> build_option_universe(const std::vector<std::string>& tickers,
                                              const std::vector<OptionTemplate>& templates,
                                              const std::vector<double>& spots,
                                              const std::vector<MarginalModel>& marginals);

struct RebalanceResult {
    std::vector<OptionSpec> universe;
    Eigen::VectorXd weights;
    Eigen::VectorXd expected_returns;
    bool fallback = false;
    bool repaired = false;
    double frobenius_perturbation = 0.0;
};

// One portfolio selection at rebalance date index `at` (needs at >= window):
// fits pair copulas on the trailing window, builds and repairs Lambda,
// estimates E[R] as the window average of realised option returns, solves
// the box QP. Zero empirical payout probability for any option triggers the
// equal-weight fallback (or DegenerateMatrixError when disabled).
RebalanceResult rebalance(const MarketDataset& data, std::size_t at, const BacktestConfig& cfg);

struct PerformanceStats {
    double mean = 0.0;
    double total = 0.0;  // sum of per-period returns under unit re-capitalisation
    double stddev = 0.0;
    double skewness = 0.0;
    double kurtosis_excess = 0.0;
    double sharpe = 0.0;
    bool sharpe_defined = false;
};

// Mean, total, sample standard deviation, moment skewness, excess kurtosis,
// Sharpe = (mean - rf)/std (undefined rather than infinite when std is 0).
PerformanceStats performance_stats(const std::vector<double>& returns, double rf);

struct PeriodRecord {
    std::string date;  // trade date of the period
    Eigen::VectorXd weights;
    double portfolio_return = 0.0;
    double benchmark_return = 0.0;
    bool fallback = false;
};

struct BacktestReport {
    std::vector<std::string> option_ids;
    std::vector<PeriodRecord> periods;
    PerformanceStats summary;
    PerformanceStats benchmark;
    std::vector<double> pnl;            // cumulative, unit capital per period
    std::vector<double> benchmark_pnl;

    std::vector<double> portfolio_returns() const;
    std::vector<double> benchmark_returns() const;
};

// Rolling out-of-sample run over every period after the first `window`;
// the equal-weight benchmark consumes the identical universe and prices.
BacktestReport run_backtest(const MarketDataset& data, const BacktestConfig& cfg);

}  // namespace copt
