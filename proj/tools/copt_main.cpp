// copt: copula-dependency options portfolio toolkit
//
// Subcommands: fit, depmatrix, optimize, backtest, synth.
// Exit codes: 0 ok, 2 config/IO error, 3 fit failure, 4 infeasible problem,
// 5 degenerate dependency matrix without fallback.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "copt/backtest.hpp"
#include "copt/errors.hpp"
#include "copt/psd_repair.hpp"
#include "copt/serialize.hpp"
#include "copt/synth.hpp"

namespace fs = std::filesystem;
using copt::Json;

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(s);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

std::vector<double> period_returns(const copt::MarketDataset& data, int ticker) {
    std::vector<double> r;
    r.reserve(data.periods());
    for (std::size_t j = 0; j < data.periods(); ++j) {
        r.push_back(data.terminal(j, static_cast<std::size_t>(ticker)) /
                        data.spot(j, static_cast<std::size_t>(ticker)) -
                    1.0);
    }
    return r;
}

int cmd_fit(const std::string& prices, const std::string& pair_arg,
            const std::string& families_arg, const std::string& out) {
    const auto pair = split_list(pair_arg);
    if (pair.size() != 2) throw copt::ConfigError("--pair expects two tickers, e.g. AAPL,MSFT");

    std::vector<copt::CopulaFamily> families;
    for (const std::string& name : split_list(families_arg)) {
        const auto f = copt::family_from_name(name);
        if (!f) throw copt::ConfigError("unknown copula family '" + name + "'");
        families.push_back(*f);
    }

    const copt::MarketDataset data = copt::load_prices_csv(prices);
    const int a = data.ticker_index(pair[0]);
    const int b = data.ticker_index(pair[1]);
    if (a < 0 || b < 0) {
        throw copt::ConfigError("ticker not in " + prices + ": " + (a < 0 ? pair[0] : pair[1]));
    }
    if (data.periods() < 2) {
        throw copt::FitError("insufficient data: need at least 3 price rows per ticker");
    }
    const copt::PseudoObservations obs =
        copt::pseudo_observations(period_returns(data, a), period_returns(data, b));

    Json jf;
    std::optional<copt::FittedCopula> selected;
    for (copt::CopulaFamily family : families) {
        try {
            const copt::FittedCopula fit = copt::fit_semiparametric(obs, family);
            jf[copt::family_name(family)] = Json{
                {"theta", fit.param.theta}, {"loglik", fit.loglik}, {"l2_distance", fit.l2}};
            const bool better = !selected || fit.l2 < selected->l2 ||
                                (fit.l2 == selected->l2 && fit.loglik > selected->loglik);
            if (better) selected = fit;
        } catch (const copt::FitError& e) {
            jf[copt::family_name(family)] = Json{{"error", e.what()}};
        }
    }
    if (!selected) {
        throw copt::FitError("every family failed for pair (" + pair[0] + ", " + pair[1] + ")");
    }

    Json j;
    j["pair"] = pair;
    j["families"] = std::move(jf);
    j["selected"] = copt::family_name(selected->param.family);
    copt::write_json_file(out, j);
    return 0;
}

int cmd_depmatrix(const std::string& config_path, const std::string& out_dir) {
    const copt::DepMatrixJob job = copt::depmatrix_job_from_json(copt::load_json_file(config_path));
    const copt::MarketDataset data = copt::load_prices_csv(job.prices_path);
    const auto window = static_cast<std::size_t>(job.window);
    if (data.periods() < window) {
        throw copt::DataError("depmatrix needs at least " + std::to_string(window + 1) +
                              " price dates");
    }
    const std::size_t at = data.periods();  // strike off the last date

    const std::size_t n_tickers = data.tickers.size();
    std::vector<std::vector<double>> returns(n_tickers);
    std::vector<double> spots(n_tickers);
    std::vector<copt::MarginalModel> marginals;
    for (std::size_t k = 0; k < n_tickers; ++k) {
        spots[k] = data.spot(at, k);
        std::vector<double> samples;
        for (std::size_t j = at - window; j < at; ++j) {
            const double r = data.terminal(j, k) / data.spot(j, k) - 1.0;
            returns[k].push_back(r);
            samples.push_back(spots[k] * (1.0 + r));
        }
        marginals.emplace_back(std::move(samples));
    }

    const std::vector<copt::OptionSpec> universe =
        copt::build_option_universe(data.tickers, job.templates, spots, marginals);

    copt::CopulaMap copulas;
    for (std::size_t a = 0; a < n_tickers; ++a) {
        for (std::size_t b = a + 1; b < n_tickers; ++b) {
            const copt::FittedCopula fit =
                copt::select_copula(copt::pseudo_observations(returns[a], returns[b]),
                                    job.families, {data.tickers[a], data.tickers[b]});
            copulas[{data.tickers[a], data.tickers[b]}] = fit.param;
        }
    }

    copt::DependencyMatrix dep = copt::dependency_matrix(universe, copulas);
    if (dep.degenerate()) {
        std::string ids;
        for (const std::string& id : dep.degenerate_ids) ids += (ids.empty() ? "" : ", ") + id;
        throw copt::DegenerateMatrixError("zero payout probability for: " + ids);
    }
    const copt::PsdRepair repair = copt::repair_psd(dep.values, job.delta);
    dep.values = repair.repaired;
    dep.repaired = repair.changed;
    dep.frobenius_perturbation = repair.frobenius;

    fs::create_directories(out_dir);
    copt::write_json_file((fs::path(out_dir) / "depmatrix.json").string(),
                          copt::depmatrix_to_json(dep));
    copt::write_text_file((fs::path(out_dir) / "depmatrix.csv").string(),
                          copt::depmatrix_to_csv(dep));
    return 0;
}

int cmd_optimize(const std::string& config_path, const std::string& out_path) {
    const copt::QpProblem problem = copt::qp_problem_from_json(copt::load_json_file(config_path));
    const copt::PortfolioWeights w = copt::solve_box_qp(problem);
    copt::write_json_file(out_path, copt::weights_to_json(w, problem));
    return 0;
}

int cmd_backtest(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
    copt::BacktestJob job = copt::backtest_job_from_json(copt::load_json_file(config_path));
    if (seed) job.config.seed = *seed;
    copt::MarketDataset data = copt::load_prices_csv(job.prices_path);
    copt::load_premiums_csv(job.premiums_path, data);
    const copt::BacktestReport report = copt::run_backtest(data, job.config);

    fs::create_directories(out_dir);
    copt::write_json_file((fs::path(out_dir) / "report.json").string(),
                          copt::report_to_json(report));
    copt::write_text_file((fs::path(out_dir) / "pnl.csv").string(), copt::pnl_to_csv(report));
    copt::write_text_file((fs::path(out_dir) / "weights.csv").string(),
                          copt::weights_history_csv(report));
    return 0;
}

int cmd_synth(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed) {
    const copt::SynthConfig cfg = copt::synth_config_from_json(copt::load_json_file(config_path));
    const copt::MarketDataset data = copt::synth_market(cfg, seed ? *seed : cfg.seed);
    fs::create_directories(out_dir);
    copt::write_prices_csv((fs::path(out_dir) / "prices.csv").string(), data);
    copt::write_premiums_csv((fs::path(out_dir) / "premiums.csv").string(), data);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"copula-dependency options portfolio toolkit"};
    app.require_subcommand(1);

    std::string config, out, prices, pair;
    std::string families = "clayton,frank,gumbel";
    std::optional<std::uint64_t> seed;

    CLI::App* fit = app.add_subcommand("fit", "fit pair copulas to a prices CSV");
    fit->add_option("--prices", prices, "prices.csv path")->required();
    fit->add_option("--pair", pair, "two tickers, comma separated")->required();
    fit->add_option("--families", families, "candidate families, comma separated");
    fit->add_option("--out", out, "output JSON path")->required();

    CLI::App* dep = app.add_subcommand("depmatrix", "dependency matrix from a prices CSV");
    dep->add_option("--config", config, "config JSON path")->required();
    dep->add_option("--out", out, "output directory")->required();

    CLI::App* opt = app.add_subcommand("optimize", "solve a box-constrained problem JSON");
    opt->add_option("--config", config, "problem JSON path")->required();
    opt->add_option("--out", out, "output JSON path")->required();

    CLI::App* bt = app.add_subcommand("backtest", "rolling out-of-sample backtest");
    bt->add_option("--config", config, "config JSON path")->required();
    bt->add_option("--out", out, "output directory")->required();
    bt->add_option("--seed", seed, "override config seed");

    CLI::App* sy = app.add_subcommand("synth", "generate a synthetic market");
    sy->add_option("--config", config, "config JSON path")->required();
    sy->add_option("--out", out, "output directory")->required();
    sy->add_option("--seed", seed, "override config seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit->parsed()) return cmd_fit(prices, pair, families, out);
        if (dep->parsed()) return cmd_depmatrix(config, out);
        if (opt->parsed()) return cmd_optimize(config, out);
        if (bt->parsed()) return cmd_backtest(config, out, seed);
        if (sy->parsed()) return cmd_synth(config, out, seed);
    } catch (const copt::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const copt::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const copt::FitError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const copt::InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const copt::DegenerateMatrixError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
