#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "copt/backtest.hpp"
#include "copt/dependence.hpp"
#include "copt/optimizer.hpp"
#include "copt/synth.hpp"

namespace copt {

// Insertion-ordered JSON keeps output key order fixed run to run.
using Json = nlohmann::ordered_json;

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);
void write_text_file(const std::string& path, const std::string& content);

// Throws ConfigError when `j` holds a key outside `allowed`.
void check_keys(const Json& j, const std::vector<std::string>& allowed,
                const std::string& context);

std::vector<OptionTemplate> templates_from_json(const Json& j);
Json templates_to_json(const std::vector<OptionTemplate>& templates);

// Dependency matrices round-trip bit-exactly through both formats.
Json depmatrix_to_json(const DependencyMatrix& dep);
DependencyMatrix depmatrix_from_json(const Json& j);
std::string depmatrix_to_csv(const DependencyMatrix& dep);
DependencyMatrix depmatrix_from_csv(const std::string& text);

QpProblem qp_problem_from_json(const Json& j);
Json qp_problem_to_json(const QpProblem& p);
Json weights_to_json(const PortfolioWeights& w, const QpProblem& p);

struct BacktestJob {
    std::string prices_path;
    std::string premiums_path;
    BacktestConfig config;
};
BacktestJob backtest_job_from_json(const Json& j);

struct DepMatrixJob {
    std::string prices_path;
    int window = 96;
    double delta = 1e-8;
    std::vector<CopulaFamily> families = {CopulaFamily::Clayton, CopulaFamily::Frank,
                                          CopulaFamily::Gumbel};
    std::vector<OptionTemplate> templates;
};
DepMatrixJob depmatrix_job_from_json(const Json& j);

SynthConfig synth_config_from_json(const Json& j);

Json report_to_json(const BacktestReport& report);
std::string pnl_to_csv(const BacktestReport& report);
std::string weights_history_csv(const BacktestReport& report);

}  // namespace copt
