#include "copt/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "copt/errors.hpp"

namespace copt {

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

void check_keys(const Json& j, const std::vector<std::string>& allowed,
                const std::string& context) {
    if (!j.is_object()) throw ConfigError(context + ": expected a JSON object");
    for (const auto& item : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw ConfigError(context + ": unknown key '" + item.key() + "'");
        }
    }
}

namespace {

double get_number(const Json& j, const std::string& key, const std::string& context) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ConfigError(context + ": missing numeric key '" + key + "'");
    }
    return j.at(key).get<double>();
}

CopulaFamily parse_family(const std::string& name, const std::string& context) {
    const auto f = family_from_name(name);
    if (!f) throw ConfigError(context + ": unknown copula family '" + name + "'");
    return *f;
}

std::vector<CopulaFamily> families_from_json(const Json& j, const std::string& context) {
    std::vector<CopulaFamily> out;
    for (const auto& name : j) out.push_back(parse_family(name.get<std::string>(), context));
    return out;
}

std::vector<GroupConstraint> groups_from_json(const Json& j, const std::string& context) {
    std::vector<GroupConstraint> out;
    for (const auto& g : j) {
        check_keys(g, {"indices", "target"}, context + ".groups");
        GroupConstraint gc;
        for (const auto& idx : g.at("indices")) gc.indices.push_back(idx.get<int>());
        gc.target = get_number(g, "target", context + ".groups");
        out.push_back(std::move(gc));
    }
    return out;
}

Eigen::VectorXd vector_from_json(const Json& j, const std::string& context) {
    if (!j.is_array()) throw ConfigError(context + ": expected an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& x : j) v[i++] = x.get<double>();
    return v;
}

Json vector_to_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const std::string& context) {
    if (!j.is_array() || j.empty()) throw ConfigError(context + ": expected a matrix");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols) {
            throw ConfigError(context + ": ragged matrix");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
        }
    }
    return m;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

Json stats_to_json(const PerformanceStats& s) {
    Json out;
    out["total_return"] = s.total;
    out["avg_monthly_return"] = s.mean;
    out["kurtosis_excess"] = s.kurtosis_excess;
    out["skew"] = s.skewness;
    if (s.sharpe_defined) {
        out["sharpe"] = s.sharpe;
    } else {
        out["sharpe"] = nullptr;
    }
    return out;
}

}  // namespace

std::vector<OptionTemplate> templates_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("templates: expected a non-empty array");
    std::vector<OptionTemplate> out;
    for (const auto& t : j) {
        check_keys(t, {"kind", "otm"}, "templates");
        OptionTemplate tpl;
        const auto kind = kind_from_name(t.at("kind").get<std::string>());
        if (!kind) {
            throw ConfigError("templates: unknown kind '" + t.at("kind").get<std::string>() + "'");
        }
        tpl.kind = *kind;
        tpl.otm = get_number(t, "otm", "templates");
        tpl.validate();
        out.push_back(tpl);
    }
    return out;
}

Json templates_to_json(const std::vector<OptionTemplate>& templates) {
    Json out = Json::array();
    for (const OptionTemplate& t : templates) {
        out.push_back(Json{{"kind", kind_name(t.kind)}, {"otm", t.otm}});
    }
    return out;
}

Json depmatrix_to_json(const DependencyMatrix& dep) {
    Json options = Json::array();
    for (const OptionSpec& o : dep.options) {
        Json jo;
        jo["id"] = o.id;
        jo["underlier"] = o.underlier;
        jo["kind"] = kind_name(o.kind);
        jo["strike"] = o.strike;
        jo["strike_hi"] = o.strike_hi;
        jo["q_lo"] = o.q_lo;
        jo["q_hi"] = o.q_hi;
        options.push_back(std::move(jo));
    }
    Json out;
    out["options"] = std::move(options);
    out["payout_probs"] = vector_to_json(dep.payout_probs);
    out["values"] = matrix_to_json(dep.values);
    out["repaired"] = dep.repaired;
    out["frobenius_perturbation"] = dep.frobenius_perturbation;
    out["degenerate_ids"] = dep.degenerate_ids;
    return out;
}

DependencyMatrix depmatrix_from_json(const Json& j) {
    check_keys(j, {"options", "payout_probs", "values", "repaired", "frobenius_perturbation",
                   "degenerate_ids"},
               "depmatrix");
    DependencyMatrix dep;
    for (const auto& jo : j.at("options")) {
        OptionSpec o;
        o.id = jo.at("id").get<std::string>();
        o.underlier = jo.at("underlier").get<std::string>();
        const auto kind = kind_from_name(jo.at("kind").get<std::string>());
        if (!kind) throw ConfigError("depmatrix: unknown option kind");
        o.kind = *kind;
        o.strike = jo.at("strike").get<double>();
        o.strike_hi = jo.at("strike_hi").get<double>();
        o.q_lo = jo.at("q_lo").get<double>();
        o.q_hi = jo.at("q_hi").get<double>();
        dep.options.push_back(std::move(o));
    }
    dep.payout_probs = vector_from_json(j.at("payout_probs"), "depmatrix.payout_probs");
    dep.values = matrix_from_json(j.at("values"), "depmatrix.values");
    dep.repaired = j.at("repaired").get<bool>();
    dep.frobenius_perturbation = j.at("frobenius_perturbation").get<double>();
    dep.degenerate_ids = j.at("degenerate_ids").get<std::vector<std::string>>();
    return dep;
}

std::string depmatrix_to_csv(const DependencyMatrix& dep) {
    std::ostringstream out;
    out << "id";
    for (const OptionSpec& o : dep.options) out << ',' << o.id;
    out << '\n';
    for (Eigen::Index i = 0; i < dep.values.rows(); ++i) {
        out << dep.options[static_cast<std::size_t>(i)].id;
        for (Eigen::Index c = 0; c < dep.values.cols(); ++c) {
            out << ',' << format_double(dep.values(i, c));
        }
        out << '\n';
    }
    return out.str();
}

DependencyMatrix depmatrix_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("depmatrix csv: empty");
    std::vector<std::string> ids;
    {
        std::istringstream hs(line);
        std::string field;
        bool first = true;
        while (std::getline(hs, field, ',')) {
            if (!field.empty() && field.back() == '\r') field.pop_back();
            if (first) {
                first = false;
                continue;
            }
            ids.push_back(field);
        }
    }
    const auto n = static_cast<Eigen::Index>(ids.size());
    DependencyMatrix dep;
    dep.values.resize(n, n);
    dep.payout_probs = Eigen::VectorXd::Zero(n);
    for (const std::string& id : ids) {
        OptionSpec o;
        o.id = id;
        dep.options.push_back(std::move(o));
    }
    Eigen::Index row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        if (row >= n) throw ConfigError("depmatrix csv: too many rows");
        std::istringstream ls(line);
        std::string field;
        std::getline(ls, field, ',');  // row id
        for (Eigen::Index c = 0; c < n; ++c) {
            if (!std::getline(ls, field, ',')) throw ConfigError("depmatrix csv: short row");
            if (!field.empty() && field.back() == '\r') field.pop_back();
            dep.values(row, c) = std::stod(field);
        }
        ++row;
    }
    if (row != n) throw ConfigError("depmatrix csv: row count mismatch");
    return dep;
}

QpProblem qp_problem_from_json(const Json& j) {
    check_keys(j, {"expected_returns", "lambda", "alpha", "lower", "upper", "groups"},
               "qp problem");
    QpProblem p;
    p.expected_returns = vector_from_json(j.at("expected_returns"), "expected_returns");
    p.lambda = matrix_from_json(j.at("lambda"), "lambda");
    p.alpha = get_number(j, "alpha", "qp problem");
    const auto n = p.expected_returns.size();
    const auto bound = [&](const char* key, double fallback) {
        if (!j.contains(key)) return Eigen::VectorXd::Constant(n, fallback).eval();
        if (j.at(key).is_number()) {
            return Eigen::VectorXd::Constant(n, j.at(key).get<double>()).eval();
        }
        return vector_from_json(j.at(key), key);
    };
    p.lower = bound("lower", 0.0);
    p.upper = bound("upper", 1.0);
    if (j.contains("groups")) p.groups = groups_from_json(j.at("groups"), "qp problem");
    return p;
}

Json qp_problem_to_json(const QpProblem& p) {
    Json out;
    out["expected_returns"] = vector_to_json(p.expected_returns);
    out["lambda"] = matrix_to_json(p.lambda);
    out["alpha"] = p.alpha;
    out["lower"] = vector_to_json(p.lower);
    out["upper"] = vector_to_json(p.upper);
    Json groups = Json::array();
    for (const GroupConstraint& g : p.groups) {
        groups.push_back(Json{{"indices", g.indices}, {"target", g.target}});
    }
    out["groups"] = std::move(groups);
    return out;
}

Json weights_to_json(const PortfolioWeights& w, const QpProblem& p) {
    Json out;
    out["weights"] = vector_to_json(w.weights);
    out["gamma"] = w.gamma;
    out["kkt_residual"] = w.kkt_residual;
    out["objective"] = qp_objective(p, w.weights);
    return out;
}

BacktestJob backtest_job_from_json(const Json& j) {
    check_keys(j,
               {"prices", "premiums", "window", "alpha", "delta", "families", "lower", "upper",
                "groups", "risk_free", "fallback_equal_weight", "seed", "templates"},
               "backtest config");
    BacktestJob job;
    if (!j.contains("prices") || !j.contains("premiums")) {
        throw ConfigError("backtest config: needs 'prices' and 'premiums' paths");
    }
    job.prices_path = j.at("prices").get<std::string>();
    job.premiums_path = j.at("premiums").get<std::string>();
    BacktestConfig& cfg = job.config;
    if (j.contains("window")) cfg.window = j.at("window").get<int>();
    if (j.contains("alpha")) cfg.alpha = get_number(j, "alpha", "backtest config");
    if (j.contains("delta")) cfg.delta = get_number(j, "delta", "backtest config");
    if (j.contains("families")) cfg.families = families_from_json(j.at("families"), "families");
    if (j.contains("lower")) cfg.lower = get_number(j, "lower", "backtest config");
    if (j.contains("upper")) cfg.upper = get_number(j, "upper", "backtest config");
    if (j.contains("groups")) cfg.groups = groups_from_json(j.at("groups"), "backtest config");
    if (j.contains("risk_free")) cfg.risk_free = get_number(j, "risk_free", "backtest config");
    if (j.contains("fallback_equal_weight")) {
        cfg.fallback_equal_weight = j.at("fallback_equal_weight").get<bool>();
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (!j.contains("templates")) throw ConfigError("backtest config: needs 'templates'");
    cfg.templates = templates_from_json(j.at("templates"));
    cfg.validate();
    return job;
}

DepMatrixJob depmatrix_job_from_json(const Json& j) {
    check_keys(j, {"prices", "window", "delta", "families", "templates"}, "depmatrix config");
    DepMatrixJob job;
    if (!j.contains("prices")) throw ConfigError("depmatrix config: needs 'prices'");
    job.prices_path = j.at("prices").get<std::string>();
    if (j.contains("window")) job.window = j.at("window").get<int>();
    if (j.contains("delta")) job.delta = get_number(j, "delta", "depmatrix config");
    if (j.contains("families")) job.families = families_from_json(j.at("families"), "families");
    if (!j.contains("templates")) throw ConfigError("depmatrix config: needs 'templates'");
    job.templates = templates_from_json(j.at("templates"));
    return job;
}

SynthConfig synth_config_from_json(const Json& j) {
    check_keys(j,
               {"underliers", "templates", "periods", "period_days", "rate", "spread", "copula",
                "start_date", "seed"},
               "synth config");
    SynthConfig cfg;
    if (!j.contains("underliers")) throw ConfigError("synth config: needs 'underliers'");
    for (const auto& ju : j.at("underliers")) {
        check_keys(ju, {"ticker", "spot", "drift", "vol"}, "synth underlier");
        SynthUnderlier u;
        u.ticker = ju.at("ticker").get<std::string>();
        if (ju.contains("spot")) u.spot = get_number(ju, "spot", "synth underlier");
        if (ju.contains("drift")) u.drift = get_number(ju, "drift", "synth underlier");
        if (ju.contains("vol")) u.vol = get_number(ju, "vol", "synth underlier");
        cfg.underliers.push_back(std::move(u));
    }
    if (!j.contains("templates")) throw ConfigError("synth config: needs 'templates'");
    cfg.templates = templates_from_json(j.at("templates"));
    if (j.contains("periods")) cfg.periods = j.at("periods").get<int>();
    if (j.contains("period_days")) cfg.period_days = j.at("period_days").get<int>();
    if (j.contains("rate")) cfg.rate = get_number(j, "rate", "synth config");
    if (j.contains("spread")) cfg.spread = get_number(j, "spread", "synth config");
    if (j.contains("copula")) {
        const auto& jc = j.at("copula");
        check_keys(jc, {"family", "theta"}, "synth copula");
        cfg.copula.family = parse_family(jc.at("family").get<std::string>(), "synth copula");
        if (jc.contains("theta")) cfg.copula.theta = get_number(jc, "theta", "synth copula");
    }
    if (j.contains("start_date")) cfg.start_date = j.at("start_date").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.validate();
    return cfg;
}

Json report_to_json(const BacktestReport& report) {
    Json periods = Json::array();
    for (const PeriodRecord& p : report.periods) {
        Json jp;
        jp["date"] = p.date;
        Json weights;
        for (std::size_t i = 0; i < report.option_ids.size(); ++i) {
            weights[report.option_ids[i]] = p.weights[static_cast<Eigen::Index>(i)];
        }
        jp["weights"] = std::move(weights);
        jp["return"] = p.portfolio_return;
        jp["fallback"] = p.fallback;
        periods.push_back(std::move(jp));
    }
    Json out;
    out["periods"] = std::move(periods);
    out["summary"] = stats_to_json(report.summary);
    out["benchmark"] = stats_to_json(report.benchmark);
    return out;
}

std::string pnl_to_csv(const BacktestReport& report) {
    std::ostringstream out;
    out << "date,portfolio_pnl,benchmark_pnl\n";
    for (std::size_t i = 0; i < report.periods.size(); ++i) {
        out << report.periods[i].date << ',' << format_double(report.pnl[i]) << ','
            << format_double(report.benchmark_pnl[i]) << '\n';
    }
    return out.str();
}

std::string weights_history_csv(const BacktestReport& report) {
    std::ostringstream out;
    out << "date";
    for (const std::string& id : report.option_ids) out << ',' << id;
    out << '\n';
    for (const PeriodRecord& p : report.periods) {
        out << p.date;
        for (Eigen::Index i = 0; i < p.weights.size(); ++i) {
            out << ',' << format_double(p.weights[i]);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace copt
