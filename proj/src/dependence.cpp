#include "copt/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "copt/errors.hpp"

namespace copt {

std::string kind_name(OptionKind k) {
    switch (k) {
        case OptionKind::Call: return "call";
        case OptionKind::Put: return "put";
        case OptionKind::Strangle: return "strangle";
    }
    return "unknown";
}

std::optional<OptionKind> kind_from_name(std::string_view name) {
    if (name == "call") return OptionKind::Call;
    if (name == "put") return OptionKind::Put;
    if (name == "strangle") return OptionKind::Strangle;
    return std::nullopt;
}

void OptionSpec::validate() const {
    if (!(q_lo >= 0.0 && q_lo <= 1.0) || !(q_hi >= 0.0 && q_hi <= 1.0)) {
        throw std::invalid_argument("OptionSpec " + id + ": quantiles outside [0,1]");
    }
    if (kind == OptionKind::Strangle) {
        if (!(strike < strike_hi)) {
            throw std::invalid_argument("OptionSpec " + id +
                                        ": strangle requires put strike < call strike");
        }
        if (q_lo > q_hi) {
            throw std::invalid_argument("OptionSpec " + id + ": strangle quantiles out of order");
        }
    }
}

std::vector<OptionLeg> OptionSpec::legs() const {
    switch (kind) {
        case OptionKind::Call: return {{true, q_lo}};
        case OptionKind::Put: return {{false, q_lo}};
        case OptionKind::Strangle: return {{false, q_lo}, {true, q_hi}};
    }
    return {};
}

double payout_prob(const OptionSpec& opt) {
    switch (opt.kind) {
        case OptionKind::Call: return 1.0 - opt.q_lo;
        case OptionKind::Put: return opt.q_lo;
        case OptionKind::Strangle: return 1.0 - opt.q_hi + opt.q_lo;
    }
    return 0.0;
}

double joint_payout_prob(const CopulaParam& c, const OptionLeg& a, const OptionLeg& b) {
    const double u1 = a.quantile;
    const double u2 = b.quantile;
    const double joint_cdf = copula_cdf(c, u1, u2);
    double p = 0.0;
    if (a.call && b.call) {
        p = 1.0 - u1 - u2 + joint_cdf;
    } else if (!a.call && !b.call) {
        p = joint_cdf;
    } else if (a.call && !b.call) {
        p = u2 - joint_cdf;
    } else {
        p = u1 - joint_cdf;
    }
    return std::clamp(p, 0.0, 1.0);
}

double conditional_mu(const CopulaParam& c, const OptionSpec& opt_i, const OptionSpec& opt_j) {
    opt_i.validate();
    opt_j.validate();
    const double denom = payout_prob(opt_j);
    if (denom <= 0.0) {
        throw ZeroPayoutError("conditional_mu: option " + opt_j.id +
                              " pays out with probability zero");
    }
    double numer = 0.0;
    for (const OptionLeg& a : opt_i.legs()) {
        for (const OptionLeg& b : opt_j.legs()) {
            numer += joint_payout_prob(c, a, b);
        }
    }
    return std::clamp(numer / denom, 0.0, 1.0);
}

CopulaParam pair_copula(const CopulaMap& copulas, const std::string& a, const std::string& b) {
    if (a == b) return CopulaParam{CopulaFamily::Comonotone, 0.0};
    const auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    const auto it = copulas.find(key);
    if (it == copulas.end()) {
        throw std::out_of_range("no fitted copula for underlier pair (" + key.first + ", " +
                                key.second + ")");
    }
    return it->second;
}

DependencyMatrix dependency_matrix(const std::vector<OptionSpec>& options,
                                   const CopulaMap& copulas) {
    const auto n = static_cast<Eigen::Index>(options.size());
    DependencyMatrix dep;
    dep.options = options;
    dep.values = Eigen::MatrixXd::Zero(n, n);
    dep.payout_probs = Eigen::VectorXd::Zero(n);

    for (Eigen::Index i = 0; i < n; ++i) {
        options[i].validate();
        dep.payout_probs[i] = payout_prob(options[i]);
        if (dep.payout_probs[i] <= 0.0) dep.degenerate_ids.push_back(options[i].id);
    }
    if (dep.degenerate()) return dep;

    for (Eigen::Index i = 0; i < n; ++i) {
        dep.values(i, i) = 1.0 / dep.payout_probs[i];
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const CopulaParam cop =
                pair_copula(copulas, options[i].underlier, options[j].underlier);
            double joint = 0.0;
            for (const OptionLeg& a : options[i].legs()) {
                for (const OptionLeg& b : options[j].legs()) {
                    joint += joint_payout_prob(cop, a, b);
                }
            }
            // Lambda_ij = P(i and j) / (P(i) P(j)); Eq-wise mu/P with the
            // numerator capped by the rarer event's probability.
            joint = std::min({joint, dep.payout_probs[i], dep.payout_probs[j]});
            const double value = joint / (dep.payout_probs[i] * dep.payout_probs[j]);
            dep.values(i, j) = value;
            dep.values(j, i) = value;
        }
    }
    return dep;
}

}  // namespace copt
