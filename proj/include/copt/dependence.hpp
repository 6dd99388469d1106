#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "copt/copulas.hpp"

namespace copt {

enum class OptionKind { Call, Put, Strangle };

std::string kind_name(OptionKind k);
std::optional<OptionKind> kind_from_name(std::string_view name);

// One positive-payoff event: a single Call or Put leg with its strike quantile.
struct OptionLeg {
    bool call = false;
    double quantile = 0.0;  // F(K) under the leg's marginal
};

// A European option held to expiry. Strikes are stored both as prices and as
// quantiles of the underlier's marginal terminal-value distribution. For a
// Strangle, `strike`/`q_lo` is the Put side and `strike_hi`/`q_hi` the Call
// side, with strike < strike_hi.
struct OptionSpec {
    std::string id;
    std::string underlier;
    OptionKind kind = OptionKind::Call;
    double strike = 0.0;
    double strike_hi = 0.0;
    double q_lo = 0.0;
    double q_hi = 0.0;
    // Number of sampling-window periods in which the option would have paid;
    // negative when unknown (spec built without a window).
    int support_count = -1;

    void validate() const;
    std::vector<OptionLeg> legs() const;
};

// P(option pays out): Call 1-u, Put u, Strangle 1 - u_hi + u_lo.
double payout_prob(const OptionSpec& opt);

// P(both legs pay) from the copula between the two underliers.
double joint_payout_prob(const CopulaParam& c, const OptionLeg& a, const OptionLeg& b);

// mu(O_i, O_j) = P(O_i pays and O_j pays) / P(O_j pays), assembled from the
// disjoint leg decomposition. Throws ZeroPayoutError when P(O_j pays) = 0.
double conditional_mu(const CopulaParam& c, const OptionSpec& opt_i, const OptionSpec& opt_j);

// Copula per unordered underlier pair, keyed with first < second.
using CopulaMap = std::map<std::pair<std::string, std::string>, CopulaParam>;

struct DependencyMatrix {
    Eigen::MatrixXd values;
    std::vector<OptionSpec> options;
    Eigen::VectorXd payout_probs;
    std::vector<std::string> degenerate_ids;  // options with zero payout probability
    bool repaired = false;
    double frobenius_perturbation = 0.0;

    bool degenerate() const { return !degenerate_ids.empty(); }
};

// Lambda_ij = mu(O_i, O_j) / P(O_i pays) = P(both)/ (P(i)P(j)); computed for
// i <= j and mirrored so symmetry is exact. Same-underlier pairs use the
// comonotone copula. A zero payout probability flags the matrix degenerate
// instead of throwing; values are left unfilled in that case.
DependencyMatrix dependency_matrix(const std::vector<OptionSpec>& options,
                                   const CopulaMap& copulas);

// Copula between two options' underliers: comonotone when identical,
// otherwise looked up in the map (throws std::out_of_range if missing).
CopulaParam pair_copula(const CopulaMap& copulas, const std::string& a, const std::string& b);

}  // namespace copt
