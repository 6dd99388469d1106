#include "copt/marginals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace copt {

MarginalModel::MarginalModel(std::vector<double> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) {
        throw std::invalid_argument("MarginalModel: needs at least one sample");
    }
    for (double x : samples_) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("MarginalModel: non-finite sample");
        }
    }
    std::sort(samples_.begin(), samples_.end());
}

double MarginalModel::cdf(double x) const {
    return static_cast<double>(count_at_or_below(x)) / static_cast<double>(samples_.size() + 1);
}

std::size_t MarginalModel::count_at_or_below(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(samples_.begin(), samples_.end(), x) - samples_.begin());
}

std::size_t MarginalModel::count_strictly_below(double x) const {
    return static_cast<std::size_t>(
        std::lower_bound(samples_.begin(), samples_.end(), x) - samples_.begin());
}

std::size_t MarginalModel::count_strictly_above(double x) const {
    return samples_.size() - count_at_or_below(x);
}

std::vector<double> average_ranks(const std::vector<double>& xs) {
    const std::size_t m = xs.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });

    std::vector<double> ranks(m, 0.0);
    std::size_t i = 0;
    while (i < m) {
        std::size_t j = i;
        while (j + 1 < m && xs[order[j + 1]] == xs[order[i]]) ++j;
        // positions i+1 .. j+1 share the average rank
        const double avg = 0.5 * static_cast<double>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

PseudoObservations pseudo_observations(const std::vector<double>& a,
                                       const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("pseudo_observations: series length mismatch");
    }
    if (a.size() < 2) {
        throw std::invalid_argument("pseudo_observations: need at least two joint observations");
    }
    const double denom = static_cast<double>(a.size() + 1);
    const std::vector<double> ra = average_ranks(a);
    const std::vector<double> rb = average_ranks(b);

    PseudoObservations obs;
    obs.pairs.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        obs.pairs.emplace_back(ra[i] / denom, rb[i] / denom);
    }
    return obs;
}

}  // namespace copt
