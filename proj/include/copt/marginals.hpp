#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace copt {

// Empirical marginal distribution of one underlier's terminal value over the
// sampling window. The CDF is normalised by m+1 so that evaluated values stay
// in [0, m/(m+1)] and pseudo-observations never touch the unit-square boundary.
class MarginalModel {
  public:
    explicit MarginalModel(std::vector<double> samples);

    // (1/(m+1)) * #{samples <= x}
    double cdf(double x) const;

    std::size_t count_at_or_below(double x) const;
    std::size_t count_strictly_below(double x) const;
    std::size_t count_strictly_above(double x) const;

    std::size_t size() const { return samples_.size(); }
    const std::vector<double>& samples() const { return samples_; }

  private:
    std::vector<double> samples_;  // ascending
};

// Rank-transformed joint observations on the open unit square.
struct PseudoObservations {
    std::vector<std::pair<double, double>> pairs;

    std::size_t size() const { return pairs.size(); }
    double u(std::size_t i) const { return pairs[i].first; }
    double v(std::size_t i) const { return pairs[i].second; }
};

// Average ranks (1-based), ties receive the mean of the positions they span.
std::vector<double> average_ranks(const std::vector<double>& xs);

// Pseudo-observation pair i is (rank_a(i), rank_b(i)) / (m+1).
PseudoObservations pseudo_observations(const std::vector<double>& a,
                                       const std::vector<double>& b);

}  // namespace copt
