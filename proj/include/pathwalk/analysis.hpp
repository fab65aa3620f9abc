#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pathwalk/sampler.hpp"

namespace pathwalk {

// Range distribution of the standard Brownian bridge,
// F_K(x) = sum_k (1 - 4 k^2 x^2) exp(-2 k^2 x^2), truncated at |k| <= k_max.
// Returns 0 for x below a small cutoff (the range is positive almost
// surely and the truncated series misbehaves near 0). When last_term is
// given it receives the magnitude of the largest |k| term as a truncation
// error indicator.
double analytic_range_cdf(double x, int k_max, double* last_term = nullptr);

// Right-continuous empirical CDF over a retained sorted copy.
class EmpiricalCdf {
  public:
    explicit EmpiricalCdf(std::vector<double> values);

    double operator()(double x) const;  // #(v <= x) / n
    const std::vector<double>& sorted() const { return sorted_; }
    std::size_t size() const { return sorted_.size(); }

  private:
    std::vector<double> sorted_;
};

// sup_x |F_n(x) - F(x)| over the sample points, both one-sided gaps.
// Asserts the reference stays in [0, 1].
double ks_distance(const EmpiricalCdf& empirical, const std::function<double(double)>& reference);

// Two-sample KS distance (used against rejection-sampling oracles).
double ks_distance_two_sample(std::vector<double> a, std::vector<double> b);

struct ProposalSpec {
    std::string label;
    ProposalKind kind = ProposalKind::TangentRandomWalk;
    double parameter = 0.1;  // step s or pCN beta, held fixed across N_t
};

struct ScalingCell {
    std::string proposal;
    int n_t = 0;
    double acceptance_rate = 0.0;
};

// Acceptance-rate table on the flat Brownian-bridge manifold (endpoint 0
// at T = 1) for each proposal at each resolution, with the physical step
// parameter held fixed.
std::vector<ScalingCell> acceptance_scaling_benchmark(const std::vector<ProposalSpec>& proposals,
                                                      const std::vector<int>& n_t_list,
                                                      long steps_per_cell, std::uint64_t seed);

// Freedman-Diaconis bin count, clamped to [1, 10^6].
int freedman_diaconis_bins(const std::vector<double>& values);

struct Histogram {
    double lo = 0.0, hi = 0.0;
    std::vector<long> counts;
};

Histogram histogram(const std::vector<double>& values, int bins);

}  // namespace pathwalk
