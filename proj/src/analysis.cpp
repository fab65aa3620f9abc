#include "pathwalk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathwalk/models/brownian.hpp"
#include "pathwalk/observables.hpp"

namespace pathwalk {

double analytic_range_cdf(double x, int k_max, double* last_term) {
    if (k_max < 1) throw std::invalid_argument("analytic_range_cdf: k_max must be >= 1");
    if (last_term) *last_term = 0.0;
    if (x <= 1e-6) return 0.0;  // K > 0 almost surely; documented cutoff

    double sum = 1.0;  // k = 0 term
    for (int k = 1; k <= k_max; ++k) {
        const double kx2 = static_cast<double>(k) * k * x * x;
        const double term = (1.0 - 4.0 * kx2) * std::exp(-2.0 * kx2);
        sum += 2.0 * term;  // symmetric pair +-k
        if (k == k_max && last_term) *last_term = std::abs(term);
    }
    return std::clamp(sum, 0.0, 1.0);
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> values) : sorted_(std::move(values)) {
    if (sorted_.empty()) throw std::invalid_argument("empirical_cdf: empty sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double ks_distance(const EmpiricalCdf& empirical,
                   const std::function<double(double)>& reference) {
    const auto& xs = empirical.sorted();
    const double n = static_cast<double>(xs.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = reference(xs[i]);
        if (f < -1e-12 || f > 1.0 + 1e-12)
            throw std::invalid_argument("ks_distance: reference CDF left [0, 1]");
        const double hi = static_cast<double>(i + 1) / n;  // F_n at x_i
        const double lo = static_cast<double>(i) / n;      // F_n just below x_i
        worst = std::max({worst, std::abs(hi - f), std::abs(f - lo)});
    }
    return worst;
}

double ks_distance_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_distance_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double worst = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        const double fa = static_cast<double>(i) / a.size();
        const double fb = static_cast<double>(j) / b.size();
        worst = std::max(worst, std::abs(fa - fb));
    }
    return worst;
}

std::vector<ScalingCell> acceptance_scaling_benchmark(const std::vector<ProposalSpec>& proposals,
                                                      const std::vector<int>& n_t_list,
                                                      long steps_per_cell, std::uint64_t seed) {
    const auto model = brownian_model(1);
    const auto obs = endpoint_observable(0);
    std::vector<ScalingCell> table;
    RandomStream root(seed);
    std::uint64_t stream = 0;

    for (const auto& prop : proposals) {
        for (int n_t : n_t_list) {
            SamplerConfig cfg;
            cfg.z_target = 0.0;
            cfg.proposal = prop.kind;
            if (prop.kind == ProposalKind::TangentRandomWalk)
                cfg.step = prop.parameter;
            else
                cfg.beta = prop.parameter;
            cfg.chain_length = steps_per_cell;
            RandomStream rng = root.spawn(stream++);
            const ChainResult run =
                run_chain(*model, *obs, make_grid(1.0, n_t), cfg, rng);
            table.push_back({prop.label, n_t, run.stats.acceptance_rate});
        }
    }
    return table;
}

int freedman_diaconis_bins(const std::vector<double>& values) {
    if (values.size() < 2) return 1;
    std::vector<double> v = values;
    std::sort(v.begin(), v.end());
    const auto quantile = [&](double p) {
        const double idx = p * (v.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(idx);
        const double frac = idx - lo;
        return lo + 1 < v.size() ? v[lo] * (1 - frac) + v[lo + 1] * frac : v[lo];
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(v.size()));
    const double span = v.back() - v.front();
    if (!(width > 0.0) || !(span > 0.0)) return 1;
    return std::clamp(static_cast<int>(std::ceil(span / width)), 1, 1000000);
}

Histogram histogram(const std::vector<double>& values, int bins) {
    if (values.empty()) throw std::invalid_argument("histogram: empty sample");
    if (bins < 1) throw std::invalid_argument("histogram: need at least one bin");
    Histogram h;
    h.lo = *std::min_element(values.begin(), values.end());
    h.hi = *std::max_element(values.begin(), values.end());
    h.counts.assign(bins, 0);
    const double span = h.hi - h.lo;
    for (double v : values) {
        int b = span > 0.0 ? static_cast<int>((v - h.lo) / span * bins) : 0;
        h.counts[std::clamp(b, 0, bins - 1)] += 1;
    }
    return h;
}

}  // namespace pathwalk
