#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "stablelab/rng.hpp"

namespace stablelab {

struct KsResult {
    double distance = 0.0;
    double p_value = 1.0;
};

/// Classical two-sample Kolmogorov-Smirnov distance. The p-value comes from
/// a label permutation test (heavy-tailed samples make the asymptotic
/// formula unreliable); set permutations = 0 to skip it.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       std::size_t permutations, Rng& rng);

/// KS distance alone.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// One-sample KS distance against an exact CDF.
double ks_one_sample(std::span<const double> sample,
                     const std::function<double(double)>& cdf);

struct HillResult {
    double alpha_hat = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t exceedances = 0;
    double threshold = 0.0;
};

/// Hill tail-index estimator over the top `top_fraction` order statistics,
/// with the usual asymptotic normal CI. Requires >= 100 exceedances and a
/// genuinely unbounded-looking tail (threshold > 0, distinct top values).
HillResult hill_estimate(std::vector<double> samples, double top_fraction,
                         double confidence_z = 1.96);

/// Sample distance correlation (Szekely). O(n^2) time, O(n) memory.
double distance_correlation(std::span<const double> x,
                            std::span<const double> y);

/// Distance correlation of normal ranks: coordinatewise rank transform to
/// (0,1) before the dCor computation. Independence is preserved by monotone
/// transforms and the statistic stops being dominated by heavy tails.
double rank_distance_correlation(std::span<const double> x,
                                 std::span<const double> y);

/// Pearson correlation.
double pearson(std::span<const double> x, std::span<const double> y);

/// Empirical quantile (linear interpolation on the sorted copy).
double quantile(std::vector<double> v, double q);

/// Empirical CDF value at t.
double ecdf(std::span<const double> sorted_sample, double t);

/// Max over a q x q grid of marginal quantiles of
/// |F_joint(a,b) - F_x(a) F_y(b)|.
double joint_cdf_factorization_error(std::span<const double> x,
                                     std::span<const double> y,
                                     const std::vector<double>& grid_probs);

}  // namespace stablelab
