#include "stablelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace stablelab {

namespace {

// KS distance of two label groups over a pooled sorted arrangement.
// labels[i] == true means pool[i] belongs to sample a.
double ks_from_labels(const std::vector<double>& pool,
                      const std::vector<char>& labels, std::size_t na,
                      std::size_t nb) {
    double fa = 0.0, fb = 0.0, best = 0.0;
    const double da = 1.0 / static_cast<double>(na);
    const double db = 1.0 / static_cast<double>(nb);
    std::size_t i = 0;
    const std::size_t n = pool.size();
    while (i < n) {
        // advance over ties as a block so the ECDFs are compared at values
        std::size_t j = i;
        while (j < n && pool[j] == pool[i]) {
            if (labels[j]) fa += da; else fb += db;
            ++j;
        }
        best = std::max(best, std::fabs(fa - fb));
        i = j;
    }
    return best;
}

}  // namespace

double ks_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_distance: empty sample");
    std::vector<double> pool(a.begin(), a.end());
    pool.insert(pool.end(), b.begin(), b.end());
    std::vector<char> labels(pool.size(), 0);
    std::fill(labels.begin(), labels.begin() + a.size(), 1);
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return pool[i] < pool[j]; });
    std::vector<double> sorted(pool.size());
    std::vector<char> slab(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted[i] = pool[order[i]];
        slab[i] = labels[order[i]];
    }
    return ks_from_labels(sorted, slab, a.size(), b.size());
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b,
                       std::size_t permutations, Rng& rng) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: empty sample");
    std::vector<double> pool(a.begin(), a.end());
    pool.insert(pool.end(), b.begin(), b.end());
    std::vector<char> labels(pool.size(), 0);
    std::fill(labels.begin(), labels.begin() + a.size(), 1);

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return pool[i] < pool[j]; });
    std::vector<double> sorted(pool.size());
    std::vector<char> slab(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted[i] = pool[order[i]];
        slab[i] = labels[order[i]];
    }

    KsResult out;
    out.distance = ks_from_labels(sorted, slab, a.size(), b.size());
    if (permutations == 0) return out;

    std::size_t exceed = 0;
    std::vector<char> perm = slab;
    for (std::size_t p = 0; p < permutations; ++p) {
        // Fisher-Yates on the label vector
        for (std::size_t i = perm.size() - 1; i > 0; --i) {
            std::size_t j = rng.next_u64() % (i + 1);
            std::swap(perm[i], perm[j]);
        }
        double d = ks_from_labels(sorted, perm, a.size(), b.size());
        if (d >= out.distance) ++exceed;
    }
    out.p_value = (1.0 + static_cast<double>(exceed)) /
                  (1.0 + static_cast<double>(permutations));
    return out;
}

double ks_one_sample(std::span<const double> sample,
                     const std::function<double(double)>& cdf) {
    if (sample.empty())
        throw std::invalid_argument("ks_one_sample: empty sample");
    std::vector<double> s(sample.begin(), sample.end());
    std::sort(s.begin(), s.end());
    const double n = static_cast<double>(s.size());
    double best = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        double f = cdf(s[i]);
        best = std::max(best, std::fabs((static_cast<double>(i) + 1.0) / n - f));
        best = std::max(best, std::fabs(f - static_cast<double>(i) / n));
    }
    return best;
}

HillResult hill_estimate(std::vector<double> samples, double top_fraction,
                         double confidence_z) {
    if (top_fraction <= 0.0 || top_fraction >= 1.0)
        throw std::invalid_argument("hill_estimate: top_fraction in (0,1)");
    std::sort(samples.begin(), samples.end(), std::greater<>());
    const std::size_t k = static_cast<std::size_t>(
        std::ceil(top_fraction * static_cast<double>(samples.size())));
    if (k < 100 || k + 1 > samples.size())
        throw std::runtime_error("hill_estimate: too few exceedances");
    const double threshold = samples[k];
    if (!(threshold > 0.0) || samples[0] <= threshold)
        throw std::runtime_error("hill_estimate: no usable tail");
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        acc += std::log(samples[i] / threshold);
    const double alpha = static_cast<double>(k) / acc;
    const double half = confidence_z * alpha / std::sqrt(static_cast<double>(k));
    return HillResult{alpha, alpha - half, alpha + half, k, threshold};
}

double distance_correlation(std::span<const double> x,
                            std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 4)
        throw std::invalid_argument("distance_correlation: bad input");
    // Double-centered distance matrices, accumulated without materializing
    // either one: O(n^2) time, O(n) memory.
    const std::size_t n = x.size();
    const double dn = static_cast<double>(n);
    std::vector<double> rx(n, 0.0), ry(n, 0.0);
    double gx = 0.0, gy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            rx[i] += std::fabs(x[i] - x[j]);
            ry[i] += std::fabs(y[i] - y[j]);
        }
        gx += rx[i];
        gy += ry[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        rx[i] /= dn;
        ry[i] /= dn;
    }
    gx /= dn * dn;
    gy /= dn * dn;
    double vxy = 0.0, vxx = 0.0, vyy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double a = std::fabs(x[i] - x[j]) - rx[i] - rx[j] + gx;
            double b = std::fabs(y[i] - y[j]) - ry[i] - ry[j] + gy;
            vxy += a * b;
            vxx += a * a;
            vyy += b * b;
        }
    }
    double denom = std::sqrt(vxx * vyy);
    if (denom <= 0.0) return 0.0;
    double r2 = vxy / denom;
    return r2 > 0.0 ? std::sqrt(r2) : 0.0;
}

namespace {

std::vector<double> to_ranks(std::span<const double> v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    const double n1 = static_cast<double>(v.size()) + 1.0;
    for (std::size_t i = 0; i < order.size(); ++i)
        r[order[i]] = (static_cast<double>(i) + 1.0) / n1;
    return r;
}

}  // namespace

double rank_distance_correlation(std::span<const double> x,
                                 std::span<const double> y) {
    auto rx = to_ranks(x);
    auto ry = to_ranks(y);
    return distance_correlation(rx, ry);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("pearson: bad input");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) throw std::invalid_argument("quantile: empty");
    std::sort(v.begin(), v.end());
    if (q <= 0.0) return v.front();
    if (q >= 1.0) return v.back();
    double pos = q * (static_cast<double>(v.size()) - 1.0);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

double ecdf(std::span<const double> sorted_sample, double t) {
    auto it = std::upper_bound(sorted_sample.begin(), sorted_sample.end(), t);
    return static_cast<double>(it - sorted_sample.begin()) /
           static_cast<double>(sorted_sample.size());
}

double joint_cdf_factorization_error(std::span<const double> x,
                                     std::span<const double> y,
                                     const std::vector<double>& grid_probs) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("joint_cdf_factorization_error: bad input");
    std::vector<double> xs(x.begin(), x.end()), ys(y.begin(), y.end());
    const double n = static_cast<double>(x.size());
    double worst = 0.0;
    for (double px : grid_probs) {
        double a = quantile(xs, px);
        for (double py : grid_probs) {
            double b = quantile(ys, py);
            double joint = 0.0, fx = 0.0, fy = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                bool inx = x[i] <= a;
                bool iny = y[i] <= b;
                if (inx) fx += 1.0;
                if (iny) fy += 1.0;
                if (inx && iny) joint += 1.0;
            }
            joint /= n;
            fx /= n;
            fy /= n;
            worst = std::max(worst, std::fabs(joint - fx * fy));
        }
    }
    return worst;
}

}  // namespace stablelab
