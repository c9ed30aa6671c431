#pragma once

#include <cstdint>
#include <vector>

#include "stablelab/rng.hpp"
#include "stablelab/stats.hpp"

namespace stablelab {

/// Two-cusp intermittent interval map on (0,1) with neutral fixed points at
/// 0 and 1: T x = x (1 + (2x)^p) on Z_0 = (0, 1/2], mirrored on Z_1, so
/// T(1-x) = 1 - T(x) and the local coefficients are kappa_0 = kappa_1 = 2^p.
struct IntermittentMap {
    double p = 1.0;
    double c = 0.5;      // branch point
    double kappa = 2.0;  // 2^p

    /// Left branch x + kappa x^{1+p} on (0, c].
    double left(double x) const;
    double left_derivative(double x) const;
    /// Inverse of the left branch (Newton; monotone convex).
    double left_inverse(double y) const;
    /// Full map; throws on the branch point and outside (0,1).
    double apply(double x) const;
    /// r_0(x) = T x - x = kappa x^{1+p}.
    double r0(double x) const { return left(x) - x; }
};

IntermittentMap make_lsv2(double p);

/// First-return structure on Y = (y_0, y_1) where y_0 is the period-2 point
/// of Z_0 and y_1 = T y_0 = 1 - y_0.
///
/// Excursions are deterministic crawls along one cusp: a side-j excursion
/// entering at distance z from the fixed point takes M(z) more steps, where
/// M(z) = k exactly when z lies in (b_k, b_{k-1}] for the inverse-branch
/// ladder b_0 = y_0, b_k = left^{-1}(b_{k-1}). M is found by binary search
/// in a precomputed ladder; below the ladder the step count follows the
/// corrected flow H(x) = x^{-p}/(p kappa) - ((p+1)/2) log x, whose per-step
/// increment is 1 + O(x^{2p}). Endpoints are recovered by at most
/// ladder-depth exact forward steps.
class ReturnStructure {
public:
    ReturnStructure(const IntermittentMap& map, std::int64_t ladder_depth);

    double y0() const { return y0_; }
    double y1() const { return y1_; }
    const IntermittentMap& map() const { return map_; }
    std::int64_t ladder_depth() const { return depth_; }

    bool in_Y(double x) const { return x > y0_ && x < y1_; }

    /// M(z): steps from entry z in (0, y_0] until the crawl leaves (0, y_0].
    /// Sets censored when 1 + M would exceed cap.
    std::int64_t excursion_steps(double z, std::int64_t cap,
                                 bool& censored) const;
    /// T^M(z) in (y_0, y_1], exact forward iteration within the ladder and
    /// flow-interpolated below it.
    double excursion_endpoint(double z, std::int64_t steps) const;

private:
    double flow(double x) const;  // H above

    IntermittentMap map_;
    double y0_;
    double y1_;
    std::int64_t depth_;
    std::vector<double> ladder_;  // b_0 .. b_depth, decreasing
};

ReturnStructure find_Y(const IntermittentMap& map,
                       std::int64_t ladder_depth = 2048);

struct FirstReturn {
    std::int64_t phi = 0;  // return time (capped value when censored)
    int side = 0;          // excursion side j: T x in Z_j
    double point = 0.0;    // T_Y x (approximate when censored)
    bool censored = false;
};

/// One first return from x in Y. The default cap matches the spec of the
/// sampling experiments; the step count is computed analytically, so large
/// caps do not cost iteration time.
FirstReturn first_return(const IntermittentMap& map, const ReturnStructure& rs,
                         double x, std::int64_t cap = 1000000000);

/// A batch of consecutive returns of the chain started uniformly on Y.
struct ExcursionSample {
    std::vector<std::int64_t> phi;
    std::vector<std::int8_t> side;
    std::size_t censored = 0;
    std::size_t disjoint_support_violations = 0;  // must stay 0
};

ExcursionSample simulate_returns(const IntermittentMap& map,
                                 const ReturnStructure& rs, std::size_t n,
                                 std::int64_t cap, Rng& rng);

struct ExcursionTailReport {
    HillResult side0;
    HillResult side1;
    HillResult side0_burned;
    HillResult side1_burned;
    double count_ratio = 0.0;  // side-0 vs side-1 exceedances, matched threshold
    double threshold = 0.0;
    std::size_t censored = 0;
    std::size_t returns = 0;
};

/// Hill tail-index fits of phi^{(0)}, phi^{(1)} over the top order
/// statistics, raw and with the first 10^3 returns discarded, plus the
/// side exceedance-count ratio at a matched threshold.
ExcursionTailReport excursion_tail_estimate(const IntermittentMap& map,
                                            const ReturnStructure& rs,
                                            std::size_t n_returns, Rng& rng,
                                            std::int64_t cap = 1000000000,
                                            double top_fraction = 0.05);

struct MeasureReport {
    bool finite = false;
    double integral = 0.0;  // int_0^c x/r_0 dx when finite
};

/// mu(X) < infinity iff int_0^c x dx / r_0(x) < infinity; quadrature away
/// from 0 with the analytic x^{-p} handling near 0 (finite iff p < 1).
MeasureReport measure_finiteness(const IntermittentMap& map);

struct InducedDistortionReport {
    std::size_t trials = 0;
    double max_log_distortion = 0.0;
};

/// Distortion diagnostic for the induced Gibbs-Markov system (Y, T_Y) over
/// rank-1 cylinders {side j, phi = k}, with normalized Lebesgue measure on
/// Y standing in for mu_Y (equivalent with bounded density). Cylinders with
/// phi <= max_phi keep the branch inversions cheap.
InducedDistortionReport induced_distortion_check(const IntermittentMap& map,
                                                 const ReturnStructure& rs,
                                                 std::size_t trials, Rng& rng,
                                                 std::int64_t max_phi = 512);

}  // namespace stablelab
