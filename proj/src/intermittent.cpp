#include "stablelab/intermittent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stablelab/numeric.hpp"

namespace stablelab {

namespace {

// (2x)^p with a multiplication fast path for small integer p.
double pow2x(double x, double p) {
    double u = 2.0 * x;
    double ip;
    if (std::modf(p, &ip) == 0.0 && ip >= 1.0 && ip <= 8.0) {
        double r = u;
        for (int i = 1; i < static_cast<int>(ip); ++i) r *= u;
        return r;
    }
    return std::pow(u, p);
}

}  // namespace

double IntermittentMap::left(double x) const { return x * (1.0 + pow2x(x, p)); }

double IntermittentMap::left_derivative(double x) const {
    return 1.0 + (p + 1.0) * pow2x(x, p);
}

double IntermittentMap::left_inverse(double y) const {
    // solve w + kappa w^{1+p} = y; Newton from w = y converges monotonically
    double w = std::min(y, c);
    for (int it = 0; it < 100; ++it) {
        double f = left(w) - y;
        double step = f / left_derivative(w);
        w -= step;
        if (std::fabs(step) <= 1e-16 * w) break;
    }
    return w;
}

double IntermittentMap::apply(double x) const {
    if (!(x > 0.0) || !(x < 1.0) || x == c)
        throw std::domain_error("IntermittentMap: point outside branch domains");
    if (x < c) return left(x);
    return 1.0 - left(1.0 - x);
}

IntermittentMap make_lsv2(double p) {
    if (!(p > 0.0)) throw std::invalid_argument("make_lsv2: p > 0 required");
    IntermittentMap m;
    m.p = p;
    m.c = 0.5;
    m.kappa = std::pow(2.0, p);
    return m;
}

ReturnStructure::ReturnStructure(const IntermittentMap& map,
                                 std::int64_t ladder_depth)
    : map_(map), depth_(ladder_depth) {
    if (depth_ < 16)
        throw std::invalid_argument("ReturnStructure: ladder too short");
    // period-2 point: T y = 1 - y on (0, c); left side negative, right positive
    auto g = [&](double y) { return map_.left(y) - (1.0 - y); };
    y0_ = bisect(g, 1e-12, map_.c, 1e-15, 400);
    y1_ = 1.0 - y0_;
    double back = 1.0 - map_.left(1.0 - y1_);  // T y_1 through the right branch
    if (std::fabs(back - y0_) > 1e-10)
        throw std::runtime_error("ReturnStructure: period-2 check failed");

    ladder_.resize(static_cast<std::size_t>(depth_) + 1);
    ladder_[0] = y0_;
    for (std::size_t k = 1; k < ladder_.size(); ++k)
        ladder_[k] = map_.left_inverse(ladder_[k - 1]);
}

double ReturnStructure::flow(double x) const {
    const double p = map_.p;
    return std::pow(x, -p) / (p * map_.kappa) -
           0.5 * (p + 1.0) * std::log(x);
}

std::int64_t ReturnStructure::excursion_steps(double z, std::int64_t cap,
                                              bool& censored) const {
    censored = false;
    if (!(z > 0.0)) {
        censored = true;
        return cap;
    }
    if (z > y0_) return 0;
    if (z > ladder_.back()) {
        // first rung strictly below z: z in (b_k, b_{k-1}] <=> M = k
        auto it = std::upper_bound(ladder_.begin(), ladder_.end(), z,
                                   [](double v, double rung) { return v > rung; });
        return static_cast<std::int64_t>(it - ladder_.begin());
    }
    double extra = flow(z) - flow(ladder_.back());
    double total = static_cast<double>(depth_) + std::floor(extra) + 1.0;
    if (total >= static_cast<double>(cap)) {
        censored = true;
        return cap;
    }
    return static_cast<std::int64_t>(total);
}

double ReturnStructure::excursion_endpoint(double z, std::int64_t steps) const {
    double x = z;
    std::int64_t remaining = steps;
    if (steps > depth_) {
        // bring the point to ladder depth through the flow, then iterate
        double target = flow(z) - static_cast<double>(steps - depth_);
        double lo = ladder_[static_cast<std::size_t>(depth_)];
        double hi = ladder_[static_cast<std::size_t>(depth_) - 1];
        // flow is decreasing; widen the bracket a touch for rounding
        lo = 0.5 * lo;
        auto h = [&](double v) { return flow(v) - target; };
        x = bisect(h, lo, hi, 1e-14, 200);
        remaining = depth_;
    }
    for (std::int64_t i = 0; i < remaining; ++i) x = map_.left(x);
    return x;
}

ReturnStructure find_Y(const IntermittentMap& map, std::int64_t ladder_depth) {
    return ReturnStructure(map, ladder_depth);
}

FirstReturn first_return(const IntermittentMap& map, const ReturnStructure& rs,
                         double x, std::int64_t cap) {
    if (!rs.in_Y(x))
        throw std::domain_error("first_return: start point outside Y");
    if (cap < 2) throw std::invalid_argument("first_return: cap too small");
    double x1 = map.apply(x);
    FirstReturn out;
    if (rs.in_Y(x1)) {
        out.phi = 1;
        out.side = x1 > map.c ? 1 : 0;
        out.point = x1;
        return out;
    }
    out.side = (x1 <= rs.y0()) ? 0 : 1;
    double z = (out.side == 0) ? x1 : 1.0 - x1;
    bool censored = false;
    std::int64_t m = rs.excursion_steps(z, cap - 1, censored);
    out.censored = censored;
    out.phi = censored ? cap : 1 + m;
    if (censored) {
        out.point = 0.5 * (rs.y0() + rs.y1());  // placeholder, counted apart
        return out;
    }
    double w = rs.excursion_endpoint(z, m);
    out.point = (out.side == 0) ? w : 1.0 - w;
    return out;
}

ExcursionSample simulate_returns(const IntermittentMap& map,
                                 const ReturnStructure& rs, std::size_t n,
                                 std::int64_t cap, Rng& rng) {
    ExcursionSample s;
    s.phi.reserve(n);
    s.side.reserve(n);
    double x = rng.uniform(rs.y0(), rs.y1());
    for (std::size_t i = 0; i < n; ++i) {
        while (x == map.c || x == rs.y0() || x == rs.y1())
            x = rng.uniform(rs.y0(), rs.y1());
        FirstReturn r = first_return(map, rs, x, cap);
        s.phi.push_back(r.phi);
        s.side.push_back(static_cast<std::int8_t>(r.side));
        if (r.censored) ++s.censored;
        if (r.phi < 1 || (r.side != 0 && r.side != 1))
            ++s.disjoint_support_violations;
        x = r.censored ? rng.uniform(rs.y0(), rs.y1()) : r.point;
    }
    return s;
}

ExcursionTailReport excursion_tail_estimate(const IntermittentMap& map,
                                            const ReturnStructure& rs,
                                            std::size_t n_returns, Rng& rng,
                                            std::int64_t cap,
                                            double top_fraction) {
    if (n_returns < 10000)
        throw std::invalid_argument("excursion_tail_estimate: need >= 1e4 returns");
    ExcursionSample s = simulate_returns(map, rs, n_returns, cap, rng);

    const std::size_t burn = std::min<std::size_t>(1000, n_returns / 10);
    std::vector<double> phi0, phi1, b0, b1;
    phi0.reserve(n_returns / 2);
    phi1.reserve(n_returns / 2);
    for (std::size_t i = 0; i < s.phi.size(); ++i) {
        if (s.phi[i] >= cap) continue;  // censored excluded, counted below
        double v = static_cast<double>(s.phi[i]);
        (s.side[i] == 0 ? phi0 : phi1).push_back(v);
        if (i >= burn) (s.side[i] == 0 ? b0 : b1).push_back(v);
    }

    ExcursionTailReport rep;
    rep.returns = n_returns;
    rep.censored = s.censored;
    rep.side0 = hill_estimate(phi0, top_fraction);
    rep.side1 = hill_estimate(phi1, top_fraction);
    rep.side0_burned = hill_estimate(b0, top_fraction);
    rep.side1_burned = hill_estimate(b1, top_fraction);

    // side exceedance counts at a matched threshold (pooled 98% quantile)
    std::vector<double> pooled = phi0;
    pooled.insert(pooled.end(), phi1.begin(), phi1.end());
    rep.threshold = quantile(pooled, 0.98);
    std::size_t c0 = 0, c1 = 0;
    for (double v : phi0)
        if (v > rep.threshold) ++c0;
    for (double v : phi1)
        if (v > rep.threshold) ++c1;
    rep.count_ratio = c1 > 0 ? static_cast<double>(c0) / static_cast<double>(c1)
                             : 0.0;
    return rep;
}

MeasureReport measure_finiteness(const IntermittentMap& map) {
    MeasureReport rep;
    if (map.p >= 1.0) {
        rep.finite = false;  // the x^{-p} piece near 0 diverges
        return rep;
    }
    const double eps = 1e-6;
    // analytic piece: int_0^eps x^{-p}/kappa dx
    double head = std::pow(eps, 1.0 - map.p) / ((1.0 - map.p) * map.kappa);
    auto integrand = [&](double x) { return x / map.r0(x); };
    double body = adaptive_simpson(integrand, eps, map.c, 1e-10);
    rep.finite = true;
    rep.integral = head + body;
    return rep;
}

InducedDistortionReport induced_distortion_check(const IntermittentMap& map,
                                                 const ReturnStructure& rs,
                                                 std::size_t trials, Rng& rng,
                                                 std::int64_t max_phi) {
    InducedDistortionReport rep;
    const double ylen = rs.y1() - rs.y0();

    // inverse of the side-0 branch with phi = 1 + m at a point e in Y:
    // x = right^{-1}(left^{-m}(e))
    auto pullback = [&](std::int64_t m, double e) {
        double v = e;
        for (std::int64_t i = 0; i < m; ++i) v = map.left_inverse(v);
        // right branch: T x = 1 - left(1 - x) = v  =>  x = 1 - left^{-1}(1 - v)
        return 1.0 - map.left_inverse(1.0 - v);
    };

    for (std::size_t t = 0; t < trials; ++t) {
        double x = rng.uniform(rs.y0(), rs.y1());
        FirstReturn r = first_return(map, rs, x, max_phi + 1);
        if (r.censored || r.phi < 2 || r.phi > max_phi) continue;
        std::int64_t m = r.phi - 1;

        // the rank-1 cylinder {side 0, phi = 1 + m} pulled back to Y
        // (side 1 is its exact mirror; sampling side 0 loses nothing)
        double e1 = rng.uniform(rs.y0(), rs.y1());
        double e2 = rng.uniform(rs.y0(), rs.y1());
        if (e1 > e2) std::swap(e1, e2);

        double zlo = pullback(m, rs.y0());
        double zhi = pullback(m, rs.y1());
        double plo = pullback(m, e1);
        double phi_hi = pullback(m, e2);
        if (!(zhi > zlo)) continue;
        double lhs = (phi_hi - plo) / (zhi - zlo);
        double rhs = (e2 - e1) / ylen;
        if (lhs <= 0.0 || rhs <= 0.0) continue;
        ++rep.trials;
        rep.max_log_distortion =
            std::max(rep.max_log_distortion, std::fabs(std::log(lhs / rhs)));
    }
    return rep;
}

}  // namespace stablelab
