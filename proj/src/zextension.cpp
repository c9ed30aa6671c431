#include "stablelab/zextension.hpp"

#include <cmath>
#include <stdexcept>

namespace stablelab {

namespace {

std::int64_t as_integer(double v) {
    double r = std::nearbyint(v);
    if (std::fabs(v - r) > 1e-9 || std::fabs(r) > 9.0e18)
        throw std::invalid_argument("skew product: observable not integer");
    return static_cast<std::int64_t>(r);
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t out;
    if (__builtin_add_overflow(a, b, &out))
        throw std::overflow_error("skew product: level accumulator overflow");
    return out;
}

}  // namespace

std::vector<std::int64_t> skew_orbit(const GibbsMarkovSystem& sys,
                                     const Observable& f,
                                     SkewProductState start, std::size_t n) {
    if (!f.integer_valued())
        throw std::invalid_argument("skew_orbit: integer observable required");
    std::vector<std::int64_t> levels(n + 1);
    levels[0] = start.level;
    double x = start.x;
    for (std::size_t k = 0; k < n; ++k) {
        std::int64_t inc = as_integer(f(x, sys.symbol_of(x)));
        levels[k + 1] = checked_add(levels[k], inc);
        x = sys.apply(x);
    }
    return levels;
}

std::vector<std::int64_t> skew_orbit_stationary(const GibbsMarkovSystem& sys,
                                                const Observable& f,
                                                std::int64_t m0, std::size_t n,
                                                Rng& rng) {
    if (!f.integer_valued())
        throw std::invalid_argument("skew_orbit: integer observable required");
    auto orbit = sys.stationary_orbit(n, rng);
    std::vector<std::int64_t> levels(n + 1);
    levels[0] = m0;
    for (std::size_t k = 0; k < n; ++k)
        levels[k + 1] =
            checked_add(levels[k], as_integer(f(orbit[k].x, orbit[k].symbol)));
    return levels;
}

OccupationFractions occupation_fractions(const GibbsMarkovSystem& sys,
                                         std::int64_t factor, std::int64_t m0,
                                         std::size_t n, Rng& rng) {
    if (n == 0)
        throw std::invalid_argument("occupation_fractions: n >= 1 required");
    auto symbols = sys.stationary_symbols(n, rng);
    return occupation_fractions_from_symbols(symbols, factor, m0);
}

OccupationFractions occupation_fractions_from_symbols(
    const std::vector<std::int64_t>& symbols, std::int64_t factor,
    std::int64_t m0) {
    const std::size_t n = symbols.size();
    if (n == 0)
        throw std::invalid_argument("occupation_fractions: n >= 1 required");
    std::int64_t m = m0;
    std::size_t ge1 = 0, ge0 = 0;
    for (std::size_t k = 0; k < n; ++k) {
        if (m >= 1) ++ge1;
        if (m >= 0) ++ge0;
        std::int64_t inc;
        if (__builtin_mul_overflow(factor, symbols[k], &inc))
            throw std::overflow_error("occupation_fractions: increment overflow");
        m = checked_add(m, inc);
    }
    const double dn = static_cast<double>(n);
    return {static_cast<double>(ge1) / dn, static_cast<double>(ge0) / dn};
}

}  // namespace stablelab
