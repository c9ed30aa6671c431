#pragma once

#include <cstdint>
#include <vector>

#include "stablelab/gibbs_markov.hpp"
#include "stablelab/rng.hpp"

namespace stablelab {

/// State of the skew product T_f(x, m) = (T x, m + f(x)).
struct SkewProductState {
    double x = 0.0;
    std::int64_t level = 0;
};

/// Level trajectory m_0..m_n from a given start point, forward iteration.
/// Levels are exact 64-bit integers; overflow throws.
std::vector<std::int64_t> skew_orbit(const GibbsMarkovSystem& sys,
                                     const Observable& f,
                                     SkewProductState start, std::size_t n);

/// Level trajectory driven by an exact stationary orbit of the base.
std::vector<std::int64_t> skew_orbit_stationary(const GibbsMarkovSystem& sys,
                                                const Observable& f,
                                                std::int64_t m0, std::size_t n,
                                                Rng& rng);

struct OccupationFractions {
    double frac_level_ge1 = 0.0;  // time with m_k in {1,2,...}
    double frac_level_ge0 = 0.0;  // variant counting level 0 as well
};

/// One replicate of the occupation-time experiment: the fraction of
/// k in 0..n-1 with T_f^k(x, m0) in X x N, for f = factor * symbol on a
/// system with iid symbol stream. Both integer conventions are returned.
OccupationFractions occupation_fractions(const GibbsMarkovSystem& sys,
                                         std::int64_t factor, std::int64_t m0,
                                         std::size_t n, Rng& rng);

/// Same, over an explicit symbol sequence (used for the Markov-modulated
/// variant and by tests).
OccupationFractions occupation_fractions_from_symbols(
    const std::vector<std::int64_t>& symbols, std::int64_t factor,
    std::int64_t m0);

}  // namespace stablelab
