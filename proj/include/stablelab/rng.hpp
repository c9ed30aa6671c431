#pragma once

#include <cstdint>
#include <cmath>

namespace stablelab {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// xoshiro256++ with explicit seeding. Experiments derive one independent
/// stream per replicate from (master_seed, replicate_index), so results do
/// not depend on how replicates are scheduled across workers.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0x853c49e6748fea9bULL) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    static Rng for_replicate(std::uint64_t master_seed, std::uint64_t replicate) {
        std::uint64_t sm = master_seed ^ (0x9e3779b97f4a7c15ULL * (replicate + 1));
        return Rng(splitmix64(sm));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform on (0,1): 53 random bits, zero excluded.
    double uniform() {
        while (true) {
            double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
            if (u > 0.0) return u;
        }
    }

    /// Uniform on the open interval (a,b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard exponential via inversion.
    double exponential() { return -std::log(uniform()); }

    /// Geometric on {1,2,...} with P(k) = 2^{-k}, from leading zeros of a
    /// random word (exact).
    int geometric_half() {
        while (true) {
            std::uint64_t u = next_u64();
            if (u != 0) return __builtin_clzll(u) + 1;
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

}  // namespace stablelab
