#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace gwot {

/// SplitMix64 finalizer; used for seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of instance `index` drawn from stream `base`.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index)
{
    return splitmix64(splitmix64(base) ^ (index + 0x632be59bd9b4e019ULL));
}

/// mt19937_64 with the draws done by hand, so the sequences do not depend
/// on the standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound > 0, by rejection.
    std::uint64_t below(std::uint64_t bound)
    {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % bound;
    }

    /// Fisher-Yates shuffle of 0..n-1.
    template <class Int>
    std::vector<Int> permutation(Int n)
    {
        std::vector<Int> perm(static_cast<size_t>(n));
        for (Int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
        for (Int i = n - 1; i > 0; --i) {
            const auto j = static_cast<Int>(below(static_cast<std::uint64_t>(i) + 1));
            std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]);
        }
        return perm;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace gwot
