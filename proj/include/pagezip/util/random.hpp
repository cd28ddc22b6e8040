// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace pagezip
{

/// SplitMix64. Small, fast and identical on every platform, unlike the
/// standard distributions.
class SplitMix64
{
  public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed = 0) noexcept: _state(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~std::uint64_t { 0 }; }

    result_type operator()() noexcept
    {
        auto z = (_state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

  private:
    std::uint64_t _state;
};

/// Uniform double in [0, 1) with 53 random bits.
inline double uniformUnit(SplitMix64& rng) noexcept
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n), rejection-sampled to avoid modulo bias. n > 0.
inline std::uint64_t uniformBelow(SplitMix64& rng, std::uint64_t n) noexcept
{
    auto const limit = SplitMix64::max() - SplitMix64::max() % n;
    while (true)
    {
        auto const x = rng();
        if (x < limit)
            return x % n;
    }
}

/// Uniform integer in [lo, hi].
inline std::int64_t uniformBetween(SplitMix64& rng, std::int64_t lo, std::int64_t hi) noexcept
{
    return lo + static_cast<std::int64_t>(uniformBelow(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

template <typename T>
void shuffleInPlace(std::vector<T>& items, SplitMix64& rng)
{
    for (auto i = items.size(); i > 1; --i)
        std::swap(items[i - 1], items[uniformBelow(rng, i)]);
}

/// Seed for an independent stream derived from (seed, stream).
inline std::uint64_t deriveSeed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    auto mixer = SplitMix64(seed ^ (0xD1B54A32D192ED03ULL * (stream + 1)));
    return mixer();
}

} // namespace pagezip
