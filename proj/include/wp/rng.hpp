#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace wp {

/// splitmix64 step; used to whiten seeds and derive substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seeded random stream with reproducible output across platforms and builds.
///
/// The engine is std::mt19937_64 (fully specified by the C++ standard) and
/// bounded draws use rejection sampling, so identical seeds produce identical
/// streams everywhere. Substreams for parallel trials are derived from
/// (seed, index) with splitmix64, never by splitting engine state.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    /// Identifier recorded in benchmark outputs so results are replayable.
    static const char* algorithm_id() { return "mt19937_64+rejection"; }

    /// Substream i of a master seed; deterministic in (seed, i).
    static SeededRng substream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s);
        s ^= index * 0x9e3779b97f4a7c15ull;
        std::uint64_t b = splitmix64(s);
        return SeededRng(a ^ (b + 0x2545f4914f6cdd1dull));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform draw from [0, bound); bound >= 1. Unbiased via rejection.
    std::uint64_t uniform_below(std::uint64_t bound) {
        if (bound <= 1) return 0;
        // Largest multiple of bound that fits in 64 bits.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        for (;;) {
            std::uint64_t v = engine_();
            if (v < limit) return v % bound;
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace wp
