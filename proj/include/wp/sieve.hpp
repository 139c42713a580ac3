#pragma once

#include <cstdint>
#include <vector>

namespace wp {

/// All primes p <= limit, ascending, by sieve of Eratosthenes.
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
    std::vector<std::uint64_t> primes;
    if (limit < 2) return primes;
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (std::uint64_t p = 2; p * p <= limit; ++p) {
        if (composite[p]) continue;
        for (std::uint64_t q = p * p; q <= limit; q += p) composite[q] = true;
    }
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (!composite[p]) primes.push_back(p);
    }
    return primes;
}

} // namespace wp
