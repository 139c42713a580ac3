#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <gmpxx.h>

namespace wp {

/// Arbitrary-precision signed integer.
using Int = mpz_class;

/// Exact rational number.
using Rat = mpq_class;

/// Number of binary digits of |x|; bit_count(0) == 1 by convention.
inline std::size_t bit_count(const Int& x) {
    if (sgn(x) == 0) return 1;
    return mpz_sizeinbase(x.get_mpz_t(), 2);
}

/// Bit-length of the signed binary encoding of x:
/// ceil(log2(|x| + 1)) + 1, the extra bit encoding the sign.
/// bit_length(0) == 1, bit_length(1) == 2, bit_length(2) == 3.
inline std::size_t bit_length(const Int& x) {
    if (sgn(x) == 0) return 1;
    return mpz_sizeinbase(x.get_mpz_t(), 2) + 1;
}

inline std::size_t bit_length(long x) { return bit_length(Int(x)); }

/// Decimal rendering (GMP's canonical representation).
inline std::string to_string(const Int& x) { return x.get_str(); }

} // namespace wp
