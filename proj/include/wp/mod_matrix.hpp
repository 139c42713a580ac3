#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wp/bigint.hpp"
#include "wp/error.hpp"

namespace wp {

/// Square matrix over Z/mZ, m >= 2. Entries are always stored as their
/// canonical representative in [0, m). The modulus travels with the value
/// and every binary operation checks it: mixing moduli silently would be a
/// correctness hazard, not a convenience.
///
/// Residues are arbitrary-precision because the moduli of interest (the
/// products q(n) of small primes) exceed machine width long before the
/// word lengths of interest are reached.
class ModMatrix {
public:
    ModMatrix(std::size_t dim, Int modulus)
        : dim_(dim), modulus_(std::move(modulus)), entries_(dim * dim) {
        if (dim_ == 0) throw DimensionMismatchError("ModMatrix: dimension must be positive");
        if (modulus_ < 2) throw Error("ModMatrix: modulus must be >= 2");
    }

    static ModMatrix identity(std::size_t dim, Int modulus) {
        ModMatrix m(dim, std::move(modulus));
        for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1;
        return m;
    }

    std::size_t dim() const { return dim_; }
    const Int& modulus() const { return modulus_; }

    // Row-major storage, entry (i, j) at index i*dim + j.
    Int& at(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
    const Int& at(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

    const std::vector<Int>& entries() const { return entries_; }

    bool operator==(const ModMatrix& o) const {
        return dim_ == o.dim_ && modulus_ == o.modulus_ && entries_ == o.entries_;
    }
    bool operator!=(const ModMatrix& o) const { return !(*this == o); }

private:
    std::size_t dim_;
    Int modulus_;
    std::vector<Int> entries_;
};

/// Entrywise-reduced product; operands must share dimension and modulus.
inline ModMatrix mod_mul(const ModMatrix& x, const ModMatrix& y) {
    if (x.dim() != y.dim())
        throw DimensionMismatchError("mod_mul: dimension mismatch");
    if (x.modulus() != y.modulus())
        throw DimensionMismatchError("mod_mul: modulus mismatch");
    const std::size_t d = x.dim();
    ModMatrix out(d, x.modulus());
    Int acc, t;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            acc = 0;
            for (std::size_t k = 0; k < d; ++k) {
                mpz_addmul(acc.get_mpz_t(), x.at(i, k).get_mpz_t(), y.at(k, j).get_mpz_t());
            }
            mpz_fdiv_r(out.at(i, j).get_mpz_t(), acc.get_mpz_t(), x.modulus().get_mpz_t());
        }
    }
    return out;
}

/// True iff x is the identity of its ring (diagonal 1, off-diagonal 0).
inline bool mod_is_identity(const ModMatrix& x) {
    const std::size_t d = x.dim();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const Int& e = x.at(i, j);
            if (i == j ? (e != 1) : (sgn(e) != 0)) return false;
        }
    }
    return true;
}

/// Injective byte encoding of a reduced matrix, used as a Markov-chain state
/// key. Entries are concatenated row-major, each as its minimal big-endian
/// byte string with a one-byte length prefix (0 encodes to just the prefix).
inline std::string canonical_key(const ModMatrix& x) {
    std::string out;
    out.reserve(x.dim() * x.dim() * 2);
    for (const Int& e : x.entries()) {
        if (sgn(e) == 0) {
            out.push_back('\0');
            continue;
        }
        const std::size_t nbytes = (mpz_sizeinbase(e.get_mpz_t(), 2) + 7) / 8;
        if (nbytes > 255)
            throw Error("canonical_key: entry wider than 255 bytes");
        out.push_back(static_cast<char>(static_cast<unsigned char>(nbytes)));
        const std::size_t pos = out.size();
        out.resize(pos + nbytes);
        std::size_t written = 0;
        mpz_export(&out[pos], &written, 1, 1, 0, 0, e.get_mpz_t());
        if (written != nbytes)
            throw Error("canonical_key: export size mismatch");
    }
    return out;
}

} // namespace wp
