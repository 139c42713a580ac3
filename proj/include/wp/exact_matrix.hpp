#pragma once

#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "wp/bigint.hpp"
#include "wp/error.hpp"
#include "wp/mod_matrix.hpp"

namespace wp {

/// Square matrix over Z with arbitrary-precision entries, the carrier for
/// generator matrices and word values M(w). Immutable by convention once
/// built: all operations below are pure.
class ExactMatrix {
public:
    explicit ExactMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {
        if (dim_ == 0) throw DimensionMismatchError("ExactMatrix: dimension must be positive");
    }

    static ExactMatrix identity(std::size_t dim) {
        ExactMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = 1;
        return m;
    }

    /// Build from nested rows, e.g. from_rows({{1, 1}, {0, 1}}).
    static ExactMatrix from_rows(std::initializer_list<std::initializer_list<long>> rows) {
        const std::size_t d = rows.size();
        ExactMatrix m(d);
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != d)
                throw DimensionMismatchError("ExactMatrix::from_rows: matrix must be square");
            std::size_t j = 0;
            for (long v : row) m.at(i, j++) = v;
            ++i;
        }
        return m;
    }

    std::size_t dim() const { return dim_; }

    // Row-major storage, entry (i, j) at index i*dim + j.
    Int& at(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
    const Int& at(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }

    const std::vector<Int>& entries() const { return entries_; }

    bool operator==(const ExactMatrix& o) const {
        return dim_ == o.dim_ && entries_ == o.entries_;
    }
    bool operator!=(const ExactMatrix& o) const { return !(*this == o); }

    std::string to_string() const {
        std::ostringstream os;
        for (std::size_t i = 0; i < dim_; ++i) {
            os << (i == 0 ? "[" : " ");
            os << "[";
            for (std::size_t j = 0; j < dim_; ++j) {
                if (j) os << ", ";
                os << at(i, j).get_str();
            }
            os << "]" << (i + 1 == dim_ ? "]" : "\n");
        }
        return os.str();
    }

private:
    std::size_t dim_;
    std::vector<Int> entries_;
};

/// Exact integer matrix product.
inline ExactMatrix mat_mul(const ExactMatrix& a, const ExactMatrix& b) {
    if (a.dim() != b.dim())
        throw DimensionMismatchError("mat_mul: dimension mismatch");
    const std::size_t d = a.dim();
    ExactMatrix out(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            Int& acc = out.at(i, j);
            for (std::size_t k = 0; k < d; ++k) {
                mpz_addmul(acc.get_mpz_t(), a.at(i, k).get_mpz_t(), b.at(k, j).get_mpz_t());
            }
        }
    }
    return out;
}

namespace detail {

/// Determinant by Laplace expansion along the first row. Exponential in the
/// dimension, which is a fixed small constant here (2 to 5 in practice).
inline Int det_laplace(const ExactMatrix& a) {
    const std::size_t d = a.dim();
    if (d == 1) return a.at(0, 0);
    if (d == 2) return a.at(0, 0) * a.at(1, 1) - a.at(0, 1) * a.at(1, 0);
    Int det = 0;
    for (std::size_t j = 0; j < d; ++j) {
        if (sgn(a.at(0, j)) == 0) continue;
        ExactMatrix minor(d - 1);
        for (std::size_t r = 1; r < d; ++r) {
            std::size_t mc = 0;
            for (std::size_t c = 0; c < d; ++c) {
                if (c == j) continue;
                minor.at(r - 1, mc++) = a.at(r, c);
            }
        }
        Int term = a.at(0, j) * det_laplace(minor);
        if (j % 2 == 0) det += term; else det -= term;
    }
    return det;
}

} // namespace detail

inline Int determinant(const ExactMatrix& a) { return detail::det_laplace(a); }

/// Exact inverse of a matrix with determinant +1 or -1, via the adjugate:
/// inv(A) = det(A) * adj(A) since 1/det = det for det = +-1. No rational
/// intermediates appear, so the result is exact by construction.
inline ExactMatrix mat_inverse_unimodular(const ExactMatrix& a) {
    const Int det = determinant(a);
    if (det != 1 && det != -1)
        throw NotUnimodularError("mat_inverse_unimodular: determinant is " + det.get_str() +
                                 ", expected +1 or -1");
    const std::size_t d = a.dim();
    ExactMatrix inv(d);
    if (d == 1) {
        inv.at(0, 0) = det; // a = [[+-1]]
        return inv;
    }
    ExactMatrix minor(d - 1);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            std::size_t mr = 0;
            for (std::size_t r = 0; r < d; ++r) {
                if (r == i) continue;
                std::size_t mc = 0;
                for (std::size_t c = 0; c < d; ++c) {
                    if (c == j) continue;
                    minor.at(mr, mc++) = a.at(r, c);
                }
                ++mr;
            }
            // adj(A)[j][i] = (-1)^(i+j) det(minor_ij); fold in det(A).
            Int cof = detail::det_laplace(minor);
            if ((i + j) % 2 == 1) cof = -cof;
            inv.at(j, i) = det * cof;
        }
    }
    return inv;
}

/// Projection modulo m with every entry mapped to its representative in
/// [0, m); negative entries land on the nonnegative residue.
inline ModMatrix mod_reduce(const ExactMatrix& a, const Int& m) {
    if (m < 2) throw Error("mod_reduce: modulus must be >= 2");
    const std::size_t d = a.dim();
    ModMatrix out(d, m);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            mpz_fdiv_r(out.at(i, j).get_mpz_t(), a.at(i, j).get_mpz_t(), m.get_mpz_t());
        }
    }
    return out;
}

inline bool is_identity(const ExactMatrix& a) {
    const std::size_t d = a.dim();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const Int& e = a.at(i, j);
            if (i == j ? (e != 1) : (sgn(e) != 0)) return false;
        }
    }
    return true;
}

/// Max-norm: largest absolute value over the entries.
inline Int max_norm(const ExactMatrix& a) {
    Int best = 0;
    Int t;
    for (const Int& e : a.entries()) {
        t = abs(e);
        if (t > best) best = t;
    }
    return best;
}

/// Largest signed bit-length over the entries; the cost-model size of the
/// matrix.
inline std::size_t max_entry_bit_length(const ExactMatrix& a) {
    std::size_t best = 0;
    for (const Int& e : a.entries()) {
        std::size_t l = bit_length(e);
        if (l > best) best = l;
    }
    return best;
}

} // namespace wp
